//! Melnikov functions `R_up(φ)`, `R_down(φ)` and their derivatives, the closed forms for the
//! periodic triple and the exponential hill, and the tail constants of localized topographies.

use crate::core::{heteroclinic, heteroclinic_deriv, ln_weight_wh, weight_wh, Orientation, NORM_SQ};
use crate::error::{Error, Result};
use crate::forcing::{eval_forcing, forcing_partials, Forcing, Topography};
use crate::numerics::bisect;
use crate::numerics::lognum::LogNum;
use crate::numerics::quad::{integrate, integrate_with_breaks, QuadOptions};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::sync::{Arc, Mutex};

/// Evaluation strategy for a Melnikov function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MelnikovBackend {
    /// Adaptive Gauss–Kronrod quadrature over `[-half_width, half_width]` in the weight frame.
    Quadrature { rel_tol: f64, abs_tol: f64, half_width: f64 },
    /// `R_up = 16(A+B) sin kφ`, `R_down = 16(A-B) sin kφ`.
    PeriodicClosed { a: f64, b: f64, k: f64 },
    /// Closed form for the exponential hill with `μ = 1`.
    SolHillClosed,
}

impl MelnikovBackend {
    pub fn default_quadrature() -> Self {
        MelnikovBackend::Quadrature { rel_tol: 1e-11, abs_tol: 1e-15, half_width: 20.0 }
    }
}

/// Grid spacing of the memoization table used by [`MelnikovFn::cached`].
pub const CACHE_SPACING: f64 = 1e-3;

type CacheTable = Arc<Mutex<HashMap<i64, (f64, f64)>>>;

/// Evaluator for `R(φ)` and `R'(φ)` of one front orientation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MelnikovFn {
    pub forcing: Forcing,
    pub backend: MelnikovBackend,
    pub orientation: Orientation,
    #[serde(skip)]
    cache: Option<CacheTable>,
}

impl PartialEq for MelnikovFn {
    fn eq(&self, other: &Self) -> bool {
        self.forcing == other.forcing && self.backend == other.backend && self.orientation == other.orientation
    }
}

impl MelnikovFn {
    /// Quadrature backend with default tolerances.
    pub fn quadrature(forcing: Forcing, orientation: Orientation) -> Self {
        Self { forcing, backend: MelnikovBackend::default_quadrature(), orientation, cache: None }
    }

    /// Closed-form backend for the periodic triple forcing.
    pub fn periodic_closed(alpha1: f64, alpha2: f64, alpha3: f64, k: f64, orientation: Orientation) -> Result<Self> {
        let (a, b) = periodic_closed_constants(alpha1, alpha2, alpha3, k)?;
        Ok(Self {
            forcing: Forcing::triple(alpha1, alpha2, alpha3, k),
            backend: MelnikovBackend::PeriodicClosed { a, b, k },
            orientation,
            cache: None,
        })
    }

    /// Closed-form backend for the exponential hill with `μ = 1`.
    pub fn solhill_closed() -> Self {
        Self {
            forcing: Forcing::topography(Topography::exp_hill(1.0)),
            backend: MelnikovBackend::SolHillClosed,
            orientation: Orientation::Up,
            cache: None,
        }
    }

    /// Closed form when one exists for this forcing, quadrature otherwise.
    pub fn auto(forcing: Forcing, orientation: Orientation) -> Self {
        match &forcing {
            Forcing::CosSinTriple { alpha1, alpha2, alpha3, k } => {
                Self::periodic_closed(*alpha1, *alpha2, *alpha3, *k, orientation)
                    .unwrap_or_else(|_| Self::quadrature(forcing.clone(), orientation))
            }
            Forcing::TopographyDriven { topo: Topography::ExpHill { mu, sign } } if *mu == 1.0 && *sign == 1.0 => {
                Self { orientation, ..Self::solhill_closed() }
            }
            _ => Self::quadrature(forcing, orientation),
        }
    }

    /// Same evaluator with the given orientation.
    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Self { orientation, cache: None, ..self.clone() }
    }

    /// Memoizes quadrature values on a `1e-3` grid and interpolates with cubic Hermite
    /// polynomials. Closed-form backends are returned unchanged.
    pub fn cached(mut self) -> Self {
        if matches!(self.backend, MelnikovBackend::Quadrature { .. }) {
            self.cache = Some(Arc::new(Mutex::new(HashMap::new())));
        }
        self
    }

    /// Checks that the backend is consistent with the forcing.
    pub fn validate(&self) -> Result<()> {
        self.forcing.validate()?;
        match (&self.backend, &self.forcing) {
            (MelnikovBackend::Quadrature { half_width, rel_tol, abs_tol }, _) => {
                if *half_width < 20.0 || !(*rel_tol > 0.0) || !(*abs_tol > 0.0) {
                    return Err(Error::invalid("quadrature backend needs half_width >= 20 and positive tolerances"));
                }
            }
            (MelnikovBackend::PeriodicClosed { a, b, k }, Forcing::CosSinTriple { alpha1, alpha2, alpha3, k: kf }) => {
                let (a2, b2) = periodic_closed_constants(*alpha1, *alpha2, *alpha3, *kf)?;
                if (a - a2).abs() > 1e-12 * (1.0 + a.abs()) || (b - b2).abs() > 1e-12 * (1.0 + b.abs()) || k != kf {
                    return Err(Error::invalid("closed-form constants do not match the forcing"));
                }
            }
            (MelnikovBackend::SolHillClosed, Forcing::TopographyDriven { topo: Topography::ExpHill { mu, .. } })
                if *mu == 1.0 => {}
            _ => return Err(Error::invalid("Melnikov backend inconsistent with forcing")),
        }
        Ok(())
    }

    fn quad_opts(&self) -> (QuadOptions, f64) {
        match self.backend {
            MelnikovBackend::Quadrature { rel_tol, abs_tol, half_width } => (QuadOptions::new(abs_tol, rel_tol), half_width),
            _ => {
                let MelnikovBackend::Quadrature { rel_tol, abs_tol, half_width } = MelnikovBackend::default_quadrature()
                else {
                    unreachable!()
                };
                (QuadOptions::new(abs_tol, rel_tol), half_width)
            }
        }
    }

    fn breaks(&self, phi: f64, half_width: f64) -> Vec<f64> {
        let mut b = vec![-half_width, -half_width / 2.0, 0.0, half_width / 2.0, half_width];
        for xf in self.forcing.feature_points() {
            let y = xf - phi;
            if y.abs() < half_width {
                b.push(y);
            }
        }
        b.sort_by(|a, c| a.partial_cmp(c).expect("finite breaks"));
        b.dedup_by(|a, c| (*a - *c).abs() < 1e-12);
        b
    }

    fn quad_value(&self, phi: f64) -> Result<f64> {
        if self.forcing.is_zero() {
            return Ok(0.0);
        }
        let (opts, hw) = self.quad_opts();
        let breaks = self.breaks(phi, hw);
        let r = match &self.forcing {
            Forcing::TopographyDriven { topo } => {
                integrate_with_breaks(|y| topo.d1(y + phi) * weight_wh(y), &breaks, opts)?
            }
            f => {
                let o = self.orientation;
                integrate_with_breaks(
                    |y| {
                        let u = heteroclinic(o, y, 0.0);
                        let v = heteroclinic_deriv(o, y, 0.0);
                        eval_forcing(f, u, v, y + phi) * v
                    },
                    &breaks,
                    opts,
                )?
            }
        };
        Ok(r.value)
    }

    fn quad_deriv(&self, phi: f64) -> Result<f64> {
        if self.forcing.is_zero() {
            return Ok(0.0);
        }
        let (opts, hw) = self.quad_opts();
        let breaks = self.breaks(phi, hw);
        let r = match &self.forcing {
            Forcing::TopographyDriven { topo } => {
                integrate_with_breaks(|y| topo.d2(y + phi) * weight_wh(y), &breaks, opts)?
            }
            f => {
                let o = self.orientation;
                integrate_with_breaks(
                    |y| {
                        let u = heteroclinic(o, y, 0.0);
                        let v = heteroclinic_deriv(o, y, 0.0);
                        forcing_partials(f, u, v, y + phi).2 * v
                    },
                    &breaks,
                    opts,
                )?
            }
        };
        Ok(r.value)
    }

    fn direct(&self, phi: f64) -> Result<(f64, f64)> {
        match &self.backend {
            MelnikovBackend::Quadrature { .. } => Ok((self.quad_value(phi)?, self.quad_deriv(phi)?)),
            MelnikovBackend::PeriodicClosed { a, b, k } => {
                let c = 16.0 * (a + self.orientation.sign() * b);
                Ok((c * (k * phi).sin(), c * k * (k * phi).cos()))
            }
            MelnikovBackend::SolHillClosed => {
                let sign = match &self.forcing {
                    Forcing::TopographyDriven { topo: Topography::ExpHill { sign, .. } } => *sign,
                    _ => 1.0,
                };
                let psi = SQRT_2 * phi;
                Ok((sign * solhill_closed(psi), sign * SQRT_2 * solhill_closed_deriv(psi)))
            }
        }
    }

    fn cached_pair(&self, table: &CacheTable, phi: f64) -> Result<(f64, f64)> {
        let i0 = (phi / CACHE_SPACING).floor() as i64;
        let node = |i: i64| -> Result<(f64, f64)> {
            if let Some(v) = table.lock().expect("cache lock").get(&i) {
                return Ok(*v);
            }
            let v = self.direct(i as f64 * CACHE_SPACING)?;
            table.lock().expect("cache lock").insert(i, v);
            Ok(v)
        };
        let (r0, d0) = node(i0)?;
        let (r1, d1) = node(i0 + 1)?;
        let h = CACHE_SPACING;
        let t = phi / h - i0 as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * r0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * r1
            + (t3 - t2) * h * d1;
        let deriv = ((6.0 * t2 - 6.0 * t) * r0 + (-6.0 * t2 + 6.0 * t) * r1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (3.0 * t2 - 2.0 * t) * d1;
        Ok((value, deriv))
    }

    /// `(R(φ), R'(φ))`.
    pub fn eval_pair(&self, phi: f64) -> Result<(f64, f64)> {
        match &self.cache {
            Some(table) => self.cached_pair(table, phi),
            None => self.direct(phi),
        }
    }

    /// `R(φ)`.
    pub fn value(&self, phi: f64) -> Result<f64> {
        match (&self.cache, &self.backend) {
            (Some(_), _) => Ok(self.eval_pair(phi)?.0),
            (None, MelnikovBackend::Quadrature { .. }) => self.quad_value(phi),
            (None, _) => Ok(self.direct(phi)?.0),
        }
    }

    /// `R'(φ)`, from the differentiated integrand.
    pub fn deriv(&self, phi: f64) -> Result<f64> {
        match (&self.cache, &self.backend) {
            (Some(_), _) => Ok(self.eval_pair(phi)?.1),
            (None, MelnikovBackend::Quadrature { .. }) => self.quad_deriv(phi),
            (None, _) => Ok(self.direct(phi)?.1),
        }
    }

    /// `R(φ)` as a [`LogNum`], accurate even when the value underflows `f64`
    /// (fronts far out in the tails of a localized topography).
    pub fn value_log(&self, phi: f64) -> Result<LogNum> {
        match &self.forcing {
            Forcing::TopographyDriven { topo } if topo.is_even() || topo.feature_points() == [0.0] => {
                log_scaled_integral(|x| (topo.ln_abs_d1(x), topo.d1(x).signum()), phi)
            }
            _ => Ok(LogNum::from_f64(self.value(phi)?)),
        }
    }

    /// `R'(φ)` as a [`LogNum`].
    pub fn deriv_log(&self, phi: f64) -> Result<LogNum> {
        match &self.forcing {
            Forcing::TopographyDriven { topo } if topo.is_even() || topo.feature_points() == [0.0] => {
                log_scaled_integral(|x| topo.ln_abs_d2(x), phi)
            }
            _ => Ok(LogNum::from_f64(self.deriv(phi)?)),
        }
    }
}

/// `∫ g(y + φ) W_h(y) dy` for a topography factor `g` given as `(ln|g|, sign g)`, evaluated in
/// units of the integrand's maximum so that neither the value nor the integrand underflows.
fn log_scaled_integral<G: Fn(f64) -> (f64, f64)>(g: G, phi: f64) -> Result<LogNum> {
    let lo = (-phi).min(0.0) - 30.0;
    let hi = (-phi).max(0.0) + 30.0;
    let log_integrand = |y: f64| {
        let (lg, s) = g(y + phi);
        (lg + ln_weight_wh(y), s)
    };
    let samples = 4000;
    let mut peak = f64::NEG_INFINITY;
    for i in 0..=samples {
        let y = lo + (hi - lo) * i as f64 / samples as f64;
        let (l, s) = log_integrand(y);
        if s != 0.0 && l.is_finite() {
            peak = peak.max(l);
        }
    }
    if peak == f64::NEG_INFINITY {
        return Ok(LogNum::ZERO);
    }
    let mut breaks = vec![lo, hi, 0.0, -phi, 0.5 * (lo + hi)];
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let opts = QuadOptions::new(1e-15, 1e-12);
    let r = integrate_with_breaks(
        |y| {
            let (l, s) = log_integrand(y);
            if s == 0.0 {
                0.0
            } else {
                s * (l - peak).exp()
            }
        },
        &breaks,
        opts,
    )?;
    Ok(LogNum::from_f64(r.value).mul_exp(peak))
}

/// `R(φ)`.
pub fn melnikov(f: &MelnikovFn, phi: f64) -> Result<f64> {
    f.value(phi)
}

/// `R'(φ)`.
pub fn melnikov_deriv(f: &MelnikovFn, phi: f64) -> Result<f64> {
    f.deriv(phi)
}

/// Closed-form constants `(A, B)` of the periodic triple
/// `F = α1 cos(kx)U + α2 sin(kx)V + α3 sin(kx)`.
pub fn periodic_closed_constants(alpha1: f64, alpha2: f64, alpha3: f64, k: f64) -> Result<(f64, f64)> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::invalid("periodic closed form requires k != 0"));
    }
    let den = 3.0 * (k * PI / SQRT_2).sinh();
    let a16 = k * PI * (-3.0 * alpha1 * k + alpha2 * (2.0 + k * k)) / den;
    let b16 = k * PI * 3.0 * SQRT_2 * alpha3 / den;
    Ok((a16 / 16.0, b16 / 16.0))
}

/// Odd Taylor coefficients `c_1, c_3, …, c_31` of the exponential-hill closed form at 0.
const SOLHILL_TAYLOR: [f64; 16] = [
    0.0761904761904762,
    -0.0380952380952381,
    0.0052525252525252525,
    -0.0004555233126661698,
    3.0573482954435335e-05,
    -1.7393040268857263e-06,
    8.80893789226713e-08,
    -4.0918537782993295e-09,
    1.7776090200466918e-10,
    -7.320459598292335e-12,
    2.885786495178307e-13,
    -1.096929404123723e-14,
    4.0430579379211534e-16,
    -1.451319357879784e-17,
    5.09167272889969e-19,
    -1.7508111672782057e-20,
];

/// Below this `|ψ|` the closed form is replaced by its Taylor series (the closed form cancels
/// catastrophically against the `(e^ψ - 1)⁶` denominator).
pub const SOLHILL_SERIES_RADIUS: f64 = 1.0;

fn solhill_numerator(psi: f64, e: f64) -> (f64, f64, f64) {
    let n = (3.0 * psi - 13.0)
        + 2.0 * (27.0 * psi - 47.0) * e
        + 126.0 * psi * e * e
        + 2.0 * (27.0 * psi + 47.0) * e.powi(3)
        + (3.0 * psi + 13.0) * e.powi(4);
    let n_psi = 3.0 + 54.0 * e + 126.0 * e * e + 54.0 * e.powi(3) + 3.0 * e.powi(4);
    let n_e = 2.0 * (27.0 * psi - 47.0)
        + 252.0 * psi * e
        + 6.0 * (27.0 * psi + 47.0) * e * e
        + 4.0 * (3.0 * psi + 13.0) * e.powi(3);
    (n, n_psi, n_e)
}

/// Closed form `S_exp(ψ; 1)` of the Melnikov function of `H_exp(·; 1)` in the variable
/// `ψ = √2φ`.
pub fn solhill_closed(psi: f64) -> f64 {
    if psi.abs() < SOLHILL_SERIES_RADIUS {
        let p2 = psi * psi;
        let mut acc = 0.0;
        for c in SOLHILL_TAYLOR.iter().rev() {
            acc = acc * p2 + c;
        }
        return acc * psi;
    }
    if psi < 0.0 {
        return -solhill_closed(-psi);
    }
    let e = (-psi).exp();
    let (n, _, _) = solhill_numerator(psi, e);
    -16.0 * e * n / (3.0 * (1.0 - e).powi(6))
}

/// `dS_exp/dψ` of [`solhill_closed`].
pub fn solhill_closed_deriv(psi: f64) -> f64 {
    if psi.abs() < SOLHILL_SERIES_RADIUS {
        let p2 = psi * psi;
        let mut acc = 0.0;
        for (i, c) in SOLHILL_TAYLOR.iter().enumerate().rev() {
            acc = acc * p2 + c * (2 * i + 1) as f64;
        }
        return acc;
    }
    if psi < 0.0 {
        return solhill_closed_deriv(-psi);
    }
    let e = (-psi).exp();
    let (n, n_psi, n_e) = solhill_numerator(psi, e);
    let dn = n_psi - e * n_e;
    -16.0 / 3.0 * e / (1.0 - e).powi(6) * (-n + dn - 6.0 * e * n / (1.0 - e))
}

/// Leading-order tail behaviour of `S(ψ) = R(ψ/√2)` for a localized topography.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TailModel {
    /// `H'(x) ~ h± e^{∓μ√2x}`. For `0 < μ < 1`, `S(ψ) ~ h± w± e^{∓μψ}`; for `μ > 1`,
    /// `S(ψ) ~ ĥ± e^{∓ψ}`.
    Exponential {
        mu: f64,
        h_plus: f64,
        h_minus: f64,
        w_plus: Option<f64>,
        w_minus: Option<f64>,
        hhat_plus: Option<f64>,
        hhat_minus: Option<f64>,
    },
    /// `H'(x) ~ h̃±/|x|^p`, so `|ψ|^p S(ψ)` tends to `(1/3)2^{(p+3)/2} h̃±`.
    Algebraic { p: f64, htilde_plus: f64, htilde_minus: f64 },
}

impl TailModel {
    /// Predicted `S(ψ)` from the leading tail term (`ψ` large, sign selects the tail).
    pub fn predicted(&self, psi: f64) -> Option<f64> {
        match self {
            TailModel::Exponential { mu, h_plus, h_minus, w_plus, w_minus, hhat_plus, hhat_minus } => {
                if *mu < 1.0 {
                    if psi > 0.0 {
                        Some(h_plus * (*w_plus)? * (-mu * psi).exp())
                    } else {
                        Some(h_minus * (*w_minus)? * (mu * psi).exp())
                    }
                } else if psi > 0.0 {
                    Some((*hhat_plus)? * (-psi).exp())
                } else {
                    Some((*hhat_minus)? * psi.exp())
                }
            }
            TailModel::Algebraic { p, .. } => {
                let c = if psi > 0.0 { self.limit_constant(true) } else { self.limit_constant(false) };
                Some(c / psi.abs().powf(*p))
            }
        }
    }

    /// `(1/3)2^{(p+3)/2} h̃±` for the algebraic model; NaN for the exponential one.
    pub fn limit_constant(&self, plus: bool) -> f64 {
        match self {
            TailModel::Algebraic { p, htilde_plus, htilde_minus } => {
                let h = if plus { *htilde_plus } else { *htilde_minus };
                2f64.powf((p + 3.0) / 2.0) * h / 3.0
            }
            TailModel::Exponential { .. } => f64::NAN,
        }
    }

    /// Tail sign condition `h₊ < 0 < h₋` (hill-like approach from both sides).
    pub fn hill_signs(&self) -> bool {
        match self {
            TailModel::Exponential { h_plus, h_minus, .. } => *h_plus < 0.0 && *h_minus > 0.0,
            TailModel::Algebraic { htilde_plus, htilde_minus, .. } => *htilde_plus < 0.0 && *htilde_minus > 0.0,
        }
    }
}

/// `w±(μ) = ∫ e^{∓μ√2y} W_h(y) dy`, finite for `0 < μ < 1`.
pub fn tail_weight(mu: f64, plus: bool) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::DivergentIntegral(format!("w±(μ) diverges for μ = {mu} outside (0, 1)")));
    }
    let s = if plus { -1.0 } else { 1.0 };
    let len = 40.0 / (SQRT_2 * (1.0 - mu)) + 40.0;
    let r = integrate_with_breaks(
        |y| (s * mu * SQRT_2 * y + ln_weight_wh(y)).exp(),
        &[-len, -10.0, 0.0, 10.0, len],
        QuadOptions::new(1e-14, 1e-12),
    )?;
    Ok(r.value)
}

/// Tail constants of an exponentially decaying topography with rate `μ`.
pub fn tail_constants_exponential(topo: &Topography, mu: f64) -> Result<TailModel> {
    if !(mu > 0.0) {
        return Err(Error::invalid("exponential tail rate must be positive"));
    }
    let (h_plus, h_minus) = match topo {
        Topography::ExpHill { mu: m, sign } if (*m - mu).abs() < 1e-14 => (-4.0 * SQRT_2 * mu * sign, 4.0 * SQRT_2 * mu * sign),
        _ => {
            let x = 20.0 / mu;
            (topo.d1(x) * (mu * SQRT_2 * x).exp(), topo.d1(-x) * (mu * SQRT_2 * x).exp())
        }
    };
    let (w_plus, w_minus) = if mu < 1.0 { (Some(tail_weight(mu, true)?), Some(tail_weight(mu, false)?)) } else { (None, None) };
    let (hhat_plus, hhat_minus) = if mu > 1.0 {
        let len = 40.0 / (SQRT_2 * (mu - 1.0)) + 40.0;
        let opts = QuadOptions::new(1e-14, 1e-12);
        let p = integrate_with_breaks(|z| 4.0 * (SQRT_2 * z).exp() * topo.d1(z), &[-len, 0.0, len], opts)?;
        let m = integrate_with_breaks(|z| 4.0 * (-SQRT_2 * z).exp() * topo.d1(z), &[-len, 0.0, len], opts)?;
        (Some(p.value), Some(m.value))
    } else {
        (None, None)
    };
    Ok(TailModel::Exponential { mu, h_plus, h_minus, w_plus, w_minus, hhat_plus, hhat_minus })
}

/// Tail constants of an algebraically decaying topography `H' ~ h̃±/|x|^p`.
pub fn tail_constants_algebraic(topo: &Topography, p: f64) -> TailModel {
    let (htilde_plus, htilde_minus) = match topo {
        Topography::AlgHill { p: q, sign } if (*q - p).abs() < 1e-14 => (sign * (1.0 - p), -sign * (1.0 - p)),
        _ => {
            let x: f64 = 1e4;
            (topo.d1(x) * x.powf(p), topo.d1(-x) * x.powf(p))
        }
    };
    TailModel::Algebraic { p, htilde_plus, htilde_minus }
}

/// A simple zero of a Melnikov function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MelnikovZero {
    pub phi: f64,
    pub r_prime: f64,
    pub residual: f64,
}

/// Result of [`melnikov_zero_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroScan {
    pub zeros: Vec<MelnikovZero>,
    /// True when `R` vanishes at every sample (no isolated zeros exist).
    pub degenerate: bool,
}

/// Locates the sign changes of `R` on `n` uniform samples of `[phi_min, phi_max]`, refined by
/// bisection and one Newton step.
pub fn melnikov_zero_scan(f: &MelnikovFn, phi_min: f64, phi_max: f64, n: usize) -> Result<ZeroScan> {
    if n < 2 || !(phi_max > phi_min) {
        return Err(Error::invalid("zero scan needs n >= 2 and phi_min < phi_max"));
    }
    let xs: Vec<f64> = (0..n).map(|i| phi_min + (phi_max - phi_min) * i as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect::<Result<_>>()?;
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale < 1e-14 {
        return Ok(ZeroScan { zeros: Vec::new(), degenerate: true });
    }
    let eval = |x: f64| f.value(x).unwrap_or(f64::NAN);
    let mut zeros = Vec::new();
    let mut i = 0;
    while i < n {
        let root = if vals[i] == 0.0 {
            Some(xs[i])
        } else if i + 1 < n && vals[i + 1] != 0.0 && vals[i].signum() != vals[i + 1].signum() {
            Some(bisect(eval, xs[i], xs[i + 1], 1e-13)?)
        } else {
            None
        };
        if let Some(mut x) = root {
            let (r, d) = f.eval_pair(x)?;
            if d != 0.0 {
                let x_new = x - r / d;
                let lo = xs[i.saturating_sub(1)];
                let hi = xs[(i + 1).min(n - 1)];
                if x_new >= lo && x_new <= hi && f.value(x_new)?.abs() <= r.abs() {
                    x = x_new;
                }
            }
            let (r, d) = f.eval_pair(x)?;
            zeros.push(MelnikovZero { phi: x, r_prime: d, residual: r.abs() });
        }
        i += 1;
    }
    zeros.dedup_by(|a, b| (a.phi - b.phi).abs() < 1e-9);
    Ok(ZeroScan { zeros, degenerate: false })
}

/// `R'(0; μ)` for the exponential hill `H_exp(·; μ)`.
pub fn solhill_deriv_at_zero(mu: f64) -> Result<f64> {
    MelnikovFn::quadrature(Forcing::topography(Topography::exp_hill(mu)), Orientation::Up).deriv(0.0)
}

/// The exponential-hill rate at which the stationary front at the hill top changes stability,
/// located by bisection of `μ ↦ R'(0; μ)` on `(0.5, 0.9)`.
pub fn pitchfork_mu() -> Result<f64> {
    bisect(|mu| solhill_deriv_at_zero(mu).unwrap_or(f64::NAN), 0.5, 0.9, 1e-10)
}

/// One-front eigenvalue factor `λ̃ = -R'(φ)/‖u'_up‖²`.
pub fn lambda_tilde(r_prime: f64) -> f64 {
    -r_prime / NORM_SQ
}

/// Writes `(phi, R, Rprime)` rows for the given samples.
pub fn write_melnikov_csv<W: Write>(out: W, f: &MelnikovFn, phis: &[f64]) -> Result<()> {
    use rayon::prelude::*;
    let rows: Vec<(f64, f64, f64)> = phis
        .par_iter()
        .map(|&p| f.eval_pair(p).map(|(r, d)| (p, r, d)))
        .collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["phi", "R", "Rprime"])?;
    for (p, r, d) in rows {
        // Adding 0.0 turns -0.0 into 0.0.
        w.write_record([(p + 0.0).to_string(), (r + 0.0).to_string(), (d + 0.0).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Integral `∫ W_h`, equal to `‖u'_up‖²`.
pub fn weight_mass() -> Result<f64> {
    Ok(integrate(weight_wh, -40.0, 40.0, QuadOptions::default())?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k0() -> f64 {
        4.0 * PI / 15.0
    }

    #[test]
    fn triple_closed_constant_example() {
        let (a, b) = periodic_closed_constants(1.0, 0.0, 0.0, k0()).unwrap();
        let expect = -k0() * k0() * PI / (k0() * PI / SQRT_2).sinh();
        assert!((16.0 * a - expect).abs() < 1e-14);
        assert_eq!(b, 0.0);
        assert_eq!(periodic_closed_constants(0.0, 0.0, 0.0, 2.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn triple_quadrature_matches_closed_form() {
        let q = MelnikovFn::quadrature(Forcing::triple(1.0, 0.0, 0.0, k0()), Orientation::Up);
        let c = MelnikovFn::periodic_closed(1.0, 0.0, 0.0, k0(), Orientation::Up).unwrap();
        let phi = 15.0 / 8.0;
        assert!((q.value(phi).unwrap() - c.value(phi).unwrap()).abs() < 1e-10);
        assert!((c.deriv(0.0).unwrap() - (-0.5889)).abs() < 1e-3);
        assert!((q.deriv(0.3).unwrap() - c.deriv(0.3).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn solhill_closed_matches_quadrature() {
        let q = MelnikovFn::quadrature(Forcing::topography(Topography::exp_hill(1.0)), Orientation::Up);
        for &psi in &[-7.0, -2.5, -0.9, -0.01, 0.2, 0.999, 1.001, 3.0, 9.5] {
            let rq = q.value(psi / SQRT_2).unwrap();
            let rc = solhill_closed(psi);
            assert!((rq - rc).abs() <= 1e-9 * rc.abs().max(1e-6), "psi = {psi}: {rq} vs {rc}");
            let dq = q.deriv(psi / SQRT_2).unwrap() / SQRT_2;
            let dc = solhill_closed_deriv(psi);
            assert!((dq - dc).abs() <= 1e-8 * dc.abs().max(1e-6), "psi = {psi}: {dq} vs {dc}");
        }
        assert!((solhill_closed(3.0) - (-0.1277788956105197)).abs() < 1e-14);
    }

    #[test]
    fn log_scaled_values_agree_in_range() {
        let f = MelnikovFn::quadrature(Forcing::topography(Topography::exp_hill(0.8)), Orientation::Up);
        for &phi in &[-6.0, -1.0, 0.7, 3.0, 12.0] {
            let v = f.value(phi).unwrap();
            let l = f.value_log(phi).unwrap().to_f64();
            assert!((v - l).abs() < 1e-9 * v.abs().max(1e-8), "{phi}: {v} vs {l}");
            let d = f.deriv(phi).unwrap();
            let dl = f.deriv_log(phi).unwrap().to_f64();
            assert!((d - dl).abs() < 1e-9 * d.abs().max(1e-8), "{phi}: {d} vs {dl}");
        }
        let far = f.value_log(700.0).unwrap();
        assert!(far.sign < 0.0 && far.ln < -700.0);
    }

    #[test]
    fn cache_interpolates_accurately() {
        let f = MelnikovFn::quadrature(Forcing::topography(Topography::alg_hill(2.0)), Orientation::Up);
        let c = f.clone().cached();
        for &phi in &[0.12345, -3.3333, 5.0005] {
            assert!((f.value(phi).unwrap() - c.value(phi).unwrap()).abs() < 1e-12);
            assert!((f.deriv(phi).unwrap() - c.deriv(phi).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_scan_hill_examples() {
        let f = MelnikovFn::auto(Forcing::topography(Topography::exp_hill(1.0)), Orientation::Up);
        let s = melnikov_zero_scan(&f, -6.0, 6.0, 241).unwrap();
        assert_eq!(s.zeros.len(), 3);
        let mid = s.zeros[1];
        assert!(mid.phi.abs() < 1e-9 && mid.r_prime > 0.0);
        let f = MelnikovFn::quadrature(Forcing::topography(Topography::exp_hill(0.5)), Orientation::Up);
        let s = melnikov_zero_scan(&f, -6.0, 6.0, 121).unwrap();
        assert_eq!(s.zeros.len(), 1);
        assert!(s.zeros[0].r_prime < 0.0);
        let z = MelnikovFn::quadrature(Forcing::Zero, Orientation::Up);
        assert!(melnikov_zero_scan(&z, -1.0, 1.0, 5).unwrap().degenerate);
    }

    #[test]
    fn tail_constant_examples() {
        let t = tail_constants_exponential(&Topography::exp_hill(0.5), 0.5).unwrap();
        let TailModel::Exponential { h_plus, h_minus, w_plus, w_minus, .. } = t else { panic!() };
        assert!((h_plus + 4.0 * SQRT_2 * 0.5).abs() < 1e-14 && (h_minus - 4.0 * SQRT_2 * 0.5).abs() < 1e-14);
        assert!((w_plus.unwrap() - w_minus.unwrap()).abs() < 1e-10);
        let w: Vec<f64> = [0.8, 0.9, 0.95].iter().map(|&m| tail_weight(m, true).unwrap()).collect();
        assert!(w[0] < w[1] && w[1] < w[2]);
        assert!(matches!(tail_weight(1.0, true), Err(Error::DivergentIntegral(_))));
        let a = tail_constants_algebraic(&Topography::alg_hill(2.0), 2.0);
        assert!((a.limit_constant(true) + 2f64.powf(2.5) / 3.0).abs() < 1e-14);
        let a1 = tail_constants_algebraic(&Topography::alg_hill(1.0), 1.0);
        assert_eq!(a1.limit_constant(true), 0.0);
    }
}
