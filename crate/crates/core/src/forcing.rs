//! Heterogeneities `F(U, V, x)` (with `V = U_x`), the topography library `H(x)` and the
//! perturbed background states `u±^ε(x)`.

use crate::core::{sech2, Field, Grid1D};
use crate::error::{Error, Result};
use crate::numerics::linalg::BandMatrix;
use crate::numerics::quad::{integrate_with_breaks, QuadOptions};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::path::Path;

/// Small parameter multiplying the heterogeneity, `0 < ε < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps < 1.0 {
            Ok(Self(eps))
        } else {
            Err(Error::invalid(format!("epsilon must lie in (0, 1), got {eps}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `|log ε|`.
    pub fn abs_log(self) -> f64 {
        self.0.ln().abs()
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Epsilon::new(v)
    }
}

impl From<Epsilon> for f64 {
    fn from(e: Epsilon) -> f64 {
        e.0
    }
}

/// Topography sampled on a grid: `H'` samples with `H''` either supplied or obtained by centered
/// differences. Interpolation is cubic Hermite; outside the table `H'` is held at its end value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedTopography {
    pub x: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    /// Third derivative samples (centered differences of `h2`), used for `F_x`.
    pub h3: Vec<f64>,
}

fn centered_differences(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (y[1] - y[0]) / (x[1] - x[0])
            } else if i == n - 1 {
                (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2])
            } else {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                // Second-order derivative on a possibly nonuniform stencil.
                (y[i + 1] * h0 * h0 - y[i - 1] * h1 * h1 + y[i] * (h1 * h1 - h0 * h0)) / (h0 * h1 * (h0 + h1))
            }
        })
        .collect()
}

impl TabulatedTopography {
    /// Builds a table from `H'` samples, optionally with `H''` samples.
    pub fn new(x: Vec<f64>, h1: Vec<f64>, h2: Option<Vec<f64>>) -> Result<Self> {
        if x.len() < 4 || x.len() != h1.len() {
            return Err(Error::invalid("tabulated topography needs at least 4 (x, H') samples"));
        }
        crate::core::check_increasing(&x)?;
        if x.iter().chain(h1.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("tabulated topography contains non-finite values"));
        }
        let fd = centered_differences(&x, &h1);
        let h2 = match h2 {
            Some(h2) => {
                if h2.len() != x.len() {
                    return Err(Error::invalid("H'' column length differs from x"));
                }
                let scale = h2.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                for i in 1..x.len() - 1 {
                    if (h2[i] - fd[i]).abs() > 1e-4 * scale {
                        return Err(Error::invalid(format!(
                            "H'' sample at x = {} inconsistent with the derivative of H' ({} vs {})",
                            x[i], h2[i], fd[i]
                        )));
                    }
                }
                h2
            }
            None => fd,
        };
        let h3 = centered_differences(&x, &h2);
        Ok(Self { x, h1, h2, h3 })
    }

    /// Reads a CSV file with header and columns `x, H'` (and optionally `H''`).
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut x = Vec::new();
        let mut h1 = Vec::new();
        let mut h2 = Vec::new();
        let mut has_h2 = true;
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::invalid("missing CSV column"))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::invalid(format!("bad number in topography table: {e}")))
            };
            x.push(parse(0)?);
            h1.push(parse(1)?);
            if rec.len() > 2 {
                h2.push(parse(2)?);
            } else {
                has_h2 = false;
            }
        }
        Self::new(x, h1, if has_h2 && !h2.is_empty() { Some(h2) } else { None })
    }

    /// True when `x` lies outside the tabulated range (values are extrapolated there).
    pub fn is_extrapolated(&self, x: f64) -> bool {
        x < self.x[0] || x > self.x[self.x.len() - 1]
    }

    fn locate(&self, x: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    fn hermite(&self, x: f64, y: &[f64], dy: &[f64]) -> (f64, f64) {
        let i = self.locate(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        let d = d00 * y[i] + d10 * dy[i] + d01 * y[i + 1] + d11 * dy[i + 1];
        (v, d)
    }

    pub fn h1(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.h1[0];
        }
        if x >= self.x[n - 1] {
            return self.h1[n - 1];
        }
        self.hermite(x, &self.h1, &self.h2).0
    }

    pub fn h2(&self, x: f64) -> f64 {
        if self.is_extrapolated(x) {
            return 0.0;
        }
        self.hermite(x, &self.h2, &self.h3).0
    }

    pub fn h3(&self, x: f64) -> f64 {
        if self.is_extrapolated(x) {
            return 0.0;
        }
        self.hermite(x, &self.h2, &self.h3).1
    }
}

/// Terrain profile `H(x)` entering the topographic forcing `F = H'(x)V + H''(x)U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Topography {
    /// `sign · sech²(√2μx/2)`.
    ExpHill { mu: f64, sign: f64 },
    /// `sign · (1+x²)^{-(p-1)/2}`.
    AlgHill { p: f64, sign: f64 },
    /// `amplitude · sin(kx)`.
    Sinusoid { amplitude: f64, k: f64 },
    /// `loc + delta · per`.
    Mixed { loc: Box<Topography>, per: Box<Topography>, delta: f64 },
    Tabulated(TabulatedTopography),
}

impl Topography {
    pub fn exp_hill(mu: f64) -> Self {
        Topography::ExpHill { mu, sign: 1.0 }
    }

    pub fn alg_hill(p: f64) -> Self {
        Topography::AlgHill { p, sign: 1.0 }
    }

    pub fn sinusoid(amplitude: f64, k: f64) -> Self {
        Topography::Sinusoid { amplitude, k }
    }

    /// The same profile multiplied by -1 (hill ↔ valley).
    pub fn negated(&self) -> Self {
        match self {
            Topography::ExpHill { mu, sign } => Topography::ExpHill { mu: *mu, sign: -sign },
            Topography::AlgHill { p, sign } => Topography::AlgHill { p: *p, sign: -sign },
            Topography::Sinusoid { amplitude, k } => Topography::Sinusoid { amplitude: -amplitude, k: *k },
            Topography::Mixed { loc, per, delta } => Topography::Mixed {
                loc: Box::new(loc.negated()),
                per: Box::new(per.negated()),
                delta: *delta,
            },
            Topography::Tabulated(t) => Topography::Tabulated(TabulatedTopography {
                x: t.x.clone(),
                h1: t.h1.iter().map(|v| -v).collect(),
                h2: t.h2.iter().map(|v| -v).collect(),
                h3: t.h3.iter().map(|v| -v).collect(),
            }),
        }
    }

    /// Validates parameter invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            Topography::ExpHill { mu, sign } => {
                if !(*mu > 0.0) || sign.abs() != 1.0 {
                    return Err(Error::invalid("ExpHill requires mu > 0 and sign = ±1"));
                }
            }
            Topography::AlgHill { p, sign } => {
                if !p.is_finite() || sign.abs() != 1.0 {
                    return Err(Error::invalid("AlgHill requires finite p and sign = ±1"));
                }
                if *p < -1.0 {
                    log::warn!("AlgHill with p = {p} < -1: H'' is unbounded, the reduced theory does not apply");
                } else if *p <= 0.0 {
                    log::warn!("AlgHill with p = {p} <= 0: H' is unbounded");
                }
            }
            Topography::Sinusoid { k, .. } => {
                if *k == 0.0 || !k.is_finite() {
                    return Err(Error::invalid("Sinusoid requires k != 0"));
                }
            }
            Topography::Mixed { loc, per, .. } => {
                loc.validate()?;
                per.validate()?;
            }
            Topography::Tabulated(_) => {}
        }
        Ok(())
    }

    /// `H(x)` where it has a closed form (`None` for tabulated profiles).
    pub fn h(&self, x: f64) -> Option<f64> {
        match self {
            Topography::ExpHill { mu, sign } => Some(sign * sech2(SQRT_2 * mu * x / 2.0)),
            Topography::AlgHill { p, sign } => Some(sign * (1.0 + x * x).powf(-(p - 1.0) / 2.0)),
            Topography::Sinusoid { amplitude, k } => Some(amplitude * (k * x).sin()),
            Topography::Mixed { loc, per, delta } => Some(loc.h(x)? + delta * per.h(x)?),
            Topography::Tabulated(_) => None,
        }
    }

    /// `H'(x)`.
    pub fn d1(&self, x: f64) -> f64 {
        match self {
            Topography::ExpHill { mu, sign } => {
                let b = SQRT_2 * mu / 2.0;
                let a = b * x;
                sign * (-2.0 * b * sech2(a) * a.tanh())
            }
            Topography::AlgHill { p, sign } => {
                let q = (p - 1.0) / 2.0;
                sign * (-2.0 * q * x * (1.0 + x * x).powf(-q - 1.0))
            }
            Topography::Sinusoid { amplitude, k } => amplitude * k * (k * x).cos(),
            Topography::Mixed { loc, per, delta } => loc.d1(x) + delta * per.d1(x),
            Topography::Tabulated(t) => t.h1(x),
        }
    }

    /// `H''(x)`.
    pub fn d2(&self, x: f64) -> f64 {
        match self {
            Topography::ExpHill { mu, sign } => {
                let b = SQRT_2 * mu / 2.0;
                let a = b * x;
                let s = sech2(a);
                let t = a.tanh();
                sign * b * b * (4.0 * s * t * t - 2.0 * s * s)
            }
            Topography::AlgHill { p, sign } => {
                let q = (p - 1.0) / 2.0;
                let r = 1.0 + x * x;
                sign * (-2.0 * q * r.powf(-q - 2.0) * (1.0 - (2.0 * q + 1.0) * x * x))
            }
            Topography::Sinusoid { amplitude, k } => -amplitude * k * k * (k * x).sin(),
            Topography::Mixed { loc, per, delta } => loc.d2(x) + delta * per.d2(x),
            Topography::Tabulated(t) => t.h2(x),
        }
    }

    /// `H'''(x)`.
    pub fn d3(&self, x: f64) -> f64 {
        match self {
            Topography::ExpHill { mu, sign } => {
                let b = SQRT_2 * mu / 2.0;
                let a = b * x;
                let s = sech2(a);
                let t = a.tanh();
                sign * b * b * b * (-8.0 * s * t * t * t + 16.0 * s * s * t)
            }
            Topography::AlgHill { p, sign } => {
                let q = (p - 1.0) / 2.0;
                let r = 1.0 + x * x;
                sign * (-4.0 * q * (q + 1.0) * r.powf(-q - 3.0) * x * ((2.0 * q + 1.0) * x * x - 3.0))
            }
            Topography::Sinusoid { amplitude, k } => -amplitude * k * k * k * (k * x).cos(),
            Topography::Mixed { loc, per, delta } => loc.d3(x) + delta * per.d3(x),
            Topography::Tabulated(t) => t.h3(x),
        }
    }

    /// `ln|H'(x)|` computed without underflow for the exponential hill.
    pub fn ln_abs_d1(&self, x: f64) -> f64 {
        match self {
            Topography::ExpHill { mu, .. } => {
                let b = SQRT_2 * mu / 2.0;
                let a = b * x;
                if a == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let e = (-2.0 * a.abs()).exp();
                let ln_sech2 = 4f64.ln() - 2.0 * a.abs() - 2.0 * e.ln_1p();
                (2.0 * b).ln() + ln_sech2 + a.tanh().abs().ln()
            }
            _ => self.d1(x).abs().ln(),
        }
    }

    /// `ln|H''(x)|` and the sign of `H''(x)`, computed without underflow for the exponential hill.
    pub fn ln_abs_d2(&self, x: f64) -> (f64, f64) {
        match self {
            Topography::ExpHill { mu, sign } => {
                let b = SQRT_2 * mu / 2.0;
                let a = b * x;
                let e = (-2.0 * a.abs()).exp();
                let ln_sech2 = 4f64.ln() - 2.0 * a.abs() - 2.0 * e.ln_1p();
                let s = sech2(a);
                let t = a.tanh();
                // H'' = sign b² sech²(a) (4 tanh² - 2 sech²)
                let bracket = 4.0 * t * t - 2.0 * s;
                if bracket == 0.0 {
                    return (f64::NEG_INFINITY, 0.0);
                }
                (2.0 * b.ln() + ln_sech2 + bracket.abs().ln(), sign * bracket.signum())
            }
            _ => {
                let v = self.d2(x);
                (v.abs().ln(), v.signum())
            }
        }
    }

    /// Spatial period when the profile is periodic.
    pub fn period(&self) -> Option<f64> {
        match self {
            Topography::Sinusoid { k, .. } => Some(2.0 * std::f64::consts::PI / k.abs()),
            _ => None,
        }
    }

    /// True for the even, localized hills (exponential and algebraic).
    pub fn is_even(&self) -> bool {
        matches!(self, Topography::ExpHill { .. } | Topography::AlgHill { .. })
    }

    /// Locations where the profile has features worth splitting quadrature panels at.
    pub fn feature_points(&self) -> Vec<f64> {
        match self {
            Topography::ExpHill { .. } | Topography::AlgHill { .. } => vec![0.0],
            Topography::Mixed { loc, .. } => loc.feature_points(),
            _ => Vec::new(),
        }
    }
}

impl std::str::FromStr for Topography {
    type Err = Error;

    /// Parses `exp:MU[:SIGN]`, `alg:P[:SIGN]`, `sin:AMP:K`, `table:PATH`, and
    /// `mixed:<loc>|<per>|DELTA`; a leading `-` negates the profile.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('-') {
            return Ok(rest.parse::<Topography>()?.negated());
        }
        let (kind, args) = s.split_once(':').ok_or_else(|| Error::invalid(format!("bad topography spec `{s}`")))?;
        let num = |v: &str| -> Result<f64> {
            v.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number `{v}` in topography `{s}`")))
        };
        let topo = match kind {
            "exp" => {
                let parts: Vec<&str> = args.split(':').collect();
                let sign = if parts.len() > 1 { num(parts[1])?.signum() } else { 1.0 };
                Topography::ExpHill { mu: num(parts[0])?, sign }
            }
            "alg" => {
                let parts: Vec<&str> = args.split(':').collect();
                let sign = if parts.len() > 1 { num(parts[1])?.signum() } else { 1.0 };
                Topography::AlgHill { p: num(parts[0])?, sign }
            }
            "sin" => {
                let parts: Vec<&str> = args.split(':').collect();
                if parts.len() != 2 {
                    return Err(Error::invalid(format!("sinusoid spec needs sin:AMP:K, got `{s}`")));
                }
                Topography::Sinusoid { amplitude: num(parts[0])?, k: num(parts[1])? }
            }
            "table" => Topography::Tabulated(TabulatedTopography::from_csv(Path::new(args))?),
            "mixed" => {
                let parts: Vec<&str> = args.split('|').collect();
                if parts.len() != 3 {
                    return Err(Error::invalid("mixed spec needs mixed:<loc>|<per>|DELTA"));
                }
                Topography::Mixed {
                    loc: Box::new(parts[0].parse()?),
                    per: Box::new(parts[1].parse()?),
                    delta: num(parts[2])?,
                }
            }
            _ => return Err(Error::invalid(format!("unknown topography kind `{kind}`"))),
        };
        topo.validate()?;
        Ok(topo)
    }
}

/// Scalar coefficient profile `f(x)` of the canonical forcing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    Const { c: f64 },
    Cos { amp: f64, k: f64 },
    Sin { amp: f64, k: f64 },
    Sum { terms: Vec<Profile> },
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Const { c: 0.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Const { c } => *c,
            Profile::Cos { amp, k } => amp * (k * x).cos(),
            Profile::Sin { amp, k } => amp * (k * x).sin(),
            Profile::Sum { terms } => terms.iter().map(|t| t.value(x)).sum(),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Profile::Const { .. } => 0.0,
            Profile::Cos { amp, k } => -amp * k * (k * x).sin(),
            Profile::Sin { amp, k } => amp * k * (k * x).cos(),
            Profile::Sum { terms } => terms.iter().map(|t| t.deriv(x)).sum(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Profile::Const { c } => *c == 0.0,
            Profile::Cos { amp, .. } | Profile::Sin { amp, .. } => *amp == 0.0,
            Profile::Sum { terms } => terms.iter().all(|t| t.is_zero()),
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    /// Parses `const:C`, `cos:AMP:K`, `sin:AMP:K`, joined by `+` for sums.
    fn from_str(s: &str) -> Result<Self> {
        let terms: Vec<&str> = s.split('+').collect();
        if terms.len() > 1 {
            return Ok(Profile::Sum { terms: terms.iter().map(|t| t.parse()).collect::<Result<_>>()? });
        }
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |v: &str| -> Result<f64> {
            v.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number `{v}` in profile `{s}`")))
        };
        match (parts[0], parts.len()) {
            ("const", 2) => Ok(Profile::Const { c: num(parts[1])? }),
            ("cos", 3) => Ok(Profile::Cos { amp: num(parts[1])?, k: num(parts[2])? }),
            ("sin", 3) => Ok(Profile::Sin { amp: num(parts[1])?, k: num(parts[2])? }),
            _ => Err(Error::invalid(format!("bad profile spec `{s}`"))),
        }
    }
}

/// Heterogeneity `F(U, V, x)`; the factor ε is applied by the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Forcing {
    Zero,
    /// `f1(x)U + f2(x)V + f3(x)`.
    Canonical { f1: Profile, f2: Profile, f3: Profile },
    /// `α1 cos(kx)U + α2 sin(kx)V + α3 sin(kx)`.
    CosSinTriple { alpha1: f64, alpha2: f64, alpha3: f64, k: f64 },
    /// `H'(x)V + H''(x)U`.
    TopographyDriven { topo: Topography },
}

impl Forcing {
    pub fn topography(topo: Topography) -> Self {
        Forcing::TopographyDriven { topo }
    }

    pub fn triple(alpha1: f64, alpha2: f64, alpha3: f64, k: f64) -> Self {
        Forcing::CosSinTriple { alpha1, alpha2, alpha3, k }
    }

    /// True when `F` vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Forcing::Zero => true,
            Forcing::Canonical { f1, f2, f3 } => f1.is_zero() && f2.is_zero() && f3.is_zero(),
            Forcing::CosSinTriple { alpha1, alpha2, alpha3, .. } => {
                *alpha1 == 0.0 && *alpha2 == 0.0 && *alpha3 == 0.0
            }
            Forcing::TopographyDriven { .. } => false,
        }
    }

    /// The topography when the forcing is topographic.
    pub fn as_topography(&self) -> Option<&Topography> {
        match self {
            Forcing::TopographyDriven { topo } => Some(topo),
            _ => None,
        }
    }

    /// True when `F(-U, -V, x) = -F(U, V, x)`, which makes the up and down Melnikov functions equal.
    pub fn is_odd_in_state(&self) -> bool {
        match self {
            Forcing::Zero | Forcing::TopographyDriven { .. } => true,
            Forcing::Canonical { f3, .. } => f3.is_zero(),
            Forcing::CosSinTriple { alpha3, .. } => *alpha3 == 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Forcing::TopographyDriven { topo } => topo.validate(),
            Forcing::CosSinTriple { k, .. } if *k == 0.0 => Err(Error::invalid("CosSinTriple requires k != 0")),
            _ => Ok(()),
        }
    }

    /// Period in `x`, when the forcing is periodic.
    pub fn period(&self) -> Option<f64> {
        match self {
            Forcing::CosSinTriple { k, .. } => Some(2.0 * std::f64::consts::PI / k.abs()),
            Forcing::TopographyDriven { topo } => topo.period(),
            _ => None,
        }
    }

    /// Points at which quadrature panels should be split.
    pub fn feature_points(&self) -> Vec<f64> {
        match self {
            Forcing::TopographyDriven { topo } => topo.feature_points(),
            _ => Vec::new(),
        }
    }
}

impl std::str::FromStr for Forcing {
    type Err = Error;

    /// Parses `zero`, `topo:<topography>`, `triple:A1,A2,A3,K` and
    /// `canonical:<f1>;<f2>;<f3>` (profiles as in [`Profile`]).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(Forcing::Zero);
        }
        let (kind, args) = s.split_once(':').ok_or_else(|| Error::invalid(format!("bad forcing spec `{s}`")))?;
        let f = match kind {
            "topo" => Forcing::TopographyDriven { topo: args.parse()? },
            "triple" => {
                let v: Vec<f64> = args
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number `{t}`"))))
                    .collect::<Result<_>>()?;
                if v.len() != 4 {
                    return Err(Error::invalid("triple spec needs four numbers A1,A2,A3,K"));
                }
                Forcing::CosSinTriple { alpha1: v[0], alpha2: v[1], alpha3: v[2], k: v[3] }
            }
            "canonical" => {
                let parts: Vec<&str> = args.split(';').collect();
                if parts.len() != 3 {
                    return Err(Error::invalid("canonical spec needs canonical:<f1>;<f2>;<f3>"));
                }
                Forcing::Canonical { f1: parts[0].parse()?, f2: parts[1].parse()?, f3: parts[2].parse()? }
            }
            _ => return Err(Error::invalid(format!("unknown forcing kind `{kind}`"))),
        };
        f.validate()?;
        Ok(f)
    }
}

/// `F(u, v, x)` without the factor ε.
pub fn eval_forcing(f: &Forcing, u: f64, v: f64, x: f64) -> f64 {
    match f {
        Forcing::Zero => 0.0,
        Forcing::Canonical { f1, f2, f3 } => f1.value(x) * u + f2.value(x) * v + f3.value(x),
        Forcing::CosSinTriple { alpha1, alpha2, alpha3, k } => {
            let (s, c) = (k * x).sin_cos();
            alpha1 * c * u + alpha2 * s * v + alpha3 * s
        }
        Forcing::TopographyDriven { topo } => topo.d1(x) * v + topo.d2(x) * u,
    }
}

/// Partial derivatives `(F_u, F_v, F_x)` at `(u, v, x)`.
pub fn forcing_partials(f: &Forcing, u: f64, v: f64, x: f64) -> (f64, f64, f64) {
    match f {
        Forcing::Zero => (0.0, 0.0, 0.0),
        Forcing::Canonical { f1, f2, f3 } => {
            (f1.value(x), f2.value(x), f1.deriv(x) * u + f2.deriv(x) * v + f3.deriv(x))
        }
        Forcing::CosSinTriple { alpha1, alpha2, alpha3, k } => {
            let (s, c) = (k * x).sin_cos();
            (alpha1 * c, alpha2 * s, -alpha1 * k * s * u + alpha2 * k * c * v + alpha3 * k * c)
        }
        Forcing::TopographyDriven { topo } => {
            (topo.d2(x), topo.d1(x), topo.d2(x) * v + topo.d3(x) * u)
        }
    }
}

/// Options for [`background_state`].
#[derive(Debug, Clone, Copy)]
pub struct BackgroundOptions {
    /// Kernel value below which the convolution is truncated.
    pub kernel_cutoff: f64,
    /// Largest admissible `|F(±1, 0, x)|` on the quadrature window.
    pub bound: f64,
    pub quad: QuadOptions,
}

impl Default for BackgroundOptions {
    fn default() -> Self {
        Self { kernel_cutoff: 1e-14, bound: 1e6, quad: QuadOptions::new(1e-13, 1e-10) }
    }
}

/// First-order background state
/// `±1 + (ε/2√2)[∫_x^∞ g(z)e^{√2(x-z)}dz + ∫_{-∞}^x g(z)e^{-√2(x-z)}dz]`, `g(z) = F(±1, 0, z)`.
pub fn background_state(sign: f64, f: &Forcing, eps: Epsilon, grid: &Grid1D) -> Result<Field> {
    background_state_with(sign, f, eps, grid, BackgroundOptions::default())
}

/// [`background_state`] with explicit options.
pub fn background_state_with(
    sign: f64,
    f: &Forcing,
    eps: Epsilon,
    grid: &Grid1D,
    opts: BackgroundOptions,
) -> Result<Field> {
    let s = if sign >= 0.0 { 1.0 } else { -1.0 };
    if let Some(Topography::AlgHill { p, .. }) = f.as_topography() {
        if *p < -1.0 {
            log::warn!("background state requested for AlgHill p = {p} < -1 (unbounded H'')");
        }
    }
    if f.is_zero() {
        return Ok(Field::constant(*grid, s));
    }
    let width = -opts.kernel_cutoff.ln() / SQRT_2;
    let g = |z: f64| eval_forcing(f, s, 0.0, z);
    // Boundedness check on the quadrature window.
    let lo = grid.x_min() - width;
    let hi = grid.x_max() + width;
    let samples = (((hi - lo) / 0.01).ceil() as usize).clamp(100, 2_000_000);
    for i in 0..=samples {
        let z = lo + (hi - lo) * i as f64 / samples as f64;
        let v = g(z);
        if !v.is_finite() || v.abs() > opts.bound {
            return Err(Error::UnboundedForcing { x: z, value: v, bound: opts.bound });
        }
    }
    let pref = eps.value() / (2.0 * SQRT_2);
    let mut values = Vec::with_capacity(grid.n());
    for i in 0..grid.n() {
        let x = grid.x(i);
        let right = integrate_with_breaks(|z| g(z) * (SQRT_2 * (x - z)).exp(), &[x, x + width / 2.0, x + width], opts.quad)?;
        let left = integrate_with_breaks(|z| g(z) * (-SQRT_2 * (x - z)).exp(), &[x - width, x - width / 2.0, x], opts.quad)?;
        values.push(s + pref * (right.value + left.value));
    }
    Field::new(*grid, values)
}

/// Bounded stationary solution near `±1` of the full nonlinear problem
/// `u'' + u - u³ + εF(u, u', x) = 0` on the grid, obtained by Newton iteration started from the
/// first-order state, with the first-order values imposed at both ends.
pub fn background_state_nonlinear(sign: f64, f: &Forcing, eps: Epsilon, grid: &Grid1D) -> Result<Field> {
    let first = background_state(sign, f, eps, grid)?;
    let n = grid.n();
    let h = grid.dx();
    let e = eps.value();
    let mut u = first.values().to_vec();
    let (ul, ur) = (u[0], u[n - 1]);
    for it in 0..50 {
        let mut res = vec![0.0; n];
        let mut jac = BandMatrix::zeros(n, 1, 1);
        res[0] = u[0] - ul;
        jac.set(0, 0, 1.0);
        res[n - 1] = u[n - 1] - ur;
        jac.set(n - 1, n - 1, 1.0);
        for i in 1..n - 1 {
            let x = grid.x(i);
            let v = (u[i + 1] - u[i - 1]) / (2.0 * h);
            let (fu, fv, _) = forcing_partials(f, u[i], v, x);
            res[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h) + u[i] - u[i].powi(3)
                + e * eval_forcing(f, u[i], v, x);
            jac.set(i, i - 1, 1.0 / (h * h) - e * fv / (2.0 * h));
            jac.set(i, i, -2.0 / (h * h) + 1.0 - 3.0 * u[i] * u[i] + e * fu);
            jac.set(i, i + 1, 1.0 / (h * h) + e * fv / (2.0 * h));
        }
        let norm = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if norm < 1e-12 {
            return Field::new(*grid, u);
        }
        let lu = jac.lu()?;
        lu.solve(&mut res);
        let step = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        for i in 0..n {
            u[i] -= res[i];
        }
        if step < 1e-14 && it > 2 {
            return Field::new(*grid, u);
        }
    }
    Err(Error::NotConverged("background state Newton iteration".into()))
}
