//! Stationary front configurations of the N-front system: isolated single fronts, matched
//! front pairs, localized patterns on a single hill or valley, and periodic lattice patterns.
//!
//! Positions are always in the original `φ` variable. Every multi-front configuration is
//! refined by a Newton iteration whose residual rows are assembled from [`LogNum`] terms, so
//! that patterns whose outer fronts sit hundreds of units away from the topography (where the
//! forces are far below the `f64` range) are still resolved. Stability is classified from the
//! inertia of the symmetric Jacobian after a diagonal congruence scaling.

use crate::core::{check_increasing, Orientation, INV_NORM_SQ};
use crate::error::{Error, Result};
use crate::forcing::{Epsilon, Forcing, Topography};
use crate::frontdyn::FrontModel;
use crate::melnikov::{melnikov_zero_scan, MelnikovFn};
use crate::numerics::linalg::{symmetric_tridiagonal_inertia, BandMatrix};
use crate::numerics::lognum::LogNum;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

const LN_16: f64 = 2.772_588_722_239_781;

/// How a stationary configuration was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StationaryKind {
    /// A single front at a simple zero of its Melnikov function.
    OneFront { phi_star: f64 },
    /// Two fronts held apart by the balance of forcing and attraction.
    TwoFrontCondition,
    /// Localized pattern on an isolated hill or valley. `kind` is 1 when the fronts split over
    /// both tails, 2 when the leftmost front sits at a zero, 3 when the rightmost does and 4
    /// for an interior front at a zero. `pattern` has one symbol per front: `L` or `R` for a
    /// tail front and the zero index otherwise.
    Localized { kind: u8, pattern: String },
    /// Periodic lattice pattern; `indices[j]` is the zero used by front `j`.
    PeriodicGrid { indices: Vec<usize> },
}

/// A stationary configuration with its linear stability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryFront {
    pub positions: Vec<f64>,
    pub first: Orientation,
    pub kind: StationaryKind,
    /// Jacobian eigenvalues in the units of `t`, ascending. Entries may underflow to zero for
    /// fronts far out in a tail; `unstable_count` is exact regardless.
    pub eigenvalues: Vec<Complex64>,
    /// Number of positive Jacobian eigenvalues.
    pub unstable_count: usize,
    /// Largest Newton residual, each row divided by the magnitude of its terms.
    pub newton_residual: f64,
    /// Starting point of the Newton refinement.
    pub seed: Vec<f64>,
}

impl StationaryFront {
    pub fn is_stable(&self) -> bool {
        self.unstable_count == 0 && self.eigenvalues.iter().all(|l| l.re < 0.0)
    }
}

/// Stationary single fronts: the simple zeros of `R` inside `[phi_min, phi_max]`, with the
/// linearization `dφ/dt = -ε R'(φ*)/‖u_h'‖² (φ - φ*)`.
pub fn one_front_find(r: &MelnikovFn, phi_min: f64, phi_max: f64, eps: Epsilon) -> Result<Vec<StationaryFront>> {
    let n = (((phi_max - phi_min) / 0.02).ceil() as usize).clamp(64, 20_000);
    let scan = melnikov_zero_scan(r, phi_min, phi_max, n)?;
    Ok(scan
        .zeros
        .iter()
        .map(|z| {
            let lambda = -eps.value() * z.r_prime * INV_NORM_SQ;
            StationaryFront {
                positions: vec![z.phi],
                first: r.orientation,
                kind: StationaryKind::OneFront { phi_star: z.phi },
                eigenvalues: vec![Complex64::new(lambda, 0.0)],
                unstable_count: usize::from(lambda > 0.0),
                newton_residual: z.residual,
                seed: vec![z.phi],
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------------------------
// Newton refinement with log-scaled rows

/// Options of [`refine_stationary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    pub max_iter: usize,
    /// Converged once `max|δφ| < step_tol (1 + max|φ|)`.
    pub step_tol: f64,
    /// Largest accepted scaled residual.
    pub residual_tol: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { max_iter: 100, step_tol: 1e-12, residual_tol: 1e-9 }
    }
}

/// Outcome of [`refine_stationary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refined {
    pub positions: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub unstable_count: usize,
    pub zero_count: usize,
    /// Jacobian eigenvalues in `t` units, ascending.
    pub eigenvalues: Vec<f64>,
}

fn interaction_log(gap: f64) -> LogNum {
    LogNum::new(1.0, LN_16 - SQRT_2 * gap)
}

struct Rows {
    /// Residual `-ε R_j + 16 e^{-√2Δ_j} - 16 e^{-√2Δ_{j-1}}` (the factor `1/‖u_h'‖²` dropped).
    r: Vec<LogNum>,
    diag: Vec<LogNum>,
    /// `off[j]` couples `j` and `j + 1`.
    off: Vec<LogNum>,
    /// Log magnitude of the largest residual term of each row.
    res_scale: Vec<f64>,
    /// Log magnitude of the largest Jacobian term of each row.
    jac_scale: Vec<f64>,
}

fn assemble(positions: &[f64], first: Orientation, eps: f64, model: &FrontModel, with_jacobian: bool) -> Result<Rows> {
    let n = positions.len();
    let ln_eps = eps.ln();
    let gaps: Vec<LogNum> = positions.windows(2).map(|w| interaction_log(w[1] - w[0])).collect();
    let mut rows = Rows {
        r: Vec::with_capacity(n),
        diag: Vec::with_capacity(n),
        off: Vec::with_capacity(n.saturating_sub(1)),
        res_scale: Vec::with_capacity(n),
        jac_scale: Vec::with_capacity(n),
    };
    for j in 0..n {
        let f = model.for_orientation(first.alternate(j));
        let force = -f.value_log(positions[j])?.mul_exp(ln_eps);
        let right = if j + 1 < n { gaps[j] } else { LogNum::ZERO };
        let left = if j > 0 { -gaps[j - 1] } else { LogNum::ZERO };
        let terms = [force, right, left];
        rows.r.push(LogNum::sum(&terms));
        rows.res_scale.push(terms.iter().map(|t| t.ln).fold(f64::NEG_INFINITY, f64::max));
        if with_jacobian {
            let stiff = -f.deriv_log(positions[j])?.mul_exp(ln_eps);
            let coupling = [right.mul_exp(0.5 * 2f64.ln()), (-left).mul_exp(0.5 * 2f64.ln())];
            let d = LogNum::sum(&[stiff, coupling[0], coupling[1]]);
            rows.diag.push(d);
            rows.jac_scale.push([stiff.ln, coupling[0].ln, coupling[1].ln].into_iter().fold(f64::NEG_INFINITY, f64::max));
            if j + 1 < n {
                rows.off.push(-coupling[0]);
            }
        }
    }
    Ok(rows)
}

fn row_scales(rows: &Rows) -> Vec<f64> {
    rows.res_scale
        .iter()
        .zip(&rows.jac_scale)
        .map(|(&a, &b)| {
            let m = a.max(b);
            if m.is_finite() {
                m
            } else {
                0.0
            }
        })
        .collect()
}

fn merit(r: &[LogNum], scales: &[f64]) -> f64 {
    r.iter().zip(scales).map(|(v, &s)| v.scaled(s).powi(2)).sum()
}

fn strictly_increasing(p: &[f64]) -> bool {
    p.windows(2).all(|w| w[1] > w[0])
}

/// Inertia and eigenvalues of the Jacobian assembled in `rows` (which must carry Jacobian
/// terms).
fn stability_from_rows(rows: &Rows) -> (usize, usize, Vec<f64>) {
    let n = rows.diag.len();
    let scales: Vec<f64> = rows.jac_scale.iter().map(|&s| if s.is_finite() { s } else { 0.0 }).collect();
    let d: Vec<f64> = (0..n).map(|j| rows.diag[j].scaled(scales[j])).collect();
    let e: Vec<f64> = (0..n.saturating_sub(1)).map(|j| rows.off[j].scaled(0.5 * (scales[j] + scales[j + 1]))).collect();
    let (_, zero, pos) = symmetric_tridiagonal_inertia(&d, &e);
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = INV_NORM_SQ * rows.diag[j].to_f64();
        if j + 1 < n {
            let o = INV_NORM_SQ * rows.off[j].to_f64();
            m[(j, j + 1)] = o;
            m[(j + 1, j)] = o;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    (pos, zero, ev)
}

/// Refines a stationary configuration of the N-front system by a damped Newton iteration on
/// the log-scaled residual rows.
pub fn refine_stationary(
    seed: &[f64],
    first: Orientation,
    eps: Epsilon,
    model: &FrontModel,
    opts: RefineOptions,
) -> Result<Refined> {
    check_increasing(seed)?;
    let n = seed.len();
    if n == 0 {
        return Err(Error::invalid("at least one front is required"));
    }
    let e = eps.value();
    let mut phi = seed.to_vec();
    let mut iterations = 0;
    loop {
        let rows = assemble(&phi, first, e, model, true)?;
        let scales = row_scales(&rows);
        let m0 = merit(&rows.r, &scales);
        if !m0.is_finite() {
            return Err(Error::NewtonDiverged { iterations, residual: m0 });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NewtonDiverged { iterations, residual: m0.sqrt() });
        }
        let mut band = BandMatrix::zeros(n, 1, 1);
        for j in 0..n {
            band.set(j, j, rows.diag[j].scaled(scales[j]));
            if j + 1 < n {
                band.set(j, j + 1, rows.off[j].scaled(scales[j]));
                band.set(j + 1, j, rows.off[j].scaled(scales[j + 1]));
            }
        }
        let mut delta: Vec<f64> = rows.r.iter().zip(&scales).map(|(r, &s)| -r.scaled(s)).collect();
        band.lu()?.solve(&mut delta);
        let size = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let step = delta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m0 == 0.0 || step < opts.step_tol * (1.0 + size) {
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = phi.iter().zip(&delta).map(|(p, d)| p + alpha * d).collect();
            if strictly_increasing(&trial) {
                let tr = assemble(&trial, first, e, model, false)?;
                let m1 = merit(&tr.r, &scales);
                if m1.is_finite() && m1 <= (1.0 - 1e-4 * alpha) * m0 {
                    phi = trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        iterations += 1;
        if !accepted {
            if m0.sqrt() <= opts.residual_tol {
                break;
            }
            return Err(Error::NewtonDiverged { iterations, residual: m0.sqrt() });
        }
    }
    let rows = assemble(&phi, first, e, model, true)?;
    let scales = row_scales(&rows);
    let residual = rows.r.iter().zip(&scales).map(|(r, &s)| r.scaled(s).abs()).fold(0.0, f64::max);
    if !(residual <= opts.residual_tol) {
        return Err(Error::NewtonDiverged { iterations, residual });
    }
    let (unstable_count, zero_count, eigenvalues) = stability_from_rows(&rows);
    Ok(Refined { positions: phi, residual, iterations, unstable_count, zero_count, eigenvalues })
}

fn to_front(r: Refined, first: Orientation, kind: StationaryKind, seed: Vec<f64>) -> StationaryFront {
    StationaryFront {
        positions: r.positions,
        first,
        kind,
        eigenvalues: r.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)).collect(),
        unstable_count: r.unstable_count,
        newton_residual: r.residual,
        seed,
    }
}

// ---------------------------------------------------------------------------------------------
// Two fronts

/// Closed-form linear stability of a stationary front pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoFrontStability {
    /// Eigenvalues in units of `ε t`, ascending.
    pub lambda_bar: [f64; 2],
    /// Eigenvalues in units of `t`.
    pub lambda: [f64; 2],
    /// Relative amplitude of the second front in each eigenvector, the first normalized to 1.
    pub gamma_plus: [f64; 2],
    /// `(R_u' - R_d')² + 2048 E²` with `E = e^{-√2Δ}/ε`.
    pub discriminant: f64,
}

/// Eigenvalues and eigenvector ratios of the linearization at a stationary pair.
pub fn two_front_eigenvalues(
    positions: [f64; 2],
    first: Orientation,
    eps: Epsilon,
    model: &FrontModel,
) -> Result<TwoFrontStability> {
    check_increasing(&positions)?;
    let e = eps.value();
    let el = (-SQRT_2 * (positions[1] - positions[0])).exp() / e;
    let ru = model.for_orientation(first).deriv(positions[0])?;
    let rd = model.for_orientation(first.flip()).deriv(positions[1])?;
    let disc = (ru - rd).powi(2) + 2048.0 * el * el;
    let c = 16.0 * SQRT_2 * el;
    let x = [c - 0.5 * (ru + rd) - 0.5 * disc.sqrt(), c - 0.5 * (ru + rd) + 0.5 * disc.sqrt()];
    let gamma = |xi: f64| 1.0 - (xi + ru) / c;
    Ok(TwoFrontStability {
        lambda_bar: [INV_NORM_SQ * x[0], INV_NORM_SQ * x[1]],
        lambda: [e * INV_NORM_SQ * x[0], e * INV_NORM_SQ * x[1]],
        gamma_plus: [gamma(x[0]), gamma(x[1])],
        discriminant: disc,
    })
}

/// Solves the two-front matching condition `R_u(φ_1) = 16E = -R_d(φ_2)` from `seed`.
pub fn two_front_solve(seed: [f64; 2], first: Orientation, eps: Epsilon, model: &FrontModel) -> Result<(StationaryFront, TwoFrontStability)> {
    let refined = refine_stationary(&seed, first, eps, model, RefineOptions { max_iter: 50, ..Default::default() })
        .map_err(|err| match err {
            Error::NewtonDiverged { residual, .. } => Error::ConditionNotSatisfied { residual },
            other => other,
        })?;
    let p = [refined.positions[0], refined.positions[1]];
    let stab = two_front_eigenvalues(p, first, eps, model)?;
    Ok((to_front(refined, first, StationaryKind::TwoFrontCondition, seed.to_vec()), stab))
}

// ---------------------------------------------------------------------------------------------
// Localized patterns

/// Largest exponential decay rate for which the N-front tail chain stays consistent.
pub fn mu_star(n: usize) -> f64 {
    if n < 2 {
        1.0
    } else {
        1.0 - 2f64.powf(-1.0 / (n as f64 - 1.0))
    }
}

/// Depth of the `n`-th front of a tail chain anchored at a zero, in units of `|ln ε|`:
/// `ν_1 = 0`, `ν_{j+1} = (1 + ν_j)/(1 - μ)`.
pub fn nu_n(mu: f64, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else if mu == 0.0 {
        (n - 1) as f64
    } else {
        ((1.0 - mu).powi(-(n as i32 - 1)) - 1.0) / mu
    }
}

/// Placement of the fronts of a localized pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalizedConfig {
    /// `left` fronts in the left tail and the rest in the right tail.
    Split { left: usize },
    /// Front `index` at zero `zero` of `R`, all others in the tails.
    AtZero { zero: usize, index: usize },
}

impl LocalizedConfig {
    /// All configurations for `n` fronts and `k` zeros, `(k + 1) n - 1` in total.
    pub fn all(n: usize, k: usize) -> Vec<LocalizedConfig> {
        let mut out: Vec<LocalizedConfig> = (1..n).map(|left| LocalizedConfig::Split { left }).collect();
        for zero in 0..k {
            for index in 0..n {
                out.push(LocalizedConfig::AtZero { zero, index });
            }
        }
        out
    }

    pub fn kind(&self, n: usize) -> u8 {
        match *self {
            LocalizedConfig::Split { .. } => 1,
            LocalizedConfig::AtZero { index: 0, .. } => 2,
            LocalizedConfig::AtZero { index, .. } if index + 1 == n => 3,
            LocalizedConfig::AtZero { .. } => 4,
        }
    }

    pub fn pattern(&self, n: usize) -> String {
        (0..n)
            .map(|j| match *self {
                LocalizedConfig::Split { left } => {
                    if j < left {
                        "L".to_string()
                    } else {
                        "R".to_string()
                    }
                }
                LocalizedConfig::AtZero { zero, index } => {
                    if j < index {
                        "L".to_string()
                    } else if j > index {
                        "R".to_string()
                    } else {
                        zero.to_string()
                    }
                }
            })
            .collect()
    }
}

/// Decay class of an isolated topography.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailDecay {
    Exponential { mu: f64 },
    Algebraic { p: f64 },
}

impl TailDecay {
    pub fn of(topo: &Topography) -> Option<Self> {
        match topo {
            Topography::ExpHill { mu, .. } => Some(TailDecay::Exponential { mu: *mu }),
            Topography::AlgHill { p, .. } => Some(TailDecay::Algebraic { p: *p }),
            _ => None,
        }
    }

    fn rate(&self) -> f64 {
        match *self {
            TailDecay::Exponential { mu } => mu,
            TailDecay::Algebraic { .. } => 0.0,
        }
    }
}

/// Leading-order placement of a localized pattern: `√2 φ_j ≈ ν_j |ln ε|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizedSeedPlan {
    pub decay: TailDecay,
    /// Signed depth of every front in units of `|ln ε|`.
    pub nu: Vec<f64>,
    /// Offsets `φ_j - ν_j |ln ε|/√2` of the refined pattern, when available.
    pub ell: Vec<f64>,
    /// `1/(|ln ε| + p ln|ln ε|)` for algebraic tails.
    pub theta2: Option<f64>,
    /// [`mu_star`] of the pattern size for exponential tails.
    pub mu_star_n: Option<f64>,
    pub warnings: Vec<String>,
}

/// Leading-order depths of the fronts of `config`.
pub fn localized_seed(config: LocalizedConfig, n: usize, decay: TailDecay, eps: Epsilon) -> LocalizedSeedPlan {
    let mu = decay.rate();
    let chain = |start: f64, len: usize| {
        let mut v = Vec::with_capacity(len);
        let mut cur = start;
        for _ in 0..len {
            cur = (1.0 + cur) / (1.0 - mu);
            v.push(cur);
        }
        v
    };
    let mut nu = vec![0.0; n];
    let (inner_left, inner_right, start) = match config {
        LocalizedConfig::Split { left } => {
            let inner = 1.0 / (2.0 - mu);
            nu[left - 1] = -inner;
            nu[left] = inner;
            (left - 1, left, inner)
        }
        LocalizedConfig::AtZero { index, .. } => (index, index, 0.0),
    };
    for (k, v) in chain(start, n - 1 - inner_right).into_iter().enumerate() {
        nu[inner_right + 1 + k] = v;
    }
    for (k, v) in chain(start, inner_left).into_iter().enumerate() {
        nu[inner_left - 1 - k] = -v;
    }
    let mut warnings = Vec::new();
    let (theta2, mu_star_n) = match decay {
        TailDecay::Exponential { mu } => {
            let ms = mu_star(n);
            if n >= 2 && mu >= ms {
                warnings.push(format!(
                    "decay rate mu = {mu} is not below mu*({n}) = {ms:.6}; leading-order depths are only indicative"
                ));
            }
            (None, Some(ms))
        }
        TailDecay::Algebraic { p } => {
            let l = eps.abs_log();
            (Some(1.0 / (l + p * l.ln())), None)
        }
    };
    LocalizedSeedPlan { decay, nu, ell: Vec::new(), theta2, mu_star_n, warnings }
}

/// Tail geometry of one Melnikov function: outermost zeros and the peaks of `|R|` beyond them.
struct TailInfo {
    zeros: Vec<f64>,
    left_peak: Option<f64>,
    right_peak: Option<f64>,
}

const TAIL_REACH: f64 = 40.0;

fn ln_abs_r(f: &MelnikovFn, phi: f64, want_sign: f64) -> Result<f64> {
    let v = f.value_log(phi)?;
    Ok(if v.sign == want_sign { v.ln } else { f64::NEG_INFINITY })
}

fn tail_info(f: &MelnikovFn, zeros: Vec<f64>) -> Result<TailInfo> {
    let peak = |from: f64, dir: f64, want: f64| -> Result<Option<f64>> {
        if f.value_log(from + dir * TAIL_REACH)?.sign != want {
            return Ok(None);
        }
        let mut best = (f64::NEG_INFINITY, from);
        for i in 1..=400 {
            let x = from + dir * TAIL_REACH * i as f64 / 400.0;
            let l = ln_abs_r(f, x, want)?;
            if l > best.0 {
                best = (l, x);
            }
        }
        Ok(Some(best.1))
    };
    let (left_peak, right_peak) = match (zeros.first(), zeros.last()) {
        (Some(&lo), Some(&hi)) => (peak(lo, -1.0, 1.0)?, peak(hi, 1.0, -1.0)?),
        _ => (None, None),
    };
    Ok(TailInfo { zeros, left_peak, right_peak })
}

/// Position on the monotone far branch of a tail where `ln|R| = level`.
fn tail_inverse(f: &MelnikovFn, peak: f64, dir: f64, want: f64, level: f64) -> Result<f64> {
    let g = |x: f64| ln_abs_r(f, x, want).map(|l| l - level);
    if g(peak)? < 0.0 {
        return Err(Error::NotConverged(format!("tail level {level} above the peak of |R|")));
    }
    let mut lo = peak;
    let mut step = 1.0;
    let mut hi = peak + dir * step;
    while g(hi)? > 0.0 {
        lo = hi;
        step *= 2.0;
        hi = peak + dir * step;
        if step > 1e5 {
            return Err(Error::NotConverged("tail inverse did not bracket".into()));
        }
    }
    bisect_fallible(&g, lo, hi)
}

fn bisect_fallible<G: Fn(f64) -> Result<f64>>(g: &G, mut a: f64, mut b: f64) -> Result<f64> {
    let ga = g(a)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= 1e-13 * (1.0 + m.abs()) {
            return Ok(m);
        }
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Next front of a tail chain: solves `16 e^{-√2|φ - base|} = ε|R(φ)|` on the far side of
/// `base`, beyond the outermost zero `edge` of `R`.
fn chain_front(f: &MelnikovFn, base: f64, edge: f64, dir: f64, ln_eps: f64) -> Result<f64> {
    let want = -dir;
    let start = if dir > 0.0 { base.max(edge) } else { base.min(edge) };
    let g = |x: f64| ln_abs_r(f, x, want).map(|l| LN_16 - SQRT_2 * (x - base).abs() - ln_eps - l);
    let mut lo = start + dir * 1e-9;
    let mut step = 0.25;
    loop {
        let hi = lo + dir * step;
        if g(hi)? < 0.0 {
            return bisect_fallible(&g, lo, hi);
        }
        lo = hi;
        step *= 1.25;
        if (lo - start).abs() > 1e5 {
            return Err(Error::NotConverged("tail front balance did not bracket".into()));
        }
    }
}

/// Innermost split pair: `ε R_a(φ_a) = 16 e^{-√2(φ_b - φ_a)} = -ε R_b(φ_b)` with `φ_a` in
/// the left tail and `φ_b` in the right tail.
fn split_pair(fa: &MelnikovFn, ta: &TailInfo, fb: &MelnikovFn, tb: &TailInfo, ln_eps: f64) -> Result<(f64, f64)> {
    let (pa, pb) = match (ta.left_peak, tb.right_peak) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::SignConditionFailed("tails of R do not have the signs required by a split pattern".into())),
    };
    let top = ln_abs_r(fa, pa, 1.0)?.min(ln_abs_r(fb, pb, -1.0)?);
    let positions = |level: f64| -> Result<(f64, f64)> {
        Ok((tail_inverse(fa, pa, -1.0, 1.0, level)?, tail_inverse(fb, pb, 1.0, -1.0, level)?))
    };
    let g = |level: f64| -> Result<f64> {
        let (a, b) = positions(level)?;
        Ok(LN_16 - SQRT_2 * (b - a) - ln_eps - level)
    };
    let hi = top - 1e-9;
    if g(hi)? < 0.0 {
        return Err(Error::NotConverged("split pair: forcing too strong for a tail balance".into()));
    }
    let mut step = 1.0;
    let mut lo = hi - step;
    while g(lo)? > 0.0 {
        step *= 2.0;
        lo = hi - step;
        if step > 1e5 {
            return Err(Error::NotConverged("split pair balance did not bracket".into()));
        }
    }
    let level = bisect_fallible(&g, lo, hi)?;
    positions(level)
}

/// Tail-balance seed of a localized configuration.
fn localized_positions(
    config: LocalizedConfig,
    n: usize,
    first: Orientation,
    model: &FrontModel,
    tails: &[TailInfo; 2],
    ln_eps: f64,
) -> Result<Vec<f64>> {
    let f_of = |j: usize| model.for_orientation(first.alternate(j));
    let t_of = |j: usize| &tails[usize::from(first.alternate(j) != first)];
    let mut phi = vec![0.0; n];
    let (il, ir) = match config {
        LocalizedConfig::Split { left } => {
            let (a, b) = split_pair(f_of(left - 1), t_of(left - 1), f_of(left), t_of(left), ln_eps)?;
            phi[left - 1] = a;
            phi[left] = b;
            (left - 1, left)
        }
        LocalizedConfig::AtZero { zero, index } => {
            phi[index] = *t_of(index)
                .zeros
                .get(zero)
                .ok_or_else(|| Error::invalid(format!("zero index {zero} out of range")))?;
            (index, index)
        }
    };
    for j in ir + 1..n {
        let t = t_of(j);
        if t.right_peak.is_none() {
            return Err(Error::SignConditionFailed("R is not negative in the right tail".into()));
        }
        phi[j] = chain_front(f_of(j), phi[j - 1], *t.zeros.last().expect("zeros exist"), 1.0, ln_eps)?;
    }
    for j in (0..il).rev() {
        let t = t_of(j);
        if t.left_peak.is_none() {
            return Err(Error::SignConditionFailed("R is not positive in the left tail".into()));
        }
        phi[j] = chain_front(f_of(j), phi[j + 1], t.zeros[0], -1.0, ln_eps)?;
    }
    Ok(phi)
}

/// All localized stationary patterns of `n` fronts on an isolated topography.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizedEnumeration {
    pub n: usize,
    pub zeros: Vec<f64>,
    pub fronts: Vec<StationaryFront>,
    pub plans: Vec<LocalizedSeedPlan>,
    /// Configurations that produced no pattern, with the reason.
    pub failures: Vec<(String, String)>,
    /// `(K + 1) N - 1` with `K` the number of zeros of `R`.
    pub expected_count: usize,
    /// True when every pattern with `n >= 2` has an unstable direction.
    pub all_unstable: bool,
    pub warnings: Vec<String>,
}

/// Enumerates the localized stationary patterns of `n` fronts (first front `Up`) on the
/// isolated topography `topo`.
pub fn enumerate_stationary_localized(topo: &Topography, eps: Epsilon, n: usize) -> Result<LocalizedEnumeration> {
    if n == 0 {
        return Err(Error::invalid("at least one front is required"));
    }
    topo.validate()?;
    let decay = TailDecay::of(topo)
        .ok_or_else(|| Error::invalid("localized patterns need an isolated exponential or algebraic topography"))?;
    let forcing = Forcing::topography(topo.clone());
    let model = FrontModel::new(&forcing);
    let first = Orientation::Up;
    let ln_eps = eps.value().ln();
    let scan_up = melnikov_zero_scan(&model.up, -15.0, 15.0, 1201)?;
    let scan_down = melnikov_zero_scan(&model.down, -15.0, 15.0, 1201)?;
    let zeros: Vec<f64> = scan_up.zeros.iter().map(|z| z.phi).collect();
    let tails = [
        tail_info(&model.up, zeros.clone())?,
        tail_info(&model.down, scan_down.zeros.iter().map(|z| z.phi).collect())?,
    ];
    let k = zeros.len();
    let configs = LocalizedConfig::all(n, k);
    let results: Vec<(LocalizedConfig, Result<(StationaryFront, LocalizedSeedPlan)>)> = configs
        .par_iter()
        .map(|&cfg| {
            let out = (|| {
                let seed = localized_positions(cfg, n, first, &model, &tails, ln_eps)?;
                let refined = refine_stationary(&seed, first, eps, &model, RefineOptions::default())?;
                let mut plan = localized_seed(cfg, n, decay, eps);
                plan.ell = refined
                    .positions
                    .iter()
                    .zip(&plan.nu)
                    .map(|(p, nu)| p - nu * eps.abs_log() / SQRT_2)
                    .collect();
                let kind = StationaryKind::Localized { kind: cfg.kind(n), pattern: cfg.pattern(n) };
                Ok((to_front(refined, first, kind, seed), plan))
            })();
            (cfg, out)
        })
        .collect();
    let mut fronts: Vec<StationaryFront> = Vec::new();
    let mut plans = Vec::new();
    let mut failures = Vec::new();
    let dedup_tol = 1e-6 * eps.abs_log();
    for (cfg, res) in results {
        match res {
            Ok((front, plan)) => {
                let dup = fronts.iter().any(|f| {
                    f.positions.iter().zip(&front.positions).all(|(a, b)| (a - b).abs() < dedup_tol)
                });
                if dup {
                    failures.push((cfg.pattern(n), "duplicate of another pattern".to_string()));
                } else {
                    fronts.push(front);
                    plans.push(plan);
                }
            }
            Err(err) => failures.push((cfg.pattern(n), err.to_string())),
        }
    }
    let all_unstable = n < 2 || fronts.iter().all(|f| f.unstable_count > 0);
    let mut warnings: Vec<String> = plans.iter().flat_map(|p: &LocalizedSeedPlan| p.warnings.clone()).collect();
    warnings.sort();
    warnings.dedup();
    Ok(LocalizedEnumeration {
        n,
        zeros,
        fronts,
        plans,
        failures,
        expected_count: (k + 1) * n - 1,
        all_unstable,
        warnings,
    })
}

// ---------------------------------------------------------------------------------------------
// Periodic lattice patterns

/// A periodic lattice pattern with the eigenvalues predicted from the isolated zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicStationary {
    pub front: StationaryFront,
    /// `-ε R'(φ*_{i_j}) / ‖u_h'‖²` for every front, ascending.
    pub predicted: Vec<f64>,
    /// True when every front sits at a zero with `R' > 0`.
    pub predicted_stable: bool,
}

/// Result of [`enumerate_stationary_periodic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicEnumeration {
    pub period: f64,
    pub zeros_up: Vec<f64>,
    pub zeros_down: Vec<f64>,
    /// Smallest `√2 Δφ / |ln ε|` over all seeds.
    pub rho_min: f64,
    pub patterns: Vec<PeriodicStationary>,
}

fn zeros_in_period(f: &MelnikovFn, period: f64) -> Result<Vec<f64>> {
    let scan = melnikov_zero_scan(f, 0.0, period, 801)?;
    if scan.degenerate {
        return Err(Error::invalid("Melnikov function vanishes identically"));
    }
    let mut z: Vec<f64> = scan.zeros.iter().map(|z| z.phi.rem_euclid(period)).collect();
    z.sort_by(|a, b| a.total_cmp(b));
    z.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * period || (period - (*a - *b).abs()) < 1e-9 * period);
    Ok(z)
}

/// All lattice patterns whose front `j` lies in period cell `cells[j]` at one of the zeros of
/// its Melnikov function.
pub fn enumerate_stationary_periodic(
    forcing: &Forcing,
    eps: Epsilon,
    first: Orientation,
    cells: &[i64],
) -> Result<PeriodicEnumeration> {
    forcing.validate()?;
    let period = forcing.period().ok_or_else(|| Error::invalid("forcing is not periodic in x"))?;
    if cells.is_empty() || cells.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("period cells must be strictly increasing"));
    }
    let model = FrontModel::new(forcing);
    let zeros_up = zeros_in_period(&model.up, period)?;
    let zeros_down = zeros_in_period(&model.down, period)?;
    let zeros_of = |j: usize| if first.alternate(j) == Orientation::Up { &zeros_up } else { &zeros_down };
    let n = cells.len();
    let sizes: Vec<usize> = (0..n).map(|j| zeros_of(j).len()).collect();
    if sizes.contains(&0) {
        return Err(Error::invalid("Melnikov function has no zeros"));
    }
    let total: usize = sizes.iter().product();
    let mut seeds = Vec::with_capacity(total);
    let mut rho_min = f64::INFINITY;
    for code in 0..total {
        let mut c = code;
        let mut idx = Vec::with_capacity(n);
        for &s in &sizes {
            idx.push(c % s);
            c /= s;
        }
        let phi: Vec<f64> = (0..n).map(|j| zeros_of(j)[idx[j]] + cells[j] as f64 * period).collect();
        if !strictly_increasing(&phi) {
            continue;
        }
        for w in phi.windows(2) {
            rho_min = rho_min.min(SQRT_2 * (w[1] - w[0]) / eps.abs_log());
        }
        seeds.push((idx, phi));
    }
    if n >= 2 && rho_min < 1.0 {
        return Err(Error::SeparationTooSmall { rho: rho_min });
    }
    let e = eps.value();
    let patterns: Vec<PeriodicStationary> = seeds
        .par_iter()
        .map(|(idx, phi)| -> Result<PeriodicStationary> {
            let refined = refine_stationary(phi, first, eps, &model, RefineOptions::default())?;
            let mut predicted = Vec::with_capacity(n);
            for j in 0..n {
                let rp = model.for_orientation(first.alternate(j)).deriv(zeros_of(j)[idx[j]])?;
                predicted.push(-e * rp * INV_NORM_SQ);
            }
            let predicted_stable = predicted.iter().all(|&l| l < 0.0);
            predicted.sort_by(|a, b| a.total_cmp(b));
            let kind = StationaryKind::PeriodicGrid { indices: idx.clone() };
            Ok(PeriodicStationary { front: to_front(refined, first, kind, phi.clone()), predicted, predicted_stable })
        })
        .collect::<Result<_>>()?;
    Ok(PeriodicEnumeration { period, zeros_up, zeros_down, rho_min, patterns })
}

// ---------------------------------------------------------------------------------------------
// Two fronts on a periodic forcing: reduced (d, s) dynamics

/// Parameters of the reduced two-front system on a forcing `-ε (A ± B) sin kφ`:
/// `d' = -A sin θ cos(ks/2) + B cos θ sin(ks/2) - e^{-√2 d}` and
/// `s' = -A cos θ sin(ks/2) + B sin θ cos(ks/2)` with `θ = R + kd/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsParams {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    /// Phase offset `R` in `[0, 2π)`.
    pub r: f64,
}

impl DsParams {
    /// Splits `k|ln ε|/(2√2) = 2Nπ + R` and returns the parameters with the winding `N`.
    pub fn new(a: f64, b: f64, k: f64, eps: Epsilon) -> Result<(Self, u64)> {
        if !(k > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("reduced system needs k > 0 and finite A, B"));
        }
        let total = k * eps.abs_log() / (2.0 * SQRT_2);
        let winding = (total / (2.0 * PI)).floor();
        Ok((Self { a, b, k, r: total - 2.0 * PI * winding }, winding as u64))
    }

    pub fn theta(&self, d: f64) -> f64 {
        self.r + 0.5 * self.k * d
    }

    pub fn d_of_theta(&self, theta: f64) -> f64 {
        2.0 * (theta - self.r) / self.k
    }

    pub fn rhs(&self, d: f64, s: f64) -> [f64; 2] {
        let (st, ct) = self.theta(d).sin_cos();
        let (ss, cs) = (0.5 * self.k * s).sin_cos();
        [
            -self.a * st * cs + self.b * ct * ss - (-SQRT_2 * d).exp(),
            -self.a * ct * ss + self.b * st * cs,
        ]
    }

    pub fn jacobian(&self, d: f64, s: f64) -> [[f64; 2]; 2] {
        let (st, ct) = self.theta(d).sin_cos();
        let (ss, cs) = (0.5 * self.k * s).sin_cos();
        let h = 0.5 * self.k;
        [
            [
                h * (-self.a * ct * cs - self.b * st * ss) + SQRT_2 * (-SQRT_2 * d).exp(),
                h * (self.a * st * ss + self.b * ct * cs),
            ],
            [h * (self.a * st * ss + self.b * ct * cs), h * (-self.a * ct * cs - self.b * st * ss)],
        ]
    }

    /// Period of the dynamics in `s`.
    pub fn s_period(&self) -> f64 {
        4.0 * PI / self.k
    }
}

/// Type of a fixed point of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointClass {
    StableNode,
    UnstableNode,
    Saddle,
    StableFocus,
    UnstableFocus,
    Degenerate,
}

/// Fixed point of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub d: f64,
    pub s: f64,
    pub eigenvalues: [Complex64; 2],
    pub class: FixedPointClass,
}

fn eig2(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = Complex64::new(0.25 * tr * tr - det, 0.0).sqrt();
    let mut ev = [Complex64::new(0.5 * tr, 0.0) - disc, Complex64::new(0.5 * tr, 0.0) + disc];
    if ev[0].re > ev[1].re {
        ev.swap(0, 1);
    }
    ev
}

fn classify(ev: [Complex64; 2]) -> FixedPointClass {
    let tol = 1e-12;
    if ev[0].im.abs() > tol {
        if ev[0].re < -tol {
            FixedPointClass::StableFocus
        } else if ev[0].re > tol {
            FixedPointClass::UnstableFocus
        } else {
            FixedPointClass::Degenerate
        }
    } else if ev[0].re.abs() <= tol || ev[1].re.abs() <= tol {
        FixedPointClass::Degenerate
    } else if ev[0].re < 0.0 && ev[1].re < 0.0 {
        FixedPointClass::StableNode
    } else if ev[0].re > 0.0 && ev[1].re > 0.0 {
        FixedPointClass::UnstableNode
    } else {
        FixedPointClass::Saddle
    }
}

/// Fixed points of the reduced system with `d` in `[d_lo, d_hi]`, `s` in one period.
pub fn ds_fixed_points(p: &DsParams, d_lo: f64, d_hi: f64) -> Vec<FixedPoint> {
    let reach = p.a.abs() + p.b.abs();
    if reach == 0.0 {
        return Vec::new();
    }
    let d_min = d_lo.max(-reach.ln() / SQRT_2 - 1e-9);
    if d_min > d_hi {
        return Vec::new();
    }
    let sp = p.s_period();
    let nd = (((d_hi - d_min) * p.k / (0.1 * PI)).ceil() as usize).max(8);
    let ns = 48;
    let mut found: Vec<FixedPoint> = Vec::new();
    for i in 0..=nd {
        for js in 0..ns {
            let mut d = d_min + (d_hi - d_min) * i as f64 / nd as f64;
            let mut s = sp * js as f64 / ns as f64;
            let mut ok = false;
            for _ in 0..60 {
                let f = p.rhs(d, s);
                let j = p.jacobian(d, s);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if det == 0.0 || !det.is_finite() {
                    break;
                }
                let dd = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
                let ds = (-j[1][0] * f[0] + j[0][0] * f[1]) / det;
                let lim = 0.5;
                let scale = (lim / dd.abs().max(ds.abs())).min(1.0);
                d -= scale * dd;
                s -= scale * ds;
                if dd.abs().max(ds.abs()) < 1e-13 {
                    ok = true;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let f = p.rhs(d, s);
            if f[0].abs().max(f[1].abs()) > 1e-11 || d < d_lo - 1e-9 || d > d_hi + 1e-9 {
                continue;
            }
            let s = s.rem_euclid(sp);
            let s = if sp - s < 1e-9 { 0.0 } else { s };
            let dup = found.iter().any(|q| {
                let dsd = (q.s - s).abs();
                (q.d - d).abs() < 1e-7 && dsd.min(sp - dsd) < 1e-7
            });
            if !dup {
                let ev = eig2(p.jacobian(d, s));
                found.push(FixedPoint { d, s, eigenvalues: ev, class: classify(ev) });
            }
        }
    }
    found.sort_by(|a, b| a.d.total_cmp(&b.d).then(a.s.total_cmp(&b.s)));
    found
}

/// Type of a local bifurcation of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BifurcationKind {
    SaddleNode,
    Pitchfork,
}

/// Local bifurcation of the reduced system as `A` increases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsBifurcation {
    pub kind: BifurcationKind,
    pub a: f64,
    pub d: f64,
    pub s: f64,
    /// `+1` for the lobe on `s = 0`, `-1` for the lobe on `s = 2π/k`.
    pub sigma: i8,
    pub lobe: i64,
}

/// Saddle-node and pitchfork values of `A` for `B = 0`, for the lobes whose tangency point
/// lies in `[d_lo, d_hi]`.
pub fn ds_bifurcations_symmetric(k: f64, r: f64, d_lo: f64, d_hi: f64) -> Vec<DsBifurcation> {
    let p = DsParams { a: 1.0, b: 0.0, k, r };
    let tangent = (k / (2.0 * SQRT_2)).atan();
    let mut out = Vec::new();
    let m_lo = ((p.theta(d_lo)) / (2.0 * PI)).floor() as i64 - 1;
    let m_hi = ((p.theta(d_hi)) / (2.0 * PI)).ceil() as i64 + 1;
    for m in m_lo..=m_hi {
        for sigma in [1i8, -1i8] {
            let base = 2.0 * m as f64 * PI;
            let (theta_sn, theta_pf, s) = if sigma > 0 {
                (base - tangent, base - 0.5 * PI, 0.0)
            } else {
                (base + PI - tangent, base + 0.5 * PI, 2.0 * PI / k)
            };
            let d_sn = p.d_of_theta(theta_sn);
            if d_sn < d_lo || d_sn > d_hi {
                continue;
            }
            let a_sn = (-SQRT_2 * d_sn).exp() / theta_sn.sin().abs();
            let d_pf = p.d_of_theta(theta_pf);
            let a_pf = (-SQRT_2 * d_pf).exp();
            out.push(DsBifurcation { kind: BifurcationKind::SaddleNode, a: a_sn, d: d_sn, s, sigma, lobe: m });
            out.push(DsBifurcation { kind: BifurcationKind::Pitchfork, a: a_pf, d: d_pf, s, sigma, lobe: m });
        }
    }
    out.sort_by(|a, b| a.d.total_cmp(&b.d).then(a.a.total_cmp(&b.a)));
    out
}

/// Window of the lobe `(sigma, lobe)`: the `θ` interval on which `σ sin θ < 0` and the centre
/// of its `s` band (half-width `π/k`).
pub fn lobe_window(sigma: i8, lobe: i64, k: f64) -> ((f64, f64), f64) {
    let base = 2.0 * lobe as f64 * PI;
    if sigma > 0 {
        ((base - PI, base), 0.0)
    } else {
        ((base, base + PI), 2.0 * PI / k)
    }
}

/// Fixed points of `p` inside the lobe `(sigma, lobe)`.
pub fn ds_lobe_points(p: &DsParams, sigma: i8, lobe: i64) -> Vec<FixedPoint> {
    let ((t0, t1), sc) = lobe_window(sigma, lobe, p.k);
    let sp = p.s_period();
    ds_fixed_points(p, p.d_of_theta(t0), p.d_of_theta(t1))
        .into_iter()
        .filter(|q| {
            let t = p.theta(q.d);
            let ds = (q.s - sc).rem_euclid(sp);
            t > t0 && t < t1 && ds.min(sp - ds) < PI / p.k
        })
        .collect()
}

/// Values of `A` in `a_range` at which the number of fixed points in the lobe
/// `(sigma, lobe)` changes, located by bisection, with the counts before and after.
pub fn ds_count_transitions(
    b: f64,
    k: f64,
    r: f64,
    sigma: i8,
    lobe: i64,
    a_range: (f64, f64),
    steps: usize,
) -> Vec<(f64, usize, usize)> {
    let base = DsParams { a: 1.0, b, k, r };
    let count = |a: f64| ds_lobe_points(&DsParams { a, ..base }, sigma, lobe).len();
    let (lo, hi) = (a_range.0.ln(), a_range.1.ln());
    let mut out = Vec::new();
    let mut prev_a = a_range.0;
    let mut prev_c = count(prev_a);
    for i in 1..=steps {
        let a = (lo + (hi - lo) * i as f64 / steps as f64).exp();
        let c = count(a);
        if c != prev_c {
            let (mut x0, mut x1) = (prev_a, a);
            for _ in 0..40 {
                let m = 0.5 * (x0 + x1);
                if count(m) == prev_c {
                    x0 = m;
                } else {
                    x1 = m;
                }
            }
            out.push((0.5 * (x0 + x1), prev_c, c));
        }
        prev_a = a;
        prev_c = c;
    }
    out
}

/// Fixed points and bifurcation structure of two fronts on the forcing
/// `triple(α1, α2, α3, k)` with constants `(A, B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicTwoFrontReport {
    pub params: DsParams,
    pub winding: u64,
    pub fixed_points: Vec<FixedPoint>,
    /// For `B = 0` the closed-form saddle-node and pitchfork values; otherwise the transitions
    /// located numerically near them, all labelled saddle-node.
    pub bifurcations: Vec<DsBifurcation>,
}

/// Analyzes the reduced two-front system for `d` in `[d_lo, d_hi]`.
pub fn periodic_two_front_bifurcation(a: f64, b: f64, k: f64, eps: Epsilon, d_lo: f64, d_hi: f64) -> Result<PeriodicTwoFrontReport> {
    if !(d_hi > d_lo) {
        return Err(Error::invalid("empty d window"));
    }
    let (params, winding) = DsParams::new(a, b, k, eps)?;
    let fixed_points = ds_fixed_points(&params, d_lo, d_hi);
    let symmetric = ds_bifurcations_symmetric(k, params.r, d_lo, d_hi);
    let bifurcations = if b == 0.0 {
        symmetric
    } else {
        let mut out = Vec::new();
        for sn in symmetric.iter().filter(|x| x.kind == BifurcationKind::SaddleNode) {
            let pf = symmetric
                .iter()
                .find(|x| x.kind == BifurcationKind::Pitchfork && x.sigma == sn.sigma && x.lobe == sn.lobe)
                .expect("pitchfork paired with saddle-node");
            let range = (0.3 * sn.a.min(pf.a), 3.0 * sn.a.max(pf.a));
            for (av, _, _) in ds_count_transitions(b, k, params.r, sn.sigma, sn.lobe, range, 200) {
                let pts = ds_lobe_points(&DsParams { a: av, ..params }, sn.sigma, sn.lobe);
                let degenerate = pts
                    .iter()
                    .min_by(|x, y| {
                        let mx = x.eigenvalues.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
                        let my = y.eigenvalues.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
                        mx.total_cmp(&my)
                    })
                    .copied();
                let (d, s) = degenerate.map(|q| (q.d, q.s)).unwrap_or((f64::NAN, f64::NAN));
                out.push(DsBifurcation { kind: BifurcationKind::SaddleNode, a: av, d, s, sigma: sn.sigma, lobe: sn.lobe });
            }
        }
        out.sort_by(|x, y| x.d.total_cmp(&y.d).then(x.a.total_cmp(&y.a)));
        out
    };
    Ok(PeriodicTwoFrontReport { params, winding, fixed_points, bifurcations })
}

/// Writes any serializable stationary report as pretty JSON.
pub fn write_report_json<W: Write, T: Serialize>(mut out: W, report: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::Topography;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn nu_closed_form_matches_recursion() {
        for &mu in &[0.0, 0.2, 0.5, 0.8] {
            let mut nu = 0.0;
            for n in 1..6 {
                assert!((nu_n(mu, n) - nu).abs() < 1e-12 * (1.0 + nu), "mu {mu} n {n}");
                nu = (1.0 + nu) / (1.0 - mu);
            }
        }
        assert!((nu_n(0.2, 3) - 2.8125).abs() < 1e-12);
        assert!((mu_star(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn config_count_law() {
        assert_eq!(LocalizedConfig::all(3, 3).len(), 11);
        assert_eq!(LocalizedConfig::all(1, 3).len(), 3);
        assert_eq!(LocalizedConfig::Split { left: 2 }.pattern(4), "LLRR");
        assert_eq!(LocalizedConfig::AtZero { zero: 1, index: 0 }.kind(3), 2);
        assert_eq!(LocalizedConfig::AtZero { zero: 1, index: 2 }.kind(3), 3);
        assert_eq!(LocalizedConfig::AtZero { zero: 1, index: 1 }.kind(3), 4);
    }

    #[test]
    fn two_front_closed_form_matches_jacobian() {
        let model = FrontModel::new(&Forcing::topography(Topography::exp_hill(1.0)));
        let e = eps(0.01);
        let p = [-2.7, 3.1];
        let st = two_front_eigenvalues(p, Orientation::Up, e, &model).unwrap();
        let j = crate::frontdyn::jacobian_with(&p, Orientation::Up, e.value(), &model).unwrap();
        let ev = crate::frontdyn::jacobian_eigenvalues(&j);
        for i in 0..2 {
            assert!((ev[i] - st.lambda[i]).abs() < 1e-10 * (1.0 + ev[i].abs()), "{ev:?} {st:?}");
        }
        // eigenvector direction (1, γ₊) satisfies the first row of the Jacobian
        for i in 0..2 {
            let row = j[(0, 0)] + j[(0, 1)] * st.gamma_plus[i];
            assert!((row - st.lambda[i]).abs() < 1e-9 * (1.0 + st.lambda[i].abs()));
        }
    }

    #[test]
    fn refine_single_front_at_zero() {
        let model = FrontModel::new(&Forcing::triple(1.0, 0.0, 0.0, 4.0 * PI / 15.0));
        let r = refine_stationary(&[0.1], Orientation::Up, eps(0.1), &model, RefineOptions::default()).unwrap();
        assert!(r.positions[0].abs() < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn localized_two_fronts_count() {
        let res = enumerate_stationary_localized(&Topography::exp_hill(0.8), eps(1e-3), 2).unwrap();
        assert_eq!(res.zeros.len(), 3, "{:?}", res.zeros);
        assert_eq!(res.fronts.len(), 7, "{:?}", res.failures);
        assert!(res.all_unstable);
        assert!(res.fronts.iter().all(|f| f.newton_residual < 1e-10));
    }

    #[test]
    fn valley_has_no_localized_pairs() {
        let res = enumerate_stationary_localized(&Topography::exp_hill(0.8).negated(), eps(1e-3), 2).unwrap();
        assert!(res.fronts.is_empty());
    }

    #[test]
    fn periodic_pattern_eigenvalues_follow_zeros() {
        let forcing = Forcing::topography(Topography::sinusoid(1.0, 2.0));
        let res = enumerate_stationary_periodic(&forcing, eps(0.01), Orientation::Up, &[0, 3, 6]).unwrap();
        assert_eq!(res.patterns.len(), 8);
        for p in &res.patterns {
            for (l, q) in p.front.eigenvalues.iter().zip(&p.predicted) {
                assert!((l.re - q).abs() < 0.1 * q.abs(), "{l} vs {q}");
            }
            assert_eq!(p.front.is_stable(), p.predicted_stable);
        }
        let close = enumerate_stationary_periodic(&forcing, eps(0.01), Orientation::Up, &[0, 1]);
        assert!(matches!(close, Err(Error::SeparationTooSmall { .. })));
    }

    #[test]
    fn symmetric_bifurcations_match_numeric_counts() {
        let (p, _) = DsParams::new(1.0, 0.0, 0.9, eps(0.01)).unwrap();
        let bif = ds_bifurcations_symmetric(p.k, p.r, 0.0, 8.0);
        let sn = bif.iter().find(|b| b.kind == BifurcationKind::SaddleNode).unwrap();
        let pf = bif.iter().find(|b| b.kind == BifurcationKind::Pitchfork && b.sigma == sn.sigma && b.lobe == sn.lobe).unwrap();
        assert!(sn.a < pf.a);
        let tr = ds_count_transitions(0.0, p.k, p.r, sn.sigma, sn.lobe, (0.3 * sn.a, 3.0 * pf.a), 200);
        assert_eq!(tr.len(), 2, "{tr:?}");
        assert!((tr[0].0 - sn.a).abs() < 1e-6 * sn.a, "{tr:?} {sn:?}");
        assert!((tr[1].0 - pf.a).abs() < 1e-6 * pf.a, "{tr:?} {pf:?}");
        // just past the saddle-node: one saddle and one stable node; past the pitchfork the
        // saddle has become an unstable node flanked by two new saddles
        let q = DsParams { a: sn.a * 1.001, ..p };
        let pts = ds_lobe_points(&q, sn.sigma, sn.lobe);
        let mut classes: Vec<_> = pts.iter().map(|x| x.class).collect();
        classes.sort_by_key(|c| *c as u8);
        assert_eq!(classes, vec![FixedPointClass::StableNode, FixedPointClass::Saddle]);
        let q = DsParams { a: pf.a * 1.001, ..p };
        let mut classes: Vec<_> = ds_lobe_points(&q, sn.sigma, sn.lobe).iter().map(|x| x.class).collect();
        classes.sort_by_key(|c| *c as u8);
        assert_eq!(classes, vec![FixedPointClass::StableNode, FixedPointClass::UnstableNode, FixedPointClass::Saddle, FixedPointClass::Saddle]);
    }

    #[test]
    fn asymmetric_forcing_gives_two_saddle_nodes() {
        let rep = periodic_two_front_bifurcation(1.0, 0.05, 0.9, eps(0.01), 0.0, 8.0).unwrap();
        let first = rep.bifurcations.first().unwrap();
        let same: Vec<_> = rep.bifurcations.iter().filter(|b| b.sigma == first.sigma && b.lobe == first.lobe).collect();
        assert_eq!(same.len(), 2, "{:?}", rep.bifurcations);
        assert!(same.iter().all(|b| b.kind == BifurcationKind::SaddleNode));
    }
}
