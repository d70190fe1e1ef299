//! The reduced N-front interaction ODE
//! `dφ_j/dt = c[-εR_j(φ_j) + 16(e^{-√2Δφ_j} - e^{-√2Δφ_{j-1}})]`, `c = 1/‖u'_up‖²`,
//! its gradient structure, adaptive integration with collision events, and its Jacobian.

use crate::core::{check_increasing, weight_wh, Orientation, INV_NORM_SQ};
use crate::error::{Error, Result};
use crate::forcing::{Epsilon, Forcing};
use crate::melnikov::{MelnikovBackend, MelnikovFn};
use crate::numerics::ode::{dopri5, Dopri5Options, StepControl};
use crate::numerics::quad::{self, integrate_with_breaks, QuadOptions};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::SQRT_2;
use std::io::Write;

/// Ordered front positions with the orientation of the first front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontState {
    pub positions: Vec<f64>,
    pub first: Orientation,
    pub eps: Epsilon,
}

impl FrontState {
    pub fn new(positions: Vec<f64>, first: Orientation, eps: Epsilon) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("a front state needs at least one front"));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("front positions must be finite"));
        }
        check_increasing(&positions)?;
        Ok(Self { positions, first, eps })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// Orientation of front `j`.
    pub fn orientation(&self, j: usize) -> Orientation {
        self.first.alternate(j)
    }

    /// Smallest gap between neighbouring fronts (`∞` for a single front).
    pub fn min_gap(&self) -> f64 {
        self.positions.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// The Melnikov functions of both orientations for one forcing.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontModel {
    pub up: MelnikovFn,
    pub down: MelnikovFn,
}

impl FrontModel {
    /// Closed forms where available, memoized quadrature otherwise.
    pub fn new(forcing: &Forcing) -> Self {
        let up = MelnikovFn::auto(forcing.clone(), Orientation::Up).cached();
        let down = if forcing.is_odd_in_state() {
            up.clone()
        } else {
            MelnikovFn::auto(forcing.clone(), Orientation::Down).cached()
        };
        Self { up, down }
    }

    pub fn from_pair(up: MelnikovFn, down: MelnikovFn) -> Self {
        Self { up, down }
    }

    pub fn for_orientation(&self, o: Orientation) -> &MelnikovFn {
        match o {
            Orientation::Up => &self.up,
            Orientation::Down => &self.down,
        }
    }

    pub fn forcing(&self) -> &Forcing {
        &self.up.forcing
    }
}

fn interaction(gap: f64) -> f64 {
    16.0 * (-SQRT_2 * gap).exp()
}

/// Right-hand side of the N-front ODE written into `out`.
pub fn nfront_rhs_into(
    positions: &[f64],
    first: Orientation,
    eps: f64,
    model: &FrontModel,
    out: &mut [f64],
) -> Result<()> {
    let n = positions.len();
    for j in 0..n {
        let r = model.for_orientation(first.alternate(j)).value(positions[j])?;
        let right = if j + 1 < n { interaction(positions[j + 1] - positions[j]) } else { 0.0 };
        let left = if j > 0 { interaction(positions[j] - positions[j - 1]) } else { 0.0 };
        out[j] = INV_NORM_SQ * (-eps * r + right - left);
    }
    Ok(())
}

/// `dφ_j/dt` for every front.
pub fn nfront_rhs(s: &FrontState, up: &MelnikovFn, down: &MelnikovFn) -> Result<Vec<f64>> {
    let model = FrontModel::from_pair(up.clone(), down.clone());
    let mut out = vec![0.0; s.n()];
    nfront_rhs_into(&s.positions, s.first, s.eps.value(), &model, &mut out)?;
    Ok(out)
}

/// `∫_0^φ R(ϕ) dϕ`.
pub fn melnikov_primitive(f: &MelnikovFn, phi: f64) -> Result<f64> {
    if phi == 0.0 || f.forcing.is_zero() {
        return Ok(0.0);
    }
    match (&f.backend, &f.forcing) {
        (MelnikovBackend::PeriodicClosed { a, b, k }, _) => {
            let c = 16.0 * (a + f.orientation.sign() * b);
            Ok(c * (1.0 - (k * phi).cos()) / k)
        }
        (_, Forcing::TopographyDriven { topo }) if topo.h(0.0).is_some() => {
            let h = |x: f64| topo.h(x).unwrap_or(f64::NAN);
            let mut breaks = vec![-30.0, -15.0, 0.0, 15.0, 30.0];
            for xf in topo.feature_points() {
                for y in [xf - phi, xf] {
                    if y.abs() < 30.0 {
                        breaks.push(y);
                    }
                }
            }
            breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            let r = integrate_with_breaks(|y| (h(y + phi) - h(y)) * weight_wh(y), &breaks, QuadOptions::new(1e-14, 1e-12))?;
            Ok(r.value)
        }
        _ => {
            let err = RefCell::new(None);
            let r = quad::integrate(
                |p| {
                    f.value(p).unwrap_or_else(|e| {
                        err.borrow_mut().get_or_insert(e);
                        0.0
                    })
                },
                0.0,
                phi,
                QuadOptions::new(1e-13, 1e-11),
            )?;
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            Ok(r.value)
        }
    }
}

/// Gradient-flow potential `V` with `rhs = -∇V`:
/// `V = c[ε Σ_j ∫_0^{φ_j} R_j - 8√2 Σ_j e^{-√2(φ_{j+1}-φ_j)}]`.
pub fn nfront_potential(s: &FrontState, up: &MelnikovFn, down: &MelnikovFn) -> Result<f64> {
    let model = FrontModel::from_pair(up.clone(), down.clone());
    potential_with(&s.positions, s.first, s.eps.value(), &model)
}

fn potential_with(positions: &[f64], first: Orientation, eps: f64, model: &FrontModel) -> Result<f64> {
    let mut v = 0.0;
    for (j, &p) in positions.iter().enumerate() {
        v += eps * melnikov_primitive(model.for_orientation(first.alternate(j)), p)?;
    }
    for w in positions.windows(2) {
        v -= 8.0 * SQRT_2 * (-SQRT_2 * (w[1] - w[0])).exp();
    }
    Ok(INV_NORM_SQ * v)
}

/// Right-hand side of the topographic system in `ψ = √2φ` and `τ = √2t/‖u'_up‖²`:
/// `dψ_j/dτ = -εS(ψ_j) + 16(e^{-(ψ_{j+1}-ψ_j)} - e^{-(ψ_j-ψ_{j-1})})`.
pub fn rescaled_rhs_topographic(psi: &[f64], s: &MelnikovFn, eps: Epsilon) -> Result<Vec<f64>> {
    if s.forcing.as_topography().is_none() && !s.forcing.is_zero() {
        return Err(Error::invalid("the rescaled system requires topographic forcing"));
    }
    let n = psi.len();
    let e = eps.value();
    (0..n)
        .map(|j| {
            let sv = s.value(psi[j] / SQRT_2)?;
            let right = if j + 1 < n { 16.0 * (-(psi[j + 1] - psi[j])).exp() } else { 0.0 };
            let left = if j > 0 { 16.0 * (-(psi[j] - psi[j - 1])).exp() } else { 0.0 };
            Ok(-e * sv + right - left)
        })
        .collect()
}

/// Conversion factor `dτ/dt = √2/‖u'_up‖² = 3/2`.
pub const TAU_PER_T: f64 = SQRT_2 * INV_NORM_SQ;

/// Analytic Jacobian of [`nfront_rhs`] (symmetric tridiagonal).
pub fn jacobian(s: &FrontState, up: &MelnikovFn, down: &MelnikovFn) -> Result<DMatrix<f64>> {
    let model = FrontModel::from_pair(up.clone(), down.clone());
    jacobian_with(&s.positions, s.first, s.eps.value(), &model)
}

/// [`jacobian`] for raw positions.
pub fn jacobian_with(positions: &[f64], first: Orientation, eps: f64, model: &FrontModel) -> Result<DMatrix<f64>> {
    let n = positions.len();
    let mut j = DMatrix::zeros(n, n);
    for i in 0..n {
        let rp = model.for_orientation(first.alternate(i)).deriv(positions[i])?;
        let mut d = -eps * rp;
        if i + 1 < n {
            let c = SQRT_2 * interaction(positions[i + 1] - positions[i]);
            d += c;
            j[(i, i + 1)] = -INV_NORM_SQ * c;
        }
        if i > 0 {
            let c = SQRT_2 * interaction(positions[i] - positions[i - 1]);
            d += c;
            j[(i, i - 1)] = -INV_NORM_SQ * c;
        }
        j[(i, i)] = INV_NORM_SQ * d;
    }
    Ok(j)
}

/// Eigenvalues (ascending) of the symmetric Jacobian.
pub fn jacobian_eigenvalues(j: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(j.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

/// Kinds of trajectory events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    TooClose,
    LeftDomain,
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EventKind::TooClose => write!(f, "too_close"),
            EventKind::LeftDomain => write!(f, "left_domain"),
        }
    }
}

/// An event recorded during integration; `i`, `j` index the fronts involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontEvent {
    pub time: f64,
    pub kind: EventKind,
    pub i: usize,
    pub j: usize,
}

/// Integration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateControls {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible gap between neighbouring fronts.
    pub delta_min: f64,
    /// Delete a colliding pair and continue instead of stopping (approximate).
    pub merge: bool,
    /// Spacing of recorded states; every accepted step is recorded when `None`.
    pub output_every: Option<f64>,
    /// Fronts leaving this interval stop the integration.
    pub domain: Option<(f64, f64)>,
    pub max_steps: usize,
}

impl Default for IntegrateControls {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, delta_min: 2.0, merge: false, output_every: None, domain: None, max_steps: 5_000_000 }
    }
}

/// Time series of front states produced by [`integrate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FrontState>,
    pub events: Vec<FrontEvent>,
    /// True when a merge continuation was applied (results are heuristic past that point).
    pub approximate: bool,
}

impl FrontTrajectory {
    pub fn last(&self) -> &FrontState {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// Linear interpolation of front `j` at time `t` (while the front count is unchanged).
    pub fn position_at(&self, j: usize, t: f64) -> Option<f64> {
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            return self.states.first().and_then(|s| s.positions.get(j).copied());
        }
        if k >= self.times.len() {
            return None;
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (a, b) = (&self.states[k - 1], &self.states[k]);
        if a.n() != b.n() {
            return None;
        }
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        Some(a.positions.get(j)? * (1.0 - w) + b.positions.get(j)? * w)
    }
}

/// Integrates the N-front ODE from `s0` up to `t_end`.
pub fn integrate(s0: &FrontState, t_end: f64, model: &FrontModel, controls: IntegrateControls) -> Result<FrontTrajectory> {
    if !(t_end > 0.0) {
        return Err(Error::invalid("t_end must be positive"));
    }
    let eps = s0.eps.value();
    let mut traj = FrontTrajectory { times: Vec::new(), states: Vec::new(), events: Vec::new(), approximate: false };
    let mut state = s0.clone();
    let mut t0 = 0.0;
    loop {
        let first = state.first;
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let mut event: Option<FrontEvent> = None;
        let mut next_out = t0;
        let opts = Dopri5Options { rtol: controls.rtol, atol: controls.atol, max_steps: controls.max_steps, ..Default::default() };
        let outcome = dopri5(
            |_, y, dy| {
                if let Err(e) = nfront_rhs_into(y, first, eps, model, dy) {
                    failure.borrow_mut().get_or_insert(e);
                    dy.iter_mut().for_each(|v| *v = 0.0);
                }
            },
            t0,
            &state.positions,
            t_end,
            opts,
            |t, y| {
                if failure.borrow().is_some() {
                    return StepControl::Stop;
                }
                let record = match controls.output_every {
                    None => true,
                    Some(_) => t >= next_out - 1e-12 || t >= t_end,
                };
                if record {
                    traj.times.push(t);
                    traj.states.push(FrontState { positions: y.to_vec(), first, eps: s0.eps });
                    if let Some(dt) = controls.output_every {
                        while next_out <= t + 1e-12 {
                            next_out += dt;
                        }
                    }
                }
                for (i, w) in y.windows(2).enumerate() {
                    if w[1] - w[0] < controls.delta_min {
                        event = Some(FrontEvent { time: t, kind: EventKind::TooClose, i, j: i + 1 });
                        break;
                    }
                }
                if event.is_none() {
                    if let Some((lo, hi)) = controls.domain {
                        if let Some(i) = y.iter().position(|&p| p < lo || p > hi) {
                            event = Some(FrontEvent { time: t, kind: EventKind::LeftDomain, i, j: i });
                        }
                    }
                }
                if event.is_some() {
                    if !record {
                        traj.times.push(t);
                        traj.states.push(FrontState { positions: y.to_vec(), first, eps: s0.eps });
                    }
                    StepControl::Stop
                } else {
                    StepControl::Continue
                }
            },
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let Some(ev) = event else {
            if traj.times.last().copied() != Some(outcome.t) {
                traj.times.push(outcome.t);
                traj.states.push(FrontState { positions: outcome.y.clone(), first, eps: s0.eps });
            }
            return Ok(traj);
        };
        traj.events.push(ev);
        if !(controls.merge && ev.kind == EventKind::TooClose) {
            return Ok(traj);
        }
        traj.approximate = true;
        let mut pos = outcome.y.clone();
        pos.drain(ev.i..=ev.j);
        if pos.is_empty() || outcome.t >= t_end {
            return Ok(traj);
        }
        state = FrontState { positions: pos, first, eps: s0.eps };
        t0 = outcome.t;
    }
}

/// Anchored coordinates `φ_j = p_j|log ε|/√2 + ℓ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorScheme {
    pub p: Vec<f64>,
    pub ell: Vec<f64>,
}

impl AnchorScheme {
    /// Offsets `ℓ_j` that reproduce `positions` for the given anchors.
    pub fn from_positions(positions: &[f64], anchors: &[f64], eps: Epsilon) -> Result<Self> {
        if positions.len() != anchors.len() {
            return Err(Error::invalid("anchor count differs from front count"));
        }
        let scale = eps.abs_log() / SQRT_2;
        let ell = positions.iter().zip(anchors).map(|(x, p)| x - p * scale).collect();
        Ok(Self { p: anchors.to_vec(), ell })
    }

    pub fn positions(&self, eps: Epsilon) -> Vec<f64> {
        let scale = eps.abs_log() / SQRT_2;
        self.p.iter().zip(&self.ell).map(|(p, l)| p * scale + l).collect()
    }
}

/// Writes `(t, phi_1, …, phi_N)` rows; rows with fewer fronts leave trailing cells empty.
pub fn write_trajectory_csv<W: Write>(out: W, traj: &FrontTrajectory) -> Result<()> {
    let n = traj.states.iter().map(|s| s.n()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("phi_{j}")));
    w.write_record(&header)?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![t.to_string()];
        row.extend((0..n).map(|j| s.positions.get(j).map(|p| p.to_string()).unwrap_or_default()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `(t, kind, i, j)` event rows.
pub fn write_events_csv<W: Write>(out: W, events: &[FrontEvent]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "kind", "i", "j"])?;
    for e in events {
        w.write_record([e.time.to_string(), e.kind.to_string(), e.i.to_string(), e.j.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
