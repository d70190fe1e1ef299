//! Direct simulation of the forced Allen–Cahn equation `U_t = U_xx + U - U³ + εF(U, U_x, x)`
//! on a bounded interval with homogeneous Neumann ends, front tracking on the computed
//! solution, the discrete spectrum of the linearization, and the Evans function of the
//! unforced front.

use crate::core::{Field, Grid1D, Orientation};
use crate::error::{Error, Result};
use crate::forcing::{eval_forcing, forcing_partials, Forcing};
use crate::numerics::linalg::{solve_tridiagonal, BandMatrix};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::io::Write;

/// Finite-difference semidiscretization on a uniform grid. The forcing is affine in
/// `(U, U_x)`, so it is stored as coefficient arrays `F = a U + b U_x + c`.
#[derive(Debug, Clone)]
pub struct Semidiscretization {
    pub grid: Grid1D,
    pub eps: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Semidiscretization {
    /// `eps` may be zero (unforced equation) and must be below 1.
    pub fn new(grid: Grid1D, forcing: &Forcing, eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::invalid(format!("eps must lie in [0, 1), got {eps}")));
        }
        forcing.validate()?;
        let xs = grid.nodes();
        let c: Vec<f64> = xs.iter().map(|&x| eval_forcing(forcing, 0.0, 0.0, x)).collect();
        let (a, b): (Vec<f64>, Vec<f64>) = xs
            .iter()
            .map(|&x| {
                let (fu, fv, _) = forcing_partials(forcing, 0.0, 0.0, x);
                (fu, fv)
            })
            .unzip();
        for (i, &x) in xs.iter().enumerate() {
            for v in [a[i], b[i], c[i]] {
                if !v.is_finite() {
                    return Err(Error::UnboundedForcing { x, value: v, bound: f64::MAX });
                }
            }
        }
        Ok(Self { grid, eps, a, b, c })
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    fn d1(u: &[f64], i: usize, h: f64) -> f64 {
        let n = u.len();
        if i == 0 || i == n - 1 {
            0.0
        } else {
            (u[i + 1] - u[i - 1]) / (2.0 * h)
        }
    }

    fn d2(u: &[f64], i: usize, h2: f64) -> f64 {
        let n = u.len();
        if i == 0 {
            2.0 * (u[1] - u[0]) / h2
        } else if i == n - 1 {
            2.0 * (u[n - 2] - u[n - 1]) / h2
        } else {
            (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2
        }
    }

    /// Reaction and forcing terms `U - U³ + εF`.
    pub fn reaction_into(&self, u: &[f64], out: &mut [f64]) {
        let h = self.grid.dx();
        for i in 0..u.len() {
            let ux = Self::d1(u, i, h);
            let f = self.a[i] * u[i] + self.b[i] * ux + self.c[i];
            out[i] = u[i] - u[i] * u[i] * u[i] + self.eps * f;
        }
    }

    /// Full right-hand side.
    pub fn rhs_into(&self, u: &[f64], out: &mut [f64]) {
        self.reaction_into(u, out);
        let h2 = self.grid.dx().powi(2);
        for i in 0..u.len() {
            out[i] += Self::d2(u, i, h2);
        }
    }

    /// Tridiagonal linearization `D2 + diag(1 - 3u² + εa) + εb D1` about `u`.
    pub fn linearization(&self, u: &[f64]) -> BandMatrix {
        let n = self.n();
        let h = self.grid.dx();
        let h2 = h * h;
        let mut m = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            m.set(i, i, -2.0 / h2 + 1.0 - 3.0 * u[i] * u[i] + self.eps * self.a[i]);
            if i == 0 {
                m.set(0, 1, 2.0 / h2);
            } else if i == n - 1 {
                m.set(n - 1, n - 2, 2.0 / h2);
            } else {
                let adv = self.eps * self.b[i] / (2.0 * h);
                m.set(i, i - 1, 1.0 / h2 - adv);
                m.set(i, i + 1, 1.0 / h2 + adv);
            }
        }
        m
    }
}

/// One `s·tanh(k(x - x0))` term of an initial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TanhTerm {
    pub sign: f64,
    pub steepness: f64,
    pub center: f64,
}

/// Initial profile of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialCondition {
    /// `offset + Σ sign·tanh(steepness·(x - center))`, taken literally.
    Terms { terms: Vec<TanhTerm>, offset: f64 },
    /// Alternating fronts at `positions`, starting with `first`.
    Fronts { positions: Vec<f64>, first: Orientation, steepness: f64, offset: f64 },
    /// Explicit nodal values.
    Values(Vec<f64>),
}

impl InitialCondition {
    /// Terms with unit steepness from `(sign, center)` pairs.
    pub fn tanh_sum(pairs: &[(f64, f64)], offset: f64) -> Self {
        InitialCondition::Terms {
            terms: pairs.iter().map(|&(sign, center)| TanhTerm { sign, steepness: 1.0, center }).collect(),
            offset,
        }
    }

    pub fn sample(&self, grid: &Grid1D) -> Result<Field> {
        match self {
            InitialCondition::Terms { terms, offset } => Ok(Field::from_fn(*grid, |x| {
                offset + terms.iter().map(|t| t.sign * (t.steepness * (x - t.center)).tanh()).sum::<f64>()
            })),
            InitialCondition::Fronts { positions, first, steepness, offset } => {
                crate::core::multifront_profile(grid, positions, *first, *steepness, *offset)
            }
            InitialCondition::Values(v) => Field::new(*grid, v.clone()),
        }
    }
}

/// Time integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    /// Classical explicit Runge–Kutta; `dt` must respect the diffusive limit `dx²/2`.
    Rk4 { dt: f64 },
    /// Diffusion treated by the θ-method, reaction and forcing explicitly.
    ImexTheta { dt: f64, theta: f64 },
}

impl Scheme {
    pub fn dt(&self) -> f64 {
        match *self {
            Scheme::Rk4 { dt } | Scheme::ImexTheta { dt, .. } => dt,
        }
    }
}

/// Configuration of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeRunConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub forcing: Forcing,
    pub eps: f64,
    pub initial: InitialCondition,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Interval between front-tracking samples.
    pub track_every: f64,
    /// Interval between stored profiles; `None` stores only the first and last.
    pub snapshot_every: Option<f64>,
    /// Fronts are pinned once every front moves slower than this.
    pub pin_speed: f64,
    /// Earliest time at which pinning is declared.
    pub pin_after: f64,
    pub stop_when_pinned: bool,
    /// Time to keep integrating after the last front has disappeared.
    pub settle_after_vanish: f64,
}

impl PdeRunConfig {
    /// Defaults for a run on `[x_min, x_max]` with `dx = 0.05` and Crank–Nicolson diffusion.
    pub fn new(x_min: f64, x_max: f64, forcing: Forcing, eps: f64, initial: InitialCondition, t_end: f64) -> Self {
        Self {
            x_min,
            x_max,
            dx: 0.05,
            forcing,
            eps,
            initial,
            t_end,
            scheme: Scheme::ImexTheta { dt: 0.02, theta: 0.5 },
            track_every: 1.0,
            snapshot_every: None,
            pin_speed: 1e-5,
            pin_after: 0.0,
            stop_when_pinned: true,
            settle_after_vanish: 20.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !(self.track_every > 0.0) || !(self.scheme.dt() > 0.0) {
            return Err(Error::invalid("t_end, track_every and dt must be positive"));
        }
        if let Scheme::ImexTheta { theta, .. } = self.scheme {
            if !(0.5..=1.0).contains(&theta) {
                return Err(Error::invalid("theta must lie in [0.5, 1]"));
            }
        }
        if let Some(s) = self.snapshot_every {
            if !(s > 0.0) {
                return Err(Error::invalid("snapshot_every must be positive"));
            }
        }
        Ok(())
    }
}

/// Kind of a recorded event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PdeEventKind {
    /// Two adjacent fronts met and disappeared.
    Annihilation,
    /// New zero crossings appeared.
    Nucleation,
    /// Every front has stopped moving.
    Pinned,
    /// No front is left.
    Vanished,
}

impl std::fmt::Display for PdeEventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PdeEventKind::Annihilation => "annihilation",
            PdeEventKind::Nucleation => "nucleation",
            PdeEventKind::Pinned => "pinned",
            PdeEventKind::Vanished => "vanished",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeEvent {
    pub t: f64,
    pub kind: PdeEventKind,
    pub x: f64,
}

/// Front positions at one tracking time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackSample {
    pub t: f64,
    pub positions: Vec<f64>,
    pub orientations: Vec<Orientation>,
    /// Largest front speed since the previous sample (NaN when the front count changed).
    pub max_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PdeOutcome {
    Pinned,
    AllFrontsAnnihilated,
    Completed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeResult {
    pub tracks: Vec<TrackSample>,
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<PdeEvent>,
    pub final_field: Field,
    pub final_time: f64,
    pub outcome: PdeOutcome,
    pub steps: usize,
}

impl PdeResult {
    /// Tracked position of front `j` at the tracking sample closest to `t`, provided the front
    /// count is unchanged since the start.
    pub fn position_near(&self, j: usize, t: f64) -> Option<f64> {
        let s = self.tracks.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))?;
        s.positions.get(j).copied()
    }
}

/// Zero crossings of `field`, located by linear interpolation, with their orientation.
pub fn track_fronts(field: &Field) -> Vec<(f64, Orientation)> {
    let g = field.grid();
    let u = field.values();
    let mut out = Vec::new();
    for i in 0..u.len() - 1 {
        let (a, b) = (u[i], u[i + 1]);
        let pa = a >= 0.0;
        let pb = b >= 0.0;
        if pa != pb {
            let x = g.x(i) + g.dx() * a / (a - b);
            out.push((x, if b > a { Orientation::Up } else { Orientation::Down }));
        }
    }
    out
}

struct Stepper<'a> {
    sd: &'a Semidiscretization,
    scheme: Scheme,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    work: [Vec<f64>; 5],
}

impl<'a> Stepper<'a> {
    fn new(sd: &'a Semidiscretization, scheme: Scheme) -> Self {
        let n = sd.n();
        let h2 = sd.grid.dx().powi(2);
        let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        if let Scheme::ImexTheta { dt, theta } = scheme {
            let r = theta * dt / h2;
            for i in 0..n {
                diag[i] = 1.0 + 2.0 * r;
                if i > 0 {
                    lower[i] = -r;
                }
                if i + 1 < n {
                    upper[i] = -r;
                }
            }
            upper[0] = -2.0 * r;
            lower[n - 1] = -2.0 * r;
        }
        Self { sd, scheme, lower, diag, upper, work: std::array::from_fn(|_| vec![0.0; n]) }
    }

    fn step(&mut self, u: &mut [f64]) -> Result<()> {
        let n = u.len();
        match self.scheme {
            Scheme::Rk4 { dt } => {
                let [k1, k2, k3, k4, tmp] = &mut self.work;
                self.sd.rhs_into(u, k1);
                for i in 0..n {
                    tmp[i] = u[i] + 0.5 * dt * k1[i];
                }
                self.sd.rhs_into(tmp, k2);
                for i in 0..n {
                    tmp[i] = u[i] + 0.5 * dt * k2[i];
                }
                self.sd.rhs_into(tmp, k3);
                for i in 0..n {
                    tmp[i] = u[i] + dt * k3[i];
                }
                self.sd.rhs_into(tmp, k4);
                for i in 0..n {
                    u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            Scheme::ImexTheta { dt, theta } => {
                let h2 = self.sd.grid.dx().powi(2);
                let [react, rhs, scratch, _, _] = &mut self.work;
                self.sd.reaction_into(u, react);
                for i in 0..n {
                    rhs[i] = u[i] + dt * react[i] + (1.0 - theta) * dt * Semidiscretization::d2(u, i, h2);
                }
                solve_tridiagonal(&self.lower, &self.diag, &self.upper, rhs, scratch)?;
                u.copy_from_slice(rhs);
            }
        }
        Ok(())
    }
}

/// Runs a simulation, tracking fronts every `track_every` time units.
pub fn run(config: &PdeRunConfig) -> Result<PdeResult> {
    config.validate()?;
    let grid = Grid1D::with_spacing(config.x_min, config.x_max, config.dx)?;
    let sd = Semidiscretization::new(grid, &config.forcing, config.eps)?;
    if let Scheme::Rk4 { dt } = config.scheme {
        if dt > 0.5 * grid.dx().powi(2) {
            log::warn!("RK4 step {dt} exceeds the diffusive stability limit {}", 0.5 * grid.dx().powi(2));
        }
    }
    let mut u = config.initial.sample(&grid)?.into_values();
    let mut stepper = Stepper::new(&sd, config.scheme);
    let dt = config.scheme.dt();
    let steps_per_track = ((config.track_every / dt).round() as usize).max(1);
    let steps_per_snapshot = config.snapshot_every.map(|s| ((s / dt).round() as usize).max(1));
    let total_steps = (config.t_end / dt).ceil() as usize;

    let mut snapshots = vec![Snapshot { t: 0.0, u: u.clone() }];
    let mut events = Vec::new();
    let first = track_fronts(&Field::new(grid, u.clone())?);
    let mut tracks = vec![TrackSample {
        t: 0.0,
        positions: first.iter().map(|f| f.0).collect(),
        orientations: first.iter().map(|f| f.1).collect(),
        max_speed: f64::NAN,
    }];
    let mut outcome = PdeOutcome::Completed;
    let mut vanished_at: Option<f64> = None;
    let mut pinned = false;
    let mut step = 0;
    while step < total_steps {
        stepper.step(&mut u)?;
        step += 1;
        let t = step as f64 * dt;
        if let Some(k) = steps_per_snapshot {
            if step % k == 0 {
                snapshots.push(Snapshot { t, u: u.clone() });
            }
        }
        if step % steps_per_track != 0 && step != total_steps {
            continue;
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NaNDetected { t });
        }
        let fronts = track_fronts(&Field::new(grid, u.clone())?);
        let prev = tracks.last().expect("initial sample");
        let positions: Vec<f64> = fronts.iter().map(|f| f.0).collect();
        let orientations: Vec<Orientation> = fronts.iter().map(|f| f.1).collect();
        let dt_track = t - prev.t;
        let max_speed = if positions.len() == prev.positions.len() && orientations == prev.orientations {
            positions.iter().zip(&prev.positions).map(|(a, b)| (a - b).abs() / dt_track).fold(0.0, f64::max)
        } else {
            f64::NAN
        };
        if positions.len() < prev.positions.len() {
            for x in vanished_pairs(&prev.positions, &positions) {
                events.push(PdeEvent { t, kind: PdeEventKind::Annihilation, x });
            }
            if positions.is_empty() {
                events.push(PdeEvent { t, kind: PdeEventKind::Vanished, x: f64::NAN });
                vanished_at = Some(t);
            }
        } else if positions.len() > prev.positions.len() {
            for x in vanished_pairs(&positions, &prev.positions) {
                events.push(PdeEvent { t, kind: PdeEventKind::Nucleation, x });
            }
            vanished_at = None;
        }
        tracks.push(TrackSample { t, positions, orientations, max_speed });
        let n_fronts = tracks.last().expect("sample").positions.len();
        let still = n_fronts > 0 && t >= config.pin_after && max_speed < config.pin_speed;
        if still && !pinned {
            events.push(PdeEvent { t, kind: PdeEventKind::Pinned, x: f64::NAN });
            outcome = PdeOutcome::Pinned;
            if config.stop_when_pinned {
                break;
            }
        }
        pinned = still;
        if let Some(tv) = vanished_at {
            outcome = PdeOutcome::AllFrontsAnnihilated;
            if t - tv >= config.settle_after_vanish {
                break;
            }
        }
    }
    let final_time = step as f64 * dt;
    if snapshots.last().map(|s| s.t) != Some(final_time) {
        snapshots.push(Snapshot { t: final_time, u: u.clone() });
    }
    Ok(PdeResult {
        tracks,
        snapshots,
        events,
        final_field: Field::new(grid, u)?,
        final_time,
        outcome,
        steps: step,
    })
}

/// Midpoints of consecutive entries of `before` that have no counterpart in `after`.
fn vanished_pairs(before: &[f64], after: &[f64]) -> Vec<f64> {
    let mut used = vec![false; before.len()];
    for &a in after {
        if let Some((k, _)) = before
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|x, y| (x.1 - a).abs().total_cmp(&(y.1 - a).abs()))
        {
            used[k] = true;
        }
    }
    let lost: Vec<f64> = before.iter().zip(&used).filter(|(_, u)| !**u).map(|(x, _)| *x).collect();
    lost.chunks(2).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
}

/// Writes the tracked fronts in long format `t,index,x,orientation`.
pub fn write_tracks_csv<W: Write>(out: W, tracks: &[TrackSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "index", "x", "orientation"])?;
    for s in tracks {
        for (j, (x, o)) in s.positions.iter().zip(&s.orientations).enumerate() {
            w.write_record([s.t.to_string(), j.to_string(), x.to_string(), o.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes one profile as `x,u`.
pub fn write_snapshot_csv<W: Write>(out: W, grid: &Grid1D, u: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "u"])?;
    for (i, v) in u.iter().enumerate() {
        w.write_record([grid.x(i).to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes events as `t,kind,x`.
pub fn write_pde_events_csv<W: Write>(out: W, events: &[PdeEvent]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "kind", "x"])?;
    for e in events {
        w.write_record([e.t.to_string(), e.kind.to_string(), e.x.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------------------------
// Spectrum

/// Options of [`discrete_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub shift: f64,
    pub count: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { shift: -0.75, count: 2, krylov_dim: 40, max_restarts: 50, tol: 1e-10 }
    }
}

fn start_vector(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((i as f64 * 12.9898 + 78.233).sin() * 43_758.545_3).fract() - 0.25).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigenvector of the small Hessenberg matrix `h` for the eigenvalue `theta`, by inverse
/// iteration.
fn hessenberg_eigvec(h: &DMatrix<f64>, theta: Complex64) -> DVector<Complex64> {
    let m = h.nrows();
    let mut a: DMatrix<Complex64> = h.map(|v| Complex64::new(v, 0.0));
    let pert = 1e-10 * (1.0 + theta.norm());
    for i in 0..m {
        a[(i, i)] -= theta + Complex64::new(pert, 0.0);
    }
    let lu = a.lu();
    let mut y = DVector::from_element(m, Complex64::new(1.0, 0.0));
    for _ in 0..3 {
        if let Some(z) = lu.solve(&y) {
            let nz = z.norm();
            y = z / Complex64::new(nz, 0.0);
        }
    }
    y
}

/// Eigenvalues of the banded operator `a` closest to `opts.shift`, by Arnoldi iteration on
/// `(a - shift)⁻¹` with explicit restarts.
pub fn discrete_spectrum(a: &BandMatrix, opts: SpectrumOptions) -> Result<Vec<Complex64>> {
    let n = a.n();
    if opts.count == 0 || opts.count >= n {
        return Err(Error::invalid("eigenvalue count must lie in 1..n"));
    }
    let mut shifted = a.clone();
    for i in 0..n {
        shifted.add(i, i, -opts.shift);
    }
    let lu = shifted.lu()?;
    let m = opts.krylov_dim.max(2 * opts.count + 4).min(n);
    let mut v0 = start_vector(n);
    let mut last = Vec::new();
    for _ in 0..opts.max_restarts {
        let nv = norm(&v0);
        let mut basis: Vec<Vec<f64>> = vec![v0.iter().map(|x| x / nv).collect()];
        let mut h = DMatrix::<f64>::zeros(m + 1, m);
        let mut dim = m;
        for j in 0..m {
            let mut w = basis[j].clone();
            lu.solve(&mut w);
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                    h[(i, j)] += c;
                    for (wk, bk) in w.iter_mut().zip(b) {
                        *wk -= c * bk;
                    }
                }
            }
            let hn = norm(&w);
            h[(j + 1, j)] = hn;
            if hn < 1e-14 {
                dim = j + 1;
                break;
            }
            basis.push(w.iter().map(|x| x / hn).collect());
        }
        let hm = h.view((0, 0), (dim, dim)).into_owned();
        let mut thetas: Vec<Complex64> = hm.complex_eigenvalues().iter().copied().collect();
        thetas.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
        let wanted: Vec<Complex64> = thetas.into_iter().take(opts.count).collect();
        let beta = if dim < m + 1 { h[(dim, dim - 1)] } else { 0.0 };
        let mut converged = true;
        let mut restart = vec![0.0; n];
        for th in &wanted {
            let y = hessenberg_eigvec(&hm, *th);
            let resid = beta * y[dim - 1].norm();
            if resid > opts.tol * th.norm() {
                converged = false;
            }
            for (k, b) in basis.iter().take(dim).enumerate() {
                let coef = y[k].re + y[k].im;
                for (r, bk) in restart.iter_mut().zip(b) {
                    *r += coef * bk;
                }
            }
        }
        last = wanted.iter().map(|th| Complex64::new(opts.shift, 0.0) + th.inv()).collect();
        if converged || dim < m {
            let mut out = last;
            out.sort_by(|x, y| y.re.total_cmp(&x.re));
            return Ok(out);
        }
        v0 = restart;
    }
    Err(Error::NotConverged(format!("shift-invert Arnoldi did not converge; last estimates {last:?}")))
}

/// All eigenvalues of a banded operator from a dense eigen-solve, sorted by distance to
/// `shift`. Intended for `n <= 2000`.
pub fn discrete_spectrum_dense(a: &BandMatrix, shift: f64) -> Result<Vec<Complex64>> {
    let n = a.n();
    if n > 2000 {
        return Err(Error::invalid("dense spectrum is limited to n <= 2000"));
    }
    let m = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
    let mut ev: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| (x - shift).norm().total_cmp(&(y - shift).norm()));
    Ok(ev)
}

/// Linearization about the unforced front `tanh(x/√2)` on `grid`.
pub fn homogeneous_front_operator(grid: Grid1D) -> Result<BandMatrix> {
    let sd = Semidiscretization::new(grid, &Forcing::Zero, 0.0)?;
    let u: Vec<f64> = grid.nodes().iter().map(|&x| (x / SQRT_2).tanh()).collect();
    Ok(sd.linearization(&u))
}

// ---------------------------------------------------------------------------------------------
// Evans function of the unforced front

fn decay_rate(lambda: Complex64) -> Result<Complex64> {
    if lambda.im == 0.0 && lambda.re <= -2.0 {
        return Err(Error::OnBranchCut { re: lambda.re, im: lambda.im });
    }
    Ok((lambda + 2.0).sqrt())
}

/// Normalized Evans function of `v'' + (1 - 3u_h²) v = λ v`, zero exactly at the point
/// eigenvalues `0` and `-3/2`; `κ = √(2(λ + 2))` and `𝒟 = (κ - 1)(κ - 2)/((κ + 1)(κ + 2))`.
pub fn evans_homogeneous(lambda: Complex64) -> Result<Complex64> {
    let k = decay_rate(lambda)? * SQRT_2;
    Ok((k - 1.0) * (k - 2.0) / ((k + 1.0) * (k + 2.0)))
}

/// Evans function from the Wronskian at `y = 0` of the Jost solutions integrated inwards
/// from `y = ±half_width`, normalized like [`evans_homogeneous`].
pub fn evans_numeric(lambda: Complex64, half_width: f64, steps: usize) -> Result<Complex64> {
    let kappa = decay_rate(lambda)?;
    let pot = |y: f64| lambda + 2.0 - 3.0 / (y / SQRT_2).cosh().powi(2);
    let integrate = |y0: f64, v0: Complex64, p0: Complex64| {
        let h = -y0 / steps as f64;
        let (mut y, mut v, mut p) = (y0, v0, p0);
        let f = |y: f64, v: Complex64, p: Complex64| (p, pot(y) * v);
        for _ in 0..steps {
            let (k1v, k1p) = f(y, v, p);
            let (k2v, k2p) = f(y + 0.5 * h, v + 0.5 * h * k1v, p + 0.5 * h * k1p);
            let (k3v, k3p) = f(y + 0.5 * h, v + 0.5 * h * k2v, p + 0.5 * h * k2p);
            let (k4v, k4p) = f(y + h, v + h * k3v, p + h * k3p);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            y += h;
        }
        (v, p)
    };
    let l = half_width;
    let e = (-kappa * l).exp();
    let (vp, pp) = integrate(l, e, -kappa * e);
    let (vm, pm) = integrate(-l, e, kappa * e);
    let w = vm * pp - pm * vp;
    Ok(w / (-2.0 * kappa))
}
