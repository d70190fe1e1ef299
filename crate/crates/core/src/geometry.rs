//! First-order expansion of the orbits on the stable and unstable manifolds of the background
//! states of the stationary equation `u'' + u - u³ + εF(u, u', x) = 0`, and the geometry of
//! their traces on a Poincaré section `{x = x_s}`.
//!
//! Along a front `u_h(x - φ)` the correction `u₁` solves `u₁'' + (1 - 3u_h²) u₁ = -F` and is
//! written as `u₁ = A Ψ_b + B Ψ_u` with `A' = FΨ_u`, `B' = -FΨ_b`, `A(φ) = 0`, where `Ψ_b = u_h'`
//! and `Ψ_u` is the unbounded partner with unit Wronskian. Fixing `B` at one end selects the
//! orbit that stays bounded there.

use crate::core::{heteroclinic, heteroclinic_deriv, Orientation};
use crate::error::{Error, Result};
use crate::forcing::{eval_forcing, Forcing};
use crate::numerics::quad::{integrate, QuadOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::io::Write;

const HALF_SQRT_2: f64 = SQRT_2 / 2.0;

/// Distance beyond which `Ψ_b` is negligible when integrating to `±∞`.
const TAIL_CUTOFF: f64 = 40.0;

/// Bounded solution `(√2/2) sech²(√2(x - φ)/2)` of the front linearization (up front).
pub fn psi_b(x: f64, phi: f64) -> f64 {
    let c = (HALF_SQRT_2 * (x - phi)).cosh();
    HALF_SQRT_2 / (c * c)
}

/// `∂x Ψ_b`.
pub fn psi_b_deriv(x: f64, phi: f64) -> f64 {
    let a = HALF_SQRT_2 * (x - phi);
    let c = a.cosh();
    -a.tanh() / (c * c)
}

/// `v(x; φ) = (3/4)(x - φ) + (√2/2) sinh(√2(x - φ)) + (√2/16) sinh(2√2(x - φ))`.
pub fn v_factor(x: f64, phi: f64) -> f64 {
    let y = x - phi;
    0.75 * y + HALF_SQRT_2 * (SQRT_2 * y).sinh() + SQRT_2 / 16.0 * (2.0 * SQRT_2 * y).sinh()
}

/// Unbounded solution `Ψ_u = v Ψ_b` with `Ψ_b Ψ_u' - Ψ_b' Ψ_u = 1`.
pub fn psi_u(x: f64, phi: f64) -> f64 {
    v_factor(x, phi) * psi_b(x, phi)
}

/// `∂x Ψ_u = 1/Ψ_b + v Ψ_b'`.
pub fn psi_u_deriv(x: f64, phi: f64) -> f64 {
    1.0 / psi_b(x, phi) + v_factor(x, phi) * psi_b_deriv(x, phi)
}

/// End at which the first-order correction stays bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum B0Choice {
    /// `B(-∞) = 0`: orbits on an unstable manifold.
    BoundedLeft,
    /// `B(+∞) = 0`: orbits on a stable manifold.
    BoundedRight,
}

/// Which manifold a section belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManifoldKind {
    /// Unstable manifold of the `-1` state (up-front base orbit).
    WuMinus,
    /// Stable manifold of the `-1` state (down-front base orbit).
    WsMinus,
    /// Unstable manifold of the `+1` state (down-front base orbit).
    WuPlus,
    /// Stable manifold of the `+1` state (up-front base orbit).
    WsPlus,
}

impl ManifoldKind {
    pub fn base(self) -> (Orientation, B0Choice) {
        match self {
            ManifoldKind::WuMinus => (Orientation::Up, B0Choice::BoundedLeft),
            ManifoldKind::WsMinus => (Orientation::Down, B0Choice::BoundedRight),
            ManifoldKind::WuPlus => (Orientation::Down, B0Choice::BoundedLeft),
            ManifoldKind::WsPlus => (Orientation::Up, B0Choice::BoundedRight),
        }
    }
}

impl std::str::FromStr for ManifoldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wu-" | "wu_minus" | "wuminus" => Ok(ManifoldKind::WuMinus),
            "ws-" | "ws_minus" | "wsminus" => Ok(ManifoldKind::WsMinus),
            "wu+" | "wu_plus" | "wuplus" => Ok(ManifoldKind::WuPlus),
            "ws+" | "ws_plus" | "wsplus" => Ok(ManifoldKind::WsPlus),
            _ => Err(Error::invalid(format!("unknown manifold '{s}' (expected wu-, ws-, wu+ or ws+)"))),
        }
    }
}

/// First-order expansion along one front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion1 {
    pub phi: f64,
    pub orientation: Orientation,
    pub b0: B0Choice,
    /// `B(-∞)`.
    pub b_minus: f64,
    /// `B(+∞)`.
    pub b_plus: f64,
    forcing: Forcing,
}

impl Expansion1 {
    pub fn new(forcing: &Forcing, phi: f64, orientation: Orientation, b0: B0Choice) -> Result<Self> {
        let mut e = Self { phi, orientation, b0, b_minus: 0.0, b_plus: 0.0, forcing: forcing.clone() };
        let total = e.integral(phi - TAIL_CUTOFF, phi + TAIL_CUTOFF, |z| e.fpsi_b(z))?;
        match b0 {
            B0Choice::BoundedLeft => e.b_plus = -total,
            B0Choice::BoundedRight => e.b_minus = total,
        }
        Ok(e)
    }

    fn sign(&self) -> f64 {
        self.orientation.sign()
    }

    fn forcing_on_base(&self, z: f64) -> f64 {
        let u = heteroclinic(self.orientation, z, self.phi);
        let p = heteroclinic_deriv(self.orientation, z, self.phi);
        eval_forcing(&self.forcing, u, p, z)
    }

    /// `F Ψ_b` with `Ψ_b = u_h'` of the base orientation.
    fn fpsi_b(&self, z: f64) -> f64 {
        self.forcing_on_base(z) * self.sign() * psi_b(z, self.phi)
    }

    fn fpsi_u(&self, z: f64) -> f64 {
        self.forcing_on_base(z) * self.sign() * psi_u(z, self.phi)
    }

    fn integral<G: Fn(f64) -> f64>(&self, a: f64, b: f64, g: G) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let breaks = subdivide(a, b);
        let mut s = 0.0;
        for w in breaks.windows(2) {
            s += integrate(&g, w[0], w[1], QuadOptions::new(1e-13, 1e-11))?.value;
        }
        Ok(s)
    }

    /// `A(x) = ∫_φ^x F Ψ_u`.
    pub fn a_coef(&self, x: f64) -> Result<f64> {
        self.integral(self.phi, x, |z| self.fpsi_u(z))
    }

    /// `B(x)` with the boundary condition of `b0`.
    pub fn b_coef(&self, x: f64) -> Result<f64> {
        match self.b0 {
            B0Choice::BoundedLeft => Ok(-self.integral(self.phi - TAIL_CUTOFF, x.max(self.phi - TAIL_CUTOFF), |z| self.fpsi_b(z))?),
            B0Choice::BoundedRight => Ok(self.integral(x.min(self.phi + TAIL_CUTOFF), self.phi + TAIL_CUTOFF, |z| self.fpsi_b(z))?),
        }
    }

    /// `(u₁, u₁')` at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let a = self.a_coef(x)?;
        let b = self.b_coef(x)?;
        let s = self.sign();
        let (pb, pbd) = (s * psi_b(x, self.phi), s * psi_b_deriv(x, self.phi));
        let (pu, pud) = (s * psi_u(x, self.phi), s * psi_u_deriv(x, self.phi));
        Ok((a * pb + b * pu, a * pbd + b * pud))
    }

    /// `B(-∞) - B(+∞)`, the Melnikov value of the base front.
    pub fn melnikov_value(&self) -> f64 {
        self.b_minus - self.b_plus
    }
}

fn subdivide(a: f64, b: f64) -> Vec<f64> {
    let pieces = ((b - a).abs() / 2.0).ceil().max(1.0) as usize;
    (0..=pieces).map(|i| a + (b - a) * i as f64 / pieces as f64).collect()
}

/// `(u₁, u₁')` at `x` for the front at `phi`.
pub fn first_order_correction(f: &Forcing, phi: f64, orientation: Orientation, b0: B0Choice, x: f64) -> Result<(f64, f64)> {
    Expansion1::new(f, phi, orientation, b0)?.eval(x)
}

/// Half-width `|ln ε|/(2√2) + 1` of the region in which the first-order expansion is trusted.
pub fn validity_window(eps: f64) -> f64 {
    if eps <= 0.0 {
        f64::INFINITY
    } else {
        eps.ln().abs() / (2.0 * SQRT_2) + 1.0
    }
}

/// Trace of a manifold on the section `{x = section_x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSection {
    pub which: ManifoldKind,
    pub section_x: f64,
    pub eps: f64,
    pub phis: Vec<f64>,
    /// `(u, u')` for every front position.
    pub curve: Vec<(f64, f64)>,
    pub in_window: Vec<bool>,
    pub forcing: Forcing,
}

impl ManifoldSection {
    /// Section point for an arbitrary front position.
    pub fn point(&self, phi: f64) -> Result<(f64, f64)> {
        section_point(&self.forcing, self.eps, self.which, self.section_x, phi)
    }
}

fn section_point(f: &Forcing, eps: f64, which: ManifoldKind, section_x: f64, phi: f64) -> Result<(f64, f64)> {
    let (o, b0) = which.base();
    let u0 = heteroclinic(o, section_x, phi);
    let p0 = heteroclinic_deriv(o, section_x, phi);
    if eps == 0.0 || f.is_zero() {
        return Ok((u0, p0));
    }
    let (u1, p1) = first_order_correction(f, phi, o, b0, section_x)?;
    Ok((u0 + eps * u1, p0 + eps * p1))
}

/// Samples the first-order manifold trace on `{x = section_x}` at `n` front positions in
/// `phi_range`.
pub fn manifold_section(
    f: &Forcing,
    eps: f64,
    which: ManifoldKind,
    section_x: f64,
    phi_range: (f64, f64),
    n: usize,
) -> Result<ManifoldSection> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid(format!("eps must lie in [0, 1), got {eps}")));
    }
    if n < 2 || !(phi_range.1 > phi_range.0) {
        return Err(Error::invalid("manifold section needs n >= 2 and an increasing phi range"));
    }
    f.validate()?;
    let phis: Vec<f64> = (0..n).map(|i| phi_range.0 + (phi_range.1 - phi_range.0) * i as f64 / (n - 1) as f64).collect();
    let curve: Vec<(f64, f64)> = phis
        .par_iter()
        .map(|&phi| section_point(f, eps, which, section_x, phi))
        .collect::<Result<_>>()?;
    let w = validity_window(eps);
    let (_, b0) = which.base();
    let in_window: Vec<bool> = phis
        .iter()
        .map(|&phi| match b0 {
            B0Choice::BoundedLeft => section_x - phi <= w,
            B0Choice::BoundedRight => phi - section_x <= w,
        })
        .collect();
    let outside = in_window.iter().filter(|b| !**b).count();
    if outside > 0 {
        log::warn!("{outside} of {n} section points lie outside the validity window of the first-order expansion");
    }
    Ok(ManifoldSection { which, section_x, eps, phis, curve, in_window, forcing: f.clone() })
}

/// Writes a section as `phi,u,p,in_window`.
pub fn write_section_csv<W: Write>(out: W, s: &ManifoldSection) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["phi", "u", "p", "in_window"])?;
    for ((phi, (u, p)), iw) in s.phis.iter().zip(&s.curve).zip(&s.in_window) {
        w.write_record([phi.to_string(), u.to_string(), p.to_string(), iw.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Transverse intersection of two section curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeIntersection {
    pub phi_a: f64,
    pub phi_b: f64,
    pub point: (f64, f64),
}

fn segment_hit(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> Option<(f64, f64)> {
    let d1 = (p2.0 - p1.0, p2.1 - p1.1);
    let d2 = (q2.0 - q1.0, q2.1 - q1.1);
    let den = d1.0 * d2.1 - d1.1 * d2.0;
    if den == 0.0 {
        return None;
    }
    let w = (q1.0 - p1.0, q1.1 - p1.1);
    let t = (w.0 * d2.1 - w.1 * d2.0) / den;
    let s = (w.0 * d1.1 - w.1 * d1.0) / den;
    ((0.0..1.0).contains(&t) && (0.0..1.0).contains(&s)).then_some((t, s))
}

/// Intersections of two section curves restricted to `u > 0.5`, where the traces of the two
/// manifolds of the `-1` state can meet away from the state itself.
pub fn lobe_intersections(a: &ManifoldSection, b: &ManifoldSection) -> Result<Vec<LobeIntersection>> {
    lobe_intersections_with(a, b, 0.5)
}

/// [`lobe_intersections`] with an explicit lower bound on `u`.
pub fn lobe_intersections_with(a: &ManifoldSection, b: &ManifoldSection, u_min: f64) -> Result<Vec<LobeIntersection>> {
    if a.section_x != b.section_x || a.eps != b.eps {
        return Err(Error::invalid("sections must share section_x and eps"));
    }
    let mut raw = Vec::new();
    for i in 0..a.curve.len() - 1 {
        if a.curve[i].0 < u_min {
            continue;
        }
        for j in 0..b.curve.len() - 1 {
            if b.curve[j].0 < u_min {
                continue;
            }
            if let Some((t, s)) = segment_hit(a.curve[i], a.curve[i + 1], b.curve[j], b.curve[j + 1]) {
                let pa = a.phis[i] + t * (a.phis[i + 1] - a.phis[i]);
                let pb = b.phis[j] + s * (b.phis[j + 1] - b.phis[j]);
                raw.push((pa, pb));
            }
        }
    }
    let mut out: Vec<LobeIntersection> = Vec::new();
    for (pa0, pb0) in raw {
        let (pa, pb) = refine_intersection(a, b, pa0, pb0).unwrap_or((pa0, pb0));
        let point = a.point(pa)?;
        if !out.iter().any(|q| (q.phi_a - pa).abs() < 1e-7 && (q.phi_b - pb).abs() < 1e-7) {
            out.push(LobeIntersection { phi_a: pa, phi_b: pb, point });
        }
    }
    out.sort_by(|x, y| x.phi_a.total_cmp(&y.phi_a));
    Ok(out)
}

/// Newton iteration on `P_a(φ_a) = P_b(φ_b)` with finite-difference tangents.
fn refine_intersection(a: &ManifoldSection, b: &ManifoldSection, mut pa: f64, mut pb: f64) -> Result<(f64, f64)> {
    let h = 1e-6;
    let (start_a, start_b) = (pa, pb);
    for _ in 0..20 {
        let qa = a.point(pa)?;
        let qb = b.point(pb)?;
        let g = (qa.0 - qb.0, qa.1 - qb.1);
        if g.0.abs().max(g.1.abs()) < 1e-13 {
            break;
        }
        let qa2 = a.point(pa + h)?;
        let qb2 = b.point(pb + h)?;
        let ta = ((qa2.0 - qa.0) / h, (qa2.1 - qa.1) / h);
        let tb = ((qb2.0 - qb.0) / h, (qb2.1 - qb.1) / h);
        let det = -ta.0 * tb.1 + ta.1 * tb.0;
        if det == 0.0 {
            return Err(Error::NotConverged("tangent section curves".into()));
        }
        let da = (-g.0 * tb.1 + g.1 * tb.0) / det;
        let db = (ta.0 * g.1 - ta.1 * g.0) / det;
        pa -= da;
        pb -= db;
        if (pa - start_a).abs() > 0.5 || (pb - start_b).abs() > 0.5 {
            return Err(Error::NotConverged("intersection refinement left the bracket".into()));
        }
        if da.abs().max(db.abs()) < 1e-12 {
            break;
        }
    }
    Ok((pa, pb))
}

/// Type of a change in the number of intersections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LobeTransition {
    SaddleNode,
    Pitchfork,
    Other,
}

/// Parameter value at which the intersection count changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeThreshold {
    pub param: f64,
    pub count_before: usize,
    pub count_after: usize,
    pub kind: LobeTransition,
}

/// Settings shared by the section computations of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionSettings {
    pub eps: f64,
    pub section_x: f64,
    /// Half-width of the sampled `φ` interval.
    pub phi_half_width: f64,
    pub n: usize,
}

impl SectionSettings {
    pub fn new(eps: f64) -> Self {
        Self { eps, section_x: 0.0, phi_half_width: 4.5, n: 400 }
    }
}

/// Intersections of the unstable and stable manifolds of the `-1` state.
pub fn homoclinic_intersections(f: &Forcing, s: SectionSettings) -> Result<Vec<LobeIntersection>> {
    let range = (-s.phi_half_width, s.phi_half_width);
    let wu = manifold_section(f, s.eps, ManifoldKind::WuMinus, s.section_x, range, s.n)?;
    let ws = manifold_section(f, s.eps, ManifoldKind::WsMinus, s.section_x, range, s.n)?;
    lobe_intersections(&wu, &ws)
}

fn classify_transition(before: &[LobeIntersection], after: &[LobeIntersection]) -> LobeTransition {
    let (old, new) = if after.len() > before.len() { (before, after) } else { (after, before) };
    if new.len() != old.len() + 2 {
        return LobeTransition::Other;
    }
    if old.is_empty() {
        return LobeTransition::SaddleNode;
    }
    let mut used = vec![false; new.len()];
    for o in old {
        if let Some((k, _)) = new
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|x, y| dist(x.1, o).total_cmp(&dist(y.1, o)))
        {
            used[k] = true;
        }
    }
    let fresh: Vec<&LobeIntersection> = new.iter().zip(&used).filter(|(_, u)| !**u).map(|(x, _)| x).collect();
    let mid = ((fresh[0].point.0 + fresh[1].point.0) / 2.0, (fresh[0].point.1 + fresh[1].point.1) / 2.0);
    let spread = ((fresh[0].point.0 - fresh[1].point.0).powi(2) + (fresh[0].point.1 - fresh[1].point.1).powi(2)).sqrt();
    let near_old = old
        .iter()
        .map(|o| ((o.point.0 - mid.0).powi(2) + (o.point.1 - mid.1).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    if near_old < 0.25 * spread.max(1e-3) {
        LobeTransition::Pitchfork
    } else {
        LobeTransition::SaddleNode
    }
}

fn dist(a: &LobeIntersection, b: &LobeIntersection) -> f64 {
    (a.point.0 - b.point.0).hypot(a.point.1 - b.point.1)
}

/// Scans a one-parameter forcing family over the monotone grid `params`, bisecting every
/// change of the homoclinic intersection count to `param_tol`.
pub fn bifurcation_scan<G>(family: G, params: &[f64], s: SectionSettings, param_tol: f64) -> Result<Vec<LobeThreshold>>
where
    G: Fn(f64) -> Forcing + Sync,
{
    if params.len() < 2 {
        return Err(Error::invalid("parameter grid needs at least two values"));
    }
    let increasing = params.windows(2).all(|w| w[1] > w[0]);
    let decreasing = params.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::invalid("parameter grid must be monotone"));
    }
    let hits = |p: f64| homoclinic_intersections(&family(p), s);
    let sampled: Vec<Vec<LobeIntersection>> = params.par_iter().map(|&p| hits(p)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for k in 0..params.len() - 1 {
        if sampled[k].len() == sampled[k + 1].len() {
            continue;
        }
        let (mut lo, mut hi) = (params[k], params[k + 1]);
        let (mut before, mut after) = (sampled[k].clone(), sampled[k + 1].clone());
        let c0 = before.len();
        while (hi - lo).abs() > param_tol {
            let mid = 0.5 * (lo + hi);
            let h = hits(mid)?;
            if h.len() == c0 {
                lo = mid;
                before = h;
            } else {
                hi = mid;
                after = h;
            }
        }
        out.push(LobeThreshold {
            param: 0.5 * (lo + hi),
            count_before: before.len(),
            count_after: after.len(),
            kind: classify_transition(&before, &after),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::Profile;
    use crate::melnikov::MelnikovFn;

    fn cos_pi(alpha1: f64) -> Forcing {
        Forcing::Canonical {
            f1: Profile::Cos { amp: alpha1, k: std::f64::consts::PI },
            f2: Profile::Const { c: 0.0 },
            f3: Profile::Const { c: 0.0 },
        }
    }

    #[test]
    fn psi_identities() {
        assert!((psi_b(1.3, 1.3) - HALF_SQRT_2).abs() < 1e-15);
        assert_eq!(v_factor(0.7, 0.7), 0.0);
        for i in 0..=160 {
            let y = -8.0 + 0.1 * i as f64;
            let w = psi_b(y, 0.0) * psi_u_deriv(y, 0.0) - psi_b_deriv(y, 0.0) * psi_u(y, 0.0);
            assert!((w - 1.0).abs() < 1e-10, "y = {y}: {w}");
        }
        let y: f64 = 15.0;
        assert!((psi_u(y, 0.0) / ((SQRT_2 * y).exp() / 8.0) - 1.0).abs() < 1e-6);
        assert!((psi_u(-y, 0.0) / (-(SQRT_2 * y).exp() / 8.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn expansion_matches_melnikov() {
        let f = cos_pi(-0.12);
        let m = MelnikovFn::quadrature(f.clone(), Orientation::Up);
        for &phi in &[-1.3, 0.0, 0.4, 2.1] {
            for b0 in [B0Choice::BoundedLeft, B0Choice::BoundedRight] {
                let e = Expansion1::new(&f, phi, Orientation::Up, b0).unwrap();
                assert!((e.melnikov_value() - m.value(phi).unwrap()).abs() < 1e-8);
                let (u1, _) = e.eval(phi).unwrap();
                let b = e.b_coef(phi).unwrap();
                assert!((u1 - b * psi_u(phi, phi)).abs() < 1e-14);
            }
        }
        let (u1, p1) = first_order_correction(&Forcing::Zero, 0.3, Orientation::Up, B0Choice::BoundedLeft, 1.0).unwrap();
        assert_eq!((u1, p1), (0.0, 0.0));
    }

    #[test]
    fn correction_solves_linear_equation() {
        let f = cos_pi(-0.1);
        let e = Expansion1::new(&f, -0.4, Orientation::Up, B0Choice::BoundedLeft).unwrap();
        let h = 1e-3;
        for &x in &[-2.0, -0.5, 0.7] {
            let (um, _) = e.eval(x - h).unwrap();
            let (u0, _) = e.eval(x).unwrap();
            let (up, _) = e.eval(x + h).unwrap();
            let uh = heteroclinic(Orientation::Up, x, -0.4);
            let lhs = (up - 2.0 * u0 + um) / (h * h) + (1.0 - 3.0 * uh * uh) * u0;
            let rhs = -eval_forcing(&f, uh, heteroclinic_deriv(Orientation::Up, x, -0.4), x);
            assert!((lhs - rhs).abs() < 1e-5, "{x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn unperturbed_section_is_the_front_trace() {
        let s = manifold_section(&cos_pi(-0.1), 0.0, ManifoldKind::WuMinus, 0.0, (-2.0, 2.0), 11).unwrap();
        for (phi, (u, p)) in s.phis.iter().zip(&s.curve) {
            assert!((u - heteroclinic(Orientation::Up, 0.0, *phi)).abs() < 1e-15);
            assert!((p - heteroclinic_deriv(Orientation::Up, 0.0, *phi)).abs() < 1e-15);
        }
    }

    #[test]
    fn stable_section_mirrors_unstable_for_even_forcing() {
        let f = cos_pi(-0.12);
        let wu = manifold_section(&f, 0.1, ManifoldKind::WuMinus, 0.0, (-3.0, 3.0), 13).unwrap();
        let ws = manifold_section(&f, 0.1, ManifoldKind::WsMinus, 0.0, (-3.0, 3.0), 13).unwrap();
        for i in 0..13 {
            let a = wu.curve[i];
            let b = ws.curve[12 - i];
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 + b.1).abs() < 1e-9, "{a:?} {b:?}");
        }
    }

    #[test]
    fn weak_forcing_has_disjoint_lobes() {
        let hits = homoclinic_intersections(&cos_pi(-0.05), SectionSettings::new(0.1)).unwrap();
        assert!(hits.is_empty());
    }
}
