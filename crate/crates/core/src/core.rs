//! Grids, fields, and the closed-form objects of the homogeneous Allen–Cahn equation
//! `U_t = U_xx + U - U^3`: the heteroclinic fronts `±tanh(√2(x-φ)/2)`, their derivative,
//! the Hamiltonian of the stationary problem and the weight `W_h`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Squared L² norm of the front derivative, `‖u_up'‖² = 2√2/3`.
pub const NORM_SQ: f64 = 2.0 * SQRT_2 / 3.0;

/// `1 / ‖u_up'‖² = 3/(2√2)`, the time-scale factor of the front interaction law.
pub const INV_NORM_SQ: f64 = 3.0 / (2.0 * SQRT_2);

/// Uniform mesh on `[x_min, x_max]` with `n` nodes; the spacing is derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::invalid(format!("grid requires x_min < x_max (got {x_min}, {x_max})")));
        }
        if n < 3 {
            return Err(Error::invalid(format!("grid requires at least 3 nodes (got {n})")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid with spacing as close as possible to `dx` (rounded to a whole number of cells).
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::invalid("grid spacing must be positive"));
        }
        let cells = ((x_max - x_min) / dx).round().max(2.0) as usize;
        Self::new(x_min, x_max, cells + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    /// Coordinate of node `i`, `x_min + i·dx`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Real-valued profile sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::invalid(format!(
                "field length {} does not match grid size {}",
                values.len(),
                grid.n()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite field value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid1D, f: F) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Grid1D, c: f64) -> Self {
        Self { grid, values: vec![c; grid.n()] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Maximum absolute difference to another field on the same grid.
    pub fn sup_distance(&self, other: &Field) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Direction of a front: `Up` connects -1 to +1, `Down` connects +1 to -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    /// +1 for `Up`, -1 for `Down`.
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Up => 1.0,
            Orientation::Down => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Up => Orientation::Down,
            Orientation::Down => Orientation::Up,
        }
    }

    /// Orientation of front `j` (zero-based) in an alternating pattern starting with `self`.
    pub fn alternate(self, j: usize) -> Self {
        if j % 2 == 0 {
            self
        } else {
            self.flip()
        }
    }
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Orientation::Up => write!(f, "up"),
            Orientation::Down => write!(f, "down"),
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "up" | "+" | "u" => Ok(Orientation::Up),
            "down" | "-" | "d" => Ok(Orientation::Down),
            _ => Err(Error::invalid(format!("unknown orientation `{s}` (expected up/down)"))),
        }
    }
}

/// `sech²(a)` evaluated without overflow.
pub fn sech2(a: f64) -> f64 {
    let e = (-2.0 * a.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Front profile `±tanh(√2(x-φ)/2)`.
pub fn heteroclinic(orientation: Orientation, x: f64, phi: f64) -> f64 {
    orientation.sign() * (SQRT_2 * (x - phi) / 2.0).tanh()
}

/// Front derivative `±(√2/2) sech²(√2(x-φ)/2)`.
pub fn heteroclinic_deriv(orientation: Orientation, x: f64, phi: f64) -> f64 {
    orientation.sign() * (SQRT_2 / 2.0) * sech2(SQRT_2 * (x - phi) / 2.0)
}

/// Second derivative of the front, `-u(1-u²)` for the up front.
pub fn heteroclinic_deriv2(orientation: Orientation, x: f64, phi: f64) -> f64 {
    let a = SQRT_2 * (x - phi) / 2.0;
    -orientation.sign() * a.tanh() * sech2(a)
}

/// Weight `W_h(y) = u²(1-u²)` with `u = tanh(y/√2)`; even, with values in `[0, 1/4]`.
pub fn weight_wh(y: f64) -> f64 {
    let e = (-SQRT_2 * y.abs()).exp();
    let om = 1.0 - e;
    let op = 1.0 + e;
    4.0 * e * om * om / (op * op * op * op)
}

/// Natural logarithm of [`weight_wh`], finite for every `y != 0`.
pub fn ln_weight_wh(y: f64) -> f64 {
    if y == 0.0 {
        return f64::NEG_INFINITY;
    }
    let e = (-SQRT_2 * y.abs()).exp();
    4f64.ln() - SQRT_2 * y.abs() + 2.0 * (-e).ln_1p() - 4.0 * e.ln_1p()
}

/// Hamiltonian `p²/2 + u²/2 - u⁴/4` of the stationary equation `u'' + u - u³ = 0`.
pub fn hamiltonian(u: f64, p: f64) -> f64 {
    0.5 * p * p + 0.5 * u * u - 0.25 * u * u * u * u
}

/// Steepness at which each tanh factor of [`multifront_profile`] is an exact front.
pub const FRONT_STEEPNESS: f64 = SQRT_2 / 2.0;

/// Checks that `positions` is strictly increasing.
pub fn check_increasing(positions: &[f64]) -> Result<()> {
    for (i, w) in positions.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonMonotonePositions { index: i + 1 });
        }
    }
    Ok(())
}

/// Alternating superposition `Σ_j s_j tanh(steepness·(x-φ_j)) + base_offset` where the signs
/// `s_j` alternate starting with `+` for `first = Up`.
pub fn multifront_profile(
    grid: &Grid1D,
    positions: &[f64],
    first: Orientation,
    steepness: f64,
    base_offset: f64,
) -> Result<Field> {
    check_increasing(positions)?;
    if !(steepness > 0.0) {
        return Err(Error::invalid("steepness must be positive"));
    }
    Ok(Field::from_fn(*grid, |x| {
        positions
            .iter()
            .enumerate()
            .map(|(j, &p)| first.alternate(j).sign() * (steepness * (x - p)).tanh())
            .sum::<f64>()
            + base_offset
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heteroclinic_examples() {
        assert_eq!(heteroclinic(Orientation::Up, 0.0, 0.0), 0.0);
        assert!((heteroclinic(Orientation::Up, SQRT_2, 0.0) - 1f64.tanh()).abs() < 1e-15);
        assert!((heteroclinic(Orientation::Up, 60.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((heteroclinic(Orientation::Down, 60.0, 0.0) + 1.0).abs() < 1e-15);
        assert!((heteroclinic_deriv(Orientation::Up, 0.0, 0.0) - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((heteroclinic_deriv(Orientation::Down, 0.0, 0.0) + SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn second_derivative_matches_equation() {
        for &x in &[-3.0, -0.7, 0.0, 0.4, 2.5] {
            let u = heteroclinic(Orientation::Up, x, 0.3);
            let upp = heteroclinic_deriv2(Orientation::Up, x, 0.3);
            assert!((upp + u - u * u * u).abs() < 1e-14);
        }
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight_wh(0.0), 0.0);
        assert!(weight_wh(60.0) < 1e-30);
        let y = (2f64.sqrt() * (1.0 / 2f64.sqrt()).atanh()).abs();
        assert!((weight_wh(y) - 0.25).abs() < 1e-14);
        for &y in &[0.1, 1.0, 3.0, 10.0] {
            let u = (y / SQRT_2).tanh();
            assert!((weight_wh(y) - u * u * (1.0 - u * u)).abs() < 1e-15);
            assert!((ln_weight_wh(y) - weight_wh(y).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(hamiltonian(1.0, 0.0), 0.25);
        assert_eq!(hamiltonian(-1.0, 0.0), 0.25);
        assert_eq!(hamiltonian(0.0, 0.0), 0.0);
    }

    #[test]
    fn profile_examples() {
        let g = Grid1D::new(-10.0, 10.0, 201).unwrap();
        let f = multifront_profile(&g, &[-4.0, 4.0], Orientation::Up, 1.0, -1.0).unwrap();
        for i in 0..g.n() {
            let x = g.x(i);
            let e = (x + 4.0).tanh() - (x - 4.0).tanh() - 1.0;
            assert!((f.values()[i] - e).abs() < 1e-15);
        }
        let c = multifront_profile(&g, &[], Orientation::Up, 1.0, -1.0).unwrap();
        assert!(c.values().iter().all(|&v| v == -1.0));
        assert!(matches!(
            multifront_profile(&g, &[1.0, 0.0], Orientation::Up, 1.0, 0.0),
            Err(Error::NonMonotonePositions { .. })
        ));
    }

    #[test]
    fn grid_nodes_exact() {
        let g = Grid1D::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.x(4), 1.0);
        assert!(Grid1D::new(1.0, 0.0, 5).is_err());
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
    }
}
