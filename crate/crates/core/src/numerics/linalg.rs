//! Small dense/banded linear-algebra kernels: tridiagonal solves, banded LU with partial
//! pivoting, and Sylvester inertia of symmetric tridiagonal matrices.

use crate::error::{Error, Result};

/// Solves a tridiagonal system in place (Thomas algorithm).
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (so `lower[0]` is ignored), `upper[i]` multiplies
/// `x[i+1]` (so `upper[n-1]` is ignored). `scratch` must have length `n`.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::NotConverged("singular tridiagonal system".into()));
    }
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        if beta == 0.0 {
            return Err(Error::NotConverged("singular tridiagonal system".into()));
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

/// Square banded matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major band storage with room for pivoting fill-in: row `i` holds columns
    /// `i - kl ..= i + ku + kl`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, data: vec![0.0; n * width] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.width() || i >= self.n || j >= self.n {
            None
        } else {
            Some(i * self.width() + off as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.idx(i, j).map(|k| self.data[k]).unwrap_or(0.0)
    }

    /// Sets entry `(i, j)`; panics when `(i, j)` lies outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside band (kl = {}, ku = {})",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j).expect("index inside band");
        self.data[k] = v;
    }

    /// Adds `v` to entry `(i, j)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    /// Matrix–vector product.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut s = 0.0;
            for j in lo..=hi {
                s += self.get(i, j) * x[j];
            }
            y[i] = s;
        }
    }

    /// LU factorization with partial pivoting.
    pub fn lu(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::NotConverged(format!("singular banded matrix at column {k}")));
            }
            piv[k] = p;
            let jmax = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let a = self.get(k, j);
                    let b = self.get(p, j);
                    if let Some(ix) = self.idx(k, j) {
                        self.data[ix] = b;
                    }
                    if let Some(ix) = self.idx(p, j) {
                        self.data[ix] = a;
                    }
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last {
                let ik = self.idx(i, k).expect("band");
                let m = self.data[ik] / pivot;
                self.data[ik] = m;
                if m != 0.0 {
                    for j in k + 1..=jmax {
                        let kj = self.get(k, j);
                        if kj != 0.0 {
                            if let Some(ij) = self.idx(i, j) {
                                self.data[ij] -= m * kj;
                            }
                        }
                    }
                }
            }
        }
        Ok(BandLu { m: self, piv })
    }
}

/// Banded LU factors.
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.m.n;
        let kl = self.m.kl;
        let ku = self.m.ku;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let last = (k + kl).min(n - 1);
            for i in k + 1..=last {
                b[i] -= self.m.get(i, k) * b[k];
            }
        }
        for k in (0..n).rev() {
            let jmax = (k + ku + kl).min(n - 1);
            let mut s = b[k];
            for j in k + 1..=jmax {
                s -= self.m.get(k, j) * b[j];
            }
            b[k] = s / self.m.get(k, k);
        }
    }
}

/// Numbers of (negative, zero, positive) eigenvalues of the symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e` (`e[i]` couples `i` and `i+1`), from the signs of the
/// LDLᵀ pivots (Sylvester's law of inertia). Exact zero pivots are perturbed by a tiny amount.
pub fn symmetric_tridiagonal_inertia(d: &[f64], e: &[f64]) -> (usize, usize, usize) {
    let n = d.len();
    let scale = d.iter().chain(e.iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = scale * 1e-200;
    let mut neg = 0;
    let mut zero = 0;
    let mut pos = 0;
    let mut prev = 1.0;
    for i in 0..n {
        let mut p = d[i];
        if i > 0 {
            p -= e[i - 1] * e[i - 1] / prev;
        }
        if p == 0.0 {
            zero += 1;
            p = tiny;
        } else if p < 0.0 {
            neg += 1;
        } else {
            pos += 1;
        }
        prev = p;
    }
    (neg, zero, pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_direct() {
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let upper = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, 2.0, -1.0, 0.5];
        let mut b = [0.0; 4];
        for i in 0..4 {
            b[i] = diag[i] * x[i];
            if i > 0 {
                b[i] += lower[i] * x[i - 1];
            }
            if i < 3 {
                b[i] += upper[i] * x[i + 1];
            }
        }
        let mut s = [0.0; 4];
        solve_tridiagonal(&lower, &diag, &upper, &mut b, &mut s).unwrap();
        for i in 0..4 {
            assert!((b[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn band_lu_with_pivoting() {
        let n = 6;
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, if i % 2 == 0 { 1e-3 } else { 2.0 });
            if i > 0 {
                a.set(i, i - 1, 3.0 + i as f64);
            }
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 1.0).collect();
        let mut b = vec![0.0; n];
        a.matvec(&x, &mut b);
        let lu = a.lu().unwrap();
        lu.solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-12, "{} vs {}", b[i], x[i]);
        }
    }

    #[test]
    fn inertia_counts() {
        // diag(-1, 2, 3) with small couplings
        let (n, z, p) = symmetric_tridiagonal_inertia(&[-1.0, 2.0, 3.0], &[0.1, 0.1]);
        assert_eq!((n, z, p), (1, 0, 2));
    }
}
