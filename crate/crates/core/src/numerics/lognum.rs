//! Signed numbers stored as `sign * exp(ln)`, for quantities far outside the `f64` range
//! (exponentially small tail forces and interactions between widely separated fronts).

use std::ops::{Mul, Neg};

/// `sign * exp(ln)` with `sign` in {-1, 0, 1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNum {
    pub sign: f64,
    pub ln: f64,
}

impl LogNum {
    pub const ZERO: LogNum = LogNum { sign: 0.0, ln: f64::NEG_INFINITY };

    pub fn new(sign: f64, ln: f64) -> Self {
        if sign == 0.0 || ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign: sign.signum(), ln }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { sign: x.signum(), ln: x.abs().ln() }
        }
    }

    /// `exp(ln)` with the sign applied; underflows to zero or overflows to infinity.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln.exp()
        }
    }

    /// Value divided by `exp(scale_ln)`, i.e. the number expressed in units of `exp(scale_ln)`.
    pub fn scaled(self, scale_ln: f64) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * (self.ln - scale_ln).exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0.0
    }

    /// Multiplies by a positive `exp(a)`.
    pub fn mul_exp(self, a: f64) -> Self {
        Self::new(self.sign, self.ln + a)
    }

    /// Sum of several terms without overflow or premature underflow.
    pub fn sum(terms: &[LogNum]) -> LogNum {
        let m = terms.iter().filter(|t| !t.is_zero()).map(|t| t.ln).fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let s: f64 = terms.iter().map(|t| t.scaled(m)).sum();
        if s == 0.0 {
            Self::ZERO
        } else {
            Self { sign: s.signum(), ln: m + s.abs().ln() }
        }
    }
}

impl Mul for LogNum {
    type Output = LogNum;
    fn mul(self, rhs: LogNum) -> LogNum {
        LogNum::new(self.sign * rhs.sign, self.ln + rhs.ln)
    }
}

impl Mul<f64> for LogNum {
    type Output = LogNum;
    fn mul(self, rhs: f64) -> LogNum {
        self * LogNum::from_f64(rhs)
    }
}

impl Neg for LogNum {
    type Output = LogNum;
    fn neg(self) -> LogNum {
        LogNum { sign: -self.sign, ln: self.ln }
    }
}
