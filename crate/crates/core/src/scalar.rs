//! Number types the IFS code is generic over: exact field elements and plain
//! floats with a collision tolerance.

use std::cmp::Ordering;
use std::fmt;

use crate::algebraic::{AlgebraicError, RingElement};

/// A float approximation with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx {
    pub mid: f64,
    pub err: f64,
}

/// How float approximations may be used to decide order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    /// Approximations carry rigorous error bounds; undecided comparisons must
    /// fall back to exact arithmetic.
    Certified,
    /// Values within the tolerance are declared equal.
    Collision(f64),
}

impl Tolerance {
    /// Orders two approximations, or `None` when only exact arithmetic can
    /// tell.
    #[inline]
    pub fn decide(self, a: Approx, b: Approx) -> Option<Ordering> {
        let diff = a.mid - b.mid;
        match self {
            Tolerance::Certified => {
                if diff.abs() > a.err + b.err {
                    Some(if diff > 0.0 { Ordering::Greater } else { Ordering::Less })
                } else {
                    None
                }
            }
            Tolerance::Collision(eps) => Some(if diff.abs() < eps {
                Ordering::Equal
            } else if diff > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }),
        }
    }
}

pub trait Scalar: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, AlgebraicError>;
    fn compare(&self, rhs: &Self) -> Ordering;
    fn approx(&self) -> Approx;
    fn tolerance(&self) -> Tolerance;

    /// Value for reporting.
    fn to_f64(&self) -> f64 {
        self.approx().mid
    }

    fn is_exact(&self) -> bool {
        self.tolerance() == Tolerance::Certified
    }

    fn signum(&self) -> Ordering {
        self.compare(&self.zero_like())
    }

    fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    fn min_of(&self, rhs: &Self) -> Self {
        if self.compare(rhs) == Ordering::Greater {
            rhs.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(&self, rhs: &Self) -> Self {
        if self.compare(rhs) == Ordering::Less {
            rhs.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for RingElement {
    fn zero_like(&self) -> Self {
        self.parameter().integer(0)
    }
    fn one_like(&self) -> Self {
        self.parameter().integer(1)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, AlgebraicError> {
        self.inverse()
    }
    fn compare(&self, rhs: &Self) -> Ordering {
        RingElement::compare(self, rhs)
    }
    fn approx(&self) -> Approx {
        let mid = self.to_float(1e-24);
        Approx { mid, err: 1e-24 + mid.abs() * f64::EPSILON }
    }
    fn tolerance(&self) -> Tolerance {
        Tolerance::Certified
    }
    fn signum(&self) -> Ordering {
        RingElement::signum(self)
    }
}

pub const DEFAULT_COLLISION_EPS: f64 = 1e-9;

/// A float whose equality test is `|a - b| < eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatScalar {
    pub value: f64,
    pub eps: f64,
}

impl FloatScalar {
    pub fn new(value: f64, eps: f64) -> Self {
        Self { value, eps }
    }

    fn with(&self, value: f64) -> Self {
        Self { value, eps: self.eps }
    }
}

impl fmt::Display for FloatScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Scalar for FloatScalar {
    fn zero_like(&self) -> Self {
        self.with(0.0)
    }
    fn one_like(&self) -> Self {
        self.with(1.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.with(self.value + rhs.value)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.with(self.value - rhs.value)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.with(self.value * rhs.value)
    }
    fn neg(&self) -> Self {
        self.with(-self.value)
    }
    fn inv(&self) -> Result<Self, AlgebraicError> {
        if self.value == 0.0 {
            Err(AlgebraicError::DivisionByZero)
        } else {
            Ok(self.with(1.0 / self.value))
        }
    }
    fn compare(&self, rhs: &Self) -> Ordering {
        self.tolerance()
            .decide(self.approx(), rhs.approx())
            .expect("collision tolerance always decides")
    }
    fn approx(&self) -> Approx {
        Approx { mid: self.value, err: 0.0 }
    }
    fn tolerance(&self) -> Tolerance {
        Tolerance::Collision(self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collision_equality() {
        let a = FloatScalar::new(1.0, 1e-9);
        let b = FloatScalar::new(1.0 + 1e-12, 1e-9);
        assert_eq!(a.compare(&b), Ordering::Equal);
        assert_eq!(a.compare(&FloatScalar::new(1.1, 1e-9)), Ordering::Less);
    }

    #[test]
    fn certified_undecided_when_close() {
        let a = Approx { mid: 1.0, err: 1e-15 };
        let b = Approx { mid: 1.0 + 1e-16, err: 1e-15 };
        assert_eq!(Tolerance::Certified.decide(a, b), None);
        let c = Approx { mid: 2.0, err: 1e-15 };
        assert_eq!(Tolerance::Certified.decide(a, c), Some(Ordering::Less));
    }
}
