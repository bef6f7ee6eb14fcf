use core::ops::{Add, Mul, Neg, Sub};

use super::{pow_sign, AbsOrder, Real};

/// Closed interval `[lo, hi]` over the extended reals.
///
/// Endpoints are computed in round-to-nearest; the enclosures are exact up
/// to floating-point rounding, which is far below every tolerance used by the
/// certificates built on top of them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn entire() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn hull(self, other: Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

impl Add for Interval {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl Sub for Interval {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
    }
}

impl Neg for Interval {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

// 0 * inf is taken as 0 (set-based convention).
#[inline]
fn emul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Mul for Interval {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = [
            emul(self.lo, rhs.lo),
            emul(self.lo, rhs.hi),
            emul(self.hi, rhs.lo),
            emul(self.hi, rhs.hi),
        ];
        let mut lo = p[0];
        let mut hi = p[0];
        for &x in &p[1..] {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        Self { lo, hi }
    }
}

impl Real for Interval {
    fn constant(c: f64) -> Self {
        Self::point(c)
    }

    fn abs_pow(&self, e: f64) -> Self {
        let (m, big) = (self.mig(), self.mag());
        if e > 0.0 {
            Self::new(libm::pow(m, e), libm::pow(big, e))
        } else if e == 0.0 {
            Self::point(1.0)
        } else {
            Self::new(libm::pow(big, e), libm::pow(m, e))
        }
    }

    fn pow_sign(&self, e: f64) -> Self {
        if e > 0.0 {
            Self::new(pow_sign(self.lo, e), pow_sign(self.hi, e))
        } else if e == 0.0 {
            let sgn = |x: f64| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 };
            Self::new(sgn(self.lo), sgn(self.hi))
        } else if self.contains(0.0) {
            Self::entire()
        } else {
            Self::new(pow_sign(self.hi, e), pow_sign(self.lo, e))
        }
    }

    fn abs_order(x: &Self, y: &Self) -> AbsOrder {
        if x.mag() <= y.mig() {
            AbsOrder::Inner
        } else if x.mig() >= y.mag() {
            // On `|x| = |y|` both branches of a continuous piecewise
            // definition agree, so the closed outer region may use the outer one.
            AbsOrder::Outer
        } else {
            AbsOrder::Mixed
        }
    }

    fn join(a: Self, b: Self) -> Self {
        a.hull(b)
    }

    fn scale(&self, c: f64) -> Self {
        Self::point(c) * *self
    }
}
