//! Small numeric kernels shared by the analysis modules: interval and jet
//! arithmetic, fixed-order quadrature, one-dimensional and simplex search,
//! and a dense linear program solver.

mod interval;
mod jet;
pub mod linalg;
pub mod lp;
pub mod quad;
pub mod search;

pub use interval::Interval;
pub use jet::Jet;

use core::ops::{Add, Mul, Neg, Sub};

/// `|x|^e`.
#[inline]
pub fn abs_pow(x: f64, e: f64) -> f64 {
    libm::pow(x.abs(), e)
}

/// `|x|^e * sign(x)`, with `sign(0) = 0`.
#[inline]
pub fn pow_sign(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        if e < 0.0 {
            f64::NAN
        } else {
            0.0
        }
    } else {
        libm::copysign(libm::pow(x.abs(), e), x)
    }
}

/// Outcome of comparing `|x|` against `|y|` over possibly extended values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsOrder {
    /// `|x| <= |y|` everywhere.
    Inner,
    /// `|x| >= |y|` everywhere.
    Outer,
    /// Both cases occur.
    Mixed,
}

/// Arithmetic needed to evaluate the pointwise residuals generically over
/// plain floats, intervals, and second-order jets.
pub trait Real:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    fn abs_pow(&self, e: f64) -> Self;
    fn pow_sign(&self, e: f64) -> Self;
    fn abs_order(x: &Self, y: &Self) -> AbsOrder;
    /// Enclosure of two branches of a piecewise definition.
    fn join(a: Self, b: Self) -> Self;

    fn scale(&self, c: f64) -> Self {
        Self::constant(c) * self.clone()
    }

    /// `inner` where `|x| <= |y|`, `outer` elsewhere.
    fn select_abs_le(x: &Self, y: &Self, inner: Self, outer: Self) -> Self {
        match Self::abs_order(x, y) {
            AbsOrder::Inner => inner,
            AbsOrder::Outer => outer,
            AbsOrder::Mixed => Self::join(inner, outer),
        }
    }
}

impl Real for f64 {
    #[inline]
    fn constant(c: f64) -> Self {
        c
    }
    #[inline]
    fn abs_pow(&self, e: f64) -> Self {
        abs_pow(*self, e)
    }
    #[inline]
    fn pow_sign(&self, e: f64) -> Self {
        pow_sign(*self, e)
    }
    #[inline]
    fn abs_order(x: &Self, y: &Self) -> AbsOrder {
        if x.abs() <= y.abs() {
            AbsOrder::Inner
        } else {
            AbsOrder::Outer
        }
    }
    fn join(a: Self, _b: Self) -> Self {
        a
    }
    #[inline]
    fn scale(&self, c: f64) -> Self {
        c * self
    }
}

/// `n` equally spaced points covering `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> alloc::vec::Vec<f64> {
    match n {
        0 => alloc::vec::Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            let mut out: alloc::vec::Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            out[n - 1] = hi;
            out
        }
    }
}
