//! Closed forms of the pointwise quantities, generic over [`Real`] so that
//! the same expression is evaluated at points, over intervals, and on jets.
//!
//! `|t|^{p-2} t` is always formed as `|t|^{p-1} sign(t)`, which is continuous
//! at `t = 0` for every `p > 1`.

use serde::{Deserialize, Serialize};

use crate::numeric::Real;

/// `F_p(t) = |1+t|^p - 1 - |t|^p`.
pub fn f_p<T: Real>(p: f64, t: T) -> T {
    (T::constant(1.0) + t.clone()).abs_pow(p) - T::constant(1.0) - t.abs_pow(p)
}

/// Residual of the elementary inequality:
/// `g_p(t) = |1+t|^p - 1 - |t|^p - p|t|^{p-2}t - pt`.
pub fn g_p<T: Real>(p: f64, t: T) -> T {
    f_p(p, t.clone()) - t.pow_sign(p - 1.0).scale(p) - t.scale(p)
}

/// `Φ_p(t) = pt` for `|t| <= 1`, `p|t|^{p-2}t` otherwise.
pub fn phi_p<T: Real>(p: f64, t: T) -> T {
    let inner = t.scale(p);
    let outer = t.pow_sign(p - 1.0).scale(p);
    T::select_abs_le(&t, &T::constant(1.0), inner, outer)
}

/// Vector residual in the angle variable `θ = cos∠(u, w)`:
/// `|1+t²+2tθ|^{p/2} - 1 - |t|^p - p|t|^{p-2}tθ - ptθ`.
pub fn fvec_p<T: Real>(p: f64, t: T, theta: T) -> T {
    let q = T::constant(1.0) + t.clone() * t.clone() + (t.clone() * theta.clone()).scale(2.0);
    q.abs_pow(0.5 * p) - T::constant(1.0) - t.abs_pow(p) - (t.pow_sign(p - 1.0) * theta.clone()).scale(p)
        - (t * theta).scale(p)
}

/// `|s+t|^p - |s|^p - |t|^p`, the pointwise defect integrand.
pub fn pair_defect<T: Real>(p: f64, s: T, t: T) -> T {
    (s.clone() + t.clone()).abs_pow(p) - s.abs_pow(p) - t.abs_pow(p)
}

/// Which reading of the two-branch weight `Ψ(s, t)` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiVariant {
    /// `|s|^{p-1} t` for `|t| <= |s|`, `|s| |t|^{p-2} t` otherwise.
    AsPrinted,
    /// `|s|^p Φ_p(t/s)`: `p|s|^{p-2}s t` for `|t| <= |s|`, `p s |t|^{p-2} t`
    /// otherwise.
    SignCorrected,
}

/// The weight `Ψ(s, t)`, continuous across `|t| = |s|` in both variants.
pub fn psi_p<T: Real>(p: f64, variant: PsiVariant, s: T, t: T) -> T {
    match variant {
        PsiVariant::AsPrinted => {
            let inner = s.abs_pow(p - 1.0) * t.clone();
            let outer = s.abs_pow(1.0) * t.pow_sign(p - 1.0);
            T::select_abs_le(&t, &s, inner, outer)
        }
        PsiVariant::SignCorrected => {
            let inner = (s.pow_sign(p - 1.0) * t.clone()).scale(p);
            let outer = (s.clone() * t.pow_sign(p - 1.0)).scale(p);
            T::select_abs_le(&t, &s, inner, outer)
        }
    }
}
