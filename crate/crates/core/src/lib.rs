//! Numerical laboratory for Brezis–Lieb defects of weakly convergent
//! sequences on `[0, 1]` without pointwise convergence.
//!
//! The crate is `no_std` (with `alloc`). It provides:
//!
//! * [`funcspace`]: step functions, sampled monotone profiles, and exact or
//!   quadrature integration of compositions `φ(f)`;
//! * [`oscillate`]: the periodic rescaling `T_j v(x) = v(jx mod 1)` and the
//!   weak limits of oscillating compositions;
//! * [`inequality`]: evaluation and grid certification of the pointwise
//!   residuals behind the inequality form of the lemma;
//! * [`counterex`]: construction of profiles with vanishing moments and a
//!   negative defect for `p < 3`;
//! * [`defect`]: defect series `D_j` and the exact identities at `p = 2, 4`.
//!
//! Only Lebesgue measure on `[0, 1]` is modelled. On `ℓ^p` with counting
//! measure weak convergence already implies pointwise convergence, so the
//! counterexamples built here have no analogue there.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod counterex;
pub mod defect;
mod error;
pub mod funcspace;
pub mod inequality;
pub mod numeric;
pub mod oscillate;
pub mod pointwise;

pub use error::{Error, Result};
pub use funcspace::{Composable, Growth, ProfileFn, SampledProfile, ScalarMap, StepFunction};
pub use numeric::quad::Integral;
