//! The periodic rescaling `T_j v(x) = v(jx mod 1)` and the weak limits of
//! oscillating sequences.
//!
//! `x ↦ jx mod 1` preserves Lebesgue measure, so `T_j v` has the same value
//! distribution as `v` and every `∫φ(T_j v)` is independent of `j`; pairings
//! against a fixed `ψ` converge to `(∫v)(∫ψ)` at rate `1/j`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{linear_piece_integral, pair, Composable, ProfileFn, SampledProfile, ScalarMap, StepFunction};
use crate::numeric::quad::Integral;

/// Exact step representation of `T_j v`, with `j·M` pieces.
pub fn rescale(v: &StepFunction, j: u64) -> Result<StepFunction> {
    if j == 0 {
        return Err(Error::InvalidArgument("rescaling factor j must be at least 1".into()));
    }
    if j == 1 {
        return Ok(v.clone());
    }
    let m = v.pieces();
    let jf = j as f64;
    let mut breakpoints = Vec::with_capacity(j as usize * m + 1);
    let mut values = Vec::with_capacity(j as usize * m);
    for k in 0..j {
        let kf = k as f64;
        for (x, &t) in v.breakpoints()[..m].iter().zip(v.values()) {
            let b = (kf + x) / jf;
            // A piece shorter than the spacing of f64 near k/j collapses.
            if breakpoints.last().is_some_and(|&last| b <= last) {
                *values.last_mut().expect("values track breakpoints") = t;
                continue;
            }
            breakpoints.push(b);
            values.push(t);
        }
    }
    while breakpoints.len() > 1 && breakpoints[breakpoints.len() - 1] >= 1.0 {
        breakpoints.pop();
        values.pop();
    }
    breakpoints.push(1.0);
    StepFunction::new(breakpoints, values)
}

/// `⟨T_j v, ψ⟩ = ∫ T_j v · ψ`, exact.
pub fn pair_oscillated(v: &StepFunction, psi: &StepFunction, j: u64) -> Result<f64> {
    Ok(pair(&rescale(v, j)?, psi))
}

/// `∫₀¹ v`, the weak limit of `T_j v`.
pub fn weak_limit_mean(v: &StepFunction) -> f64 {
    v.mean()
}

/// `∫₀¹ φ(v(s)) ds`, the weak limit of `φ(T_j v) = T_j φ(v)`.
pub fn composition_weak_limit<F: Composable + ?Sized>(v: &F, phi: &ScalarMap) -> Result<f64> {
    Ok(v.integrate_composition(phi)?.value)
}

/// `C(v, ψ) = ‖v‖∞ ‖ψ‖∞ (M_v + M_ψ)`, for which
/// `|⟨T_j v, ψ⟩ - (∫v)(∫ψ)| <= C / j`.
pub fn decay_constant(v: &StepFunction, psi: &StepFunction) -> f64 {
    v.sup_norm() * psi.sup_norm() * (v.pieces() + psi.pieces()) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakLimitEstimate {
    pub j_list: Vec<u64>,
    pub pairings: Vec<f64>,
    pub deviations: Vec<f64>,
    pub predicted_limit: f64,
    /// Largest `|deviation|` over the last half of `j_list`.
    pub max_deviation_tail: f64,
    pub decay_constant: f64,
}

pub fn validate_j_list(j_list: &[u64]) -> Result<()> {
    if j_list.is_empty() {
        return Err(Error::InvalidArgument("j list must not be empty".into()));
    }
    if j_list[0] == 0 || j_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("j list must be strictly increasing positive integers".into()));
    }
    Ok(())
}

/// Index where the tail (last half) of a list of length `n` starts.
pub fn tail_start(n: usize) -> usize {
    n / 2
}

/// Pairings `⟨T_j v, ψ⟩` over `j_list` against the predicted limit.
pub fn convergence_table(v: &StepFunction, psi: &StepFunction, j_list: &[u64]) -> Result<WeakLimitEstimate> {
    validate_j_list(j_list)?;
    let pairings = j_list.iter().map(|&j| pair_oscillated(v, psi, j)).collect::<Result<Vec<_>>>()?;
    Ok(estimate_from_pairings(v, psi, j_list.to_vec(), pairings))
}

/// Assembles the table from pairings computed elsewhere (for example in parallel).
pub fn estimate_from_pairings(v: &StepFunction, psi: &StepFunction, j_list: Vec<u64>, pairings: Vec<f64>) -> WeakLimitEstimate {
    let predicted_limit = weak_limit_mean(v) * psi.mean();
    let deviations: Vec<f64> = pairings.iter().map(|x| x - predicted_limit).collect();
    let max_deviation_tail = deviations[tail_start(deviations.len())..].iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    WeakLimitEstimate {
        j_list,
        pairings,
        deviations,
        predicted_limit,
        max_deviation_tail,
        decay_constant: decay_constant(v, psi),
    }
}

/// `∫₀¹ f(u(x), T_j v(x)) dx` for a step `u`.
///
/// Exact when `v` is a step function. For a sampled `v` each piece of `u`
/// is reduced to whole and partial periods of `v`, which are integrated
/// cell by cell with order-8 quadrature split at `kinks(u value)`.
pub fn oscillated_integral<F, K>(u: &StepFunction, v: &ProfileFn, j: u64, f: F, kinks: K) -> Result<Integral>
where
    F: Fn(f64, f64) -> f64,
    K: Fn(f64) -> Vec<f64>,
{
    match v {
        ProfileFn::Step(v) => {
            let tv = rescale(v, j)?;
            Ok(Integral::exact(crate::funcspace::merged(u, &tv).map(|(m, a, b)| m * f(a, b)).sum()))
        }
        ProfileFn::Sampled(v) => {
            if j == 0 {
                return Err(Error::InvalidArgument("rescaling factor j must be at least 1".into()));
            }
            let jf = j as f64;
            let mut total = Integral::default();
            for (w, &uval) in u.breakpoints().windows(2).zip(u.values()) {
                let ks = kinks(uval);
                let g = |y: f64| f(uval, y);
                let whole = partial_profile_integral(v, 1.0, &ks, &g);
                let antiderivative = |y: f64| {
                    let periods = libm::floor(y);
                    let frac = y - periods;
                    let part = partial_profile_integral(v, frac, &ks, &g);
                    Integral {
                        value: periods * whole.value + part.value,
                        error: periods * whole.error + part.error,
                    }
                };
                let hi = antiderivative(w[1] * jf);
                let lo = antiderivative(w[0] * jf);
                total += Integral {
                    value: (hi.value - lo.value) / jf,
                    error: (hi.error + lo.error) / jf,
                };
            }
            Ok(total)
        }
    }
}

/// `c ↦ ∫₀^c φ(v(s)) ds` for a sampled profile, tabulated at the nodes.
///
/// Pairings `∫ ψ(x) φ(T_j v(x)) dx` against a step `ψ` reduce to differences
/// `G(j x_{k+1}) - G(j x_k)` of the periodic extension
/// `G(y) = ⌊y⌋ G(1) + G(y - ⌊y⌋)`, so the cost does not grow with `j`.
pub struct CompositionPrimitive<'a> {
    profile: &'a SampledProfile,
    phi: &'a ScalarMap,
    kinks: Vec<f64>,
    prefix: Vec<Integral>,
}

impl<'a> CompositionPrimitive<'a> {
    pub fn new(profile: &'a SampledProfile, phi: &'a ScalarMap) -> Result<Self> {
        phi.validate()?;
        let kinks = phi.kinks();
        let s = profile.nodes();
        let v = profile.samples();
        let mut prefix = Vec::with_capacity(s.len());
        let mut acc = Integral::default();
        prefix.push(acc);
        for i in 0..s.len() - 1 {
            acc += linear_piece_integral(s[i], s[i + 1], v[i], v[i + 1], &kinks, |t| phi.eval(t));
            prefix.push(acc);
        }
        Ok(Self { profile, phi, kinks, prefix })
    }

    pub fn total(&self) -> Integral {
        self.prefix[self.prefix.len() - 1]
    }

    /// `∫₀^c φ(v)` for `c ∈ [0, 1]`.
    pub fn at(&self, c: f64) -> Integral {
        let s = self.profile.nodes();
        let v = self.profile.samples();
        let c = c.clamp(0.0, 1.0);
        let i = s.partition_point(|&x| x <= c).clamp(1, s.len()) - 1;
        if i + 1 >= s.len() || c == s[i] {
            return self.prefix[i];
        }
        let vc = v[i] + (c - s[i]) / (s[i + 1] - s[i]) * (v[i + 1] - v[i]);
        self.prefix[i] + linear_piece_integral(s[i], c, v[i], vc, &self.kinks, |t| self.phi.eval(t))
    }

    fn periodic(&self, y: f64) -> Integral {
        let periods = libm::floor(y);
        let whole = self.total();
        let part = self.at(y - periods);
        Integral {
            value: periods * whole.value + part.value,
            error: periods * whole.error + part.error,
        }
    }

    /// `∫₀¹ ψ(x) φ(T_j v(x)) dx`.
    pub fn pairing(&self, psi: &StepFunction, j: u64) -> Result<Integral> {
        if j == 0 {
            return Err(Error::InvalidArgument("rescaling factor j must be at least 1".into()));
        }
        let jf = j as f64;
        let mut total = Integral::default();
        for (w, &c) in psi.breakpoints().windows(2).zip(psi.values()) {
            let hi = self.periodic(w[1] * jf);
            let lo = self.periodic(w[0] * jf);
            total += Integral {
                value: c * (hi.value - lo.value) / jf,
                error: c.abs() * (hi.error + lo.error) / jf,
            };
        }
        Ok(total)
    }
}

/// `∫₀¹ ψ φ(T_j v)` for each `j`: exact for a step `v`, via
/// [`CompositionPrimitive`] for a sampled one.
pub fn oscillated_pairings(v: &ProfileFn, psi: &StepFunction, phi: &ScalarMap, j_list: &[u64]) -> Result<Vec<Integral>> {
    validate_j_list(j_list)?;
    match v {
        ProfileFn::Step(step) => {
            let composed = step.map(phi);
            j_list.iter().map(|&j| Ok(Integral::exact(pair_oscillated(&composed, psi, j)?))).collect()
        }
        ProfileFn::Sampled(profile) => {
            let primitive = CompositionPrimitive::new(profile, phi)?;
            j_list.iter().map(|&j| primitive.pairing(psi, j)).collect()
        }
    }
}

/// `lo, 2lo, 4lo, …` up to `hi`.
pub fn geometric_j_list(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if lo == 0 || hi < lo {
        return Err(Error::InvalidArgument(format!("geometric j range {lo}:{hi} needs 1 <= lo <= hi")));
    }
    let mut out = Vec::new();
    let mut j = lo;
    while j <= hi {
        out.push(j);
        match j.checked_mul(2) {
            Some(n) => j = n,
            None => break,
        }
    }
    Ok(out)
}

/// `∫₀^c g(v(s)) ds` for `c ∈ [0, 1]`.
fn partial_profile_integral<G: Fn(f64) -> f64>(v: &SampledProfile, c: f64, kinks: &[f64], g: &G) -> Integral {
    let s = v.nodes();
    let vals = v.samples();
    let mut total = Integral::default();
    if c <= 0.0 {
        return total;
    }
    for i in 0..s.len() - 1 {
        let (s0, s1) = (s[i], s[i + 1]);
        if s0 >= c {
            break;
        }
        let end = s1.min(c);
        let v_end = if end < s1 { vals[i] + (end - s0) / (s1 - s0) * (vals[i + 1] - vals[i]) } else { vals[i + 1] };
        total += linear_piece_integral(s0, end, vals[i], v_end, kinks, g);
    }
    total
}
