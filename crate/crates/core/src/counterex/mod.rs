//! Profiles `v` with `∫v = ∫|v|^{p-2}v = 0` and `∫F_p(v) < 0`.
//!
//! For such a `v` the oscillating sequence `T_j v` converges weakly to 0
//! together with `|T_j v|^{p-2}T_j v`, while with `u = 1` the defect
//! `D_j = ∫F_p(T_j v) = ∫F_p(v)` stays negative, so the Brezis–Lieb splitting
//! fails in the direction of a negative remainder.
//!
//! Two routes build `v`:
//!
//! * [`search_step_profile`] optimises directly over step functions with a
//!   few levels, eliminating measures from the constraints;
//! * [`ode_counterexample`] designs a density `ψ >= 1` with the two moments
//!   zero and `∫F_p ψ < 0`, then integrates `v' = γ/ψ(v)` so that the
//!   distribution of `v` has density `ψ/γ`.
//!
//! At `p = 2` the objective `F_2(t) = 2t` is a multiple of the first
//! constraint, so no witness exists; that case is rejected up front.

pub mod density;
pub mod ode;
mod step;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use density::{design_density, DensityDesign, DesignOutcome, DEFAULT_RATIO_BOUND};
pub use ode::{pushforward_moment, solve_profile_ode, OdeSolution};
pub use step::StepSearchOptions;

use crate::defect::{defect_series, tail_check, DefectSeries, TailCheck};
use crate::error::{require_p_above_one, Error, Result};
use crate::funcspace::{Composable, ProfileFn, ScalarMap, StepFunction};
use crate::numeric::quad::Integral;
use crate::oscillate::{geometric_j_list, oscillated_pairings, validate_j_list};

/// Constraint and objective data of the search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    pub p: f64,
    /// Tolerance on both moments.
    pub eps_mom: f64,
    /// Required margin: the objective must be at most `-margin`.
    pub margin: f64,
    /// Profiles take values in `[-range, range]`.
    pub range: f64,
}

impl MomentSpec {
    pub const DEFAULT_EPS_MOM: f64 = 1e-8;
    pub const DEFAULT_MARGIN: f64 = 1e-3;
    pub const DEFAULT_RANGE: f64 = 10.0;

    pub fn new(p: f64) -> Result<Self> {
        Self::with_parameters(p, Self::DEFAULT_EPS_MOM, Self::DEFAULT_MARGIN, Self::DEFAULT_RANGE)
    }

    pub fn with_parameters(p: f64, eps_mom: f64, margin: f64, range: f64) -> Result<Self> {
        require_p_above_one(p)?;
        if p == 2.0 {
            return Err(Error::LinearDependence { p });
        }
        for (name, x) in [("eps_mom", eps_mom), ("margin", margin), ("range", range)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} = {x} must be positive and finite")));
            }
        }
        Ok(Self { p, eps_mom, margin, range })
    }

    /// `t`.
    pub fn first_map(&self) -> ScalarMap {
        ScalarMap::Identity
    }

    /// `|t|^{p-2} t`.
    pub fn second_map(&self) -> ScalarMap {
        ScalarMap::PowerSign { q: self.p - 1.0 }
    }

    /// `F_p`.
    pub fn objective_map(&self) -> ScalarMap {
        ScalarMap::FP { p: self.p }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Step,
    Ode,
}

/// Defect series with `u = 1`, compared with its limit `∫F_p(v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectSummary {
    pub j_list: Vec<u64>,
    pub values: Vec<f64>,
    pub theoretical_limit: f64,
    pub max_abs_deviation: f64,
    /// Largest quadrature error among the entries and the limit.
    pub error_bound: f64,
}

impl DefectSummary {
    fn from_series(series: &DefectSeries) -> Self {
        let error_bound = series.errors.iter().copied().fold(series.theoretical_limit_error, f64::max);
        Self {
            j_list: series.j_list.clone(),
            values: series.values.clone(),
            theoretical_limit: series.theoretical_limit,
            max_abs_deviation: series.deviations.iter().fold(0.0f64, |m, d| m.max(d.abs())),
            error_bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchDetails {
    pub levels: usize,
    pub seed: u64,
    /// Levels left with positive measure (the optimum may sit on a face
    /// where one measure vanishes).
    pub effective_levels: usize,
}

/// `γ⁻¹∫φψ` against `∫φ(v)` for one map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushforwardRow {
    pub map: ScalarMap,
    pub pushforward: Integral,
    pub direct: Integral,
    /// Quadrature errors of both sides, the modulus of `φ` at the profile's
    /// L¹ error, the shooting error in `γ` and rounding.
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeDetails {
    pub design: DesignOutcome,
    pub gamma: f64,
    pub n_steps: usize,
    pub endpoint_residual: f64,
    pub bisection_steps: usize,
    pub endpoint_map_monotone: bool,
    pub l1_error: f64,
    pub pushforward: Vec<PushforwardRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub spec: MomentSpec,
    pub route: Route,
    pub profile: ProfileFn,
    /// `∫v`.
    pub moment1: f64,
    /// `∫|v|^{p-2}v`.
    pub moment2: f64,
    /// Error bounds on both moments (0 for step profiles).
    pub moment_errors: [f64; 2],
    /// `∫F_p(v)`.
    pub objective: f64,
    pub objective_error: f64,
    pub defect_check: DefectSummary,
    pub verdict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchDetails>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<OdeDetails>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Witness(alloc::boxed::Box<CounterexampleReport>),
    /// No profile met the constraints and the margin. `best_objective` is
    /// the best feasible value seen, if any.
    NoWitness { best_objective: Option<f64>, reason: String },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&CounterexampleReport> {
        match self {
            SearchOutcome::Witness(r) => Some(r),
            SearchOutcome::NoWitness { .. } => None,
        }
    }
}

/// Moments, objective, defect series and verdict of a profile.
pub fn assess_profile(spec: &MomentSpec, route: Route, profile: ProfileFn, j_list: &[u64]) -> Result<CounterexampleReport> {
    let l1 = profile.error_l1();
    let bound = spec.range;
    let with_modulus = |phi: &ScalarMap| -> Result<(f64, f64)> {
        let i = profile.integrate_composition(phi)?;
        let extra = if l1 > 0.0 { phi.modulus(-bound, bound, l1) } else { 0.0 };
        Ok((i.value, i.error + extra))
    };
    let (moment1, e1) = with_modulus(&spec.first_map())?;
    let (moment2, e2) = with_modulus(&spec.second_map())?;
    let (objective, objective_error) = with_modulus(&spec.objective_map())?;
    let series = defect_series(&StepFunction::constant(1.0), &profile, spec.p, j_list)?;
    let defect_check = DefectSummary::from_series(&series);
    let verdict = moment1.abs() <= spec.eps_mom + e1
        && moment2.abs() <= spec.eps_mom + e2
        && objective + objective_error <= -spec.margin;
    Ok(CounterexampleReport {
        spec: *spec,
        route,
        profile,
        moment1,
        moment2,
        moment_errors: [e1, e2],
        objective,
        objective_error,
        defect_check,
        verdict,
        search: None,
        ode: None,
    })
}

/// Default `j` values for the defect series in reports: `1, 2, …, 1024`.
pub fn default_j_list() -> Vec<u64> {
    geometric_j_list(1, 1024).expect("fixed range is valid")
}

/// Searches step profiles with `opts.levels` levels in `[-a, a]`.
///
/// Deterministic given `opts.seed`. Returns [`SearchOutcome::NoWitness`]
/// unless the best profile meets both moment tolerances and the margin.
pub fn search_step_profile(spec: &MomentSpec, opts: &StepSearchOptions) -> Result<SearchOutcome> {
    if opts.levels < 3 {
        return Err(Error::InvalidArgument(format!(
            "levels = {} is too few: two moment conditions and the mass leave no freedom below 3 levels",
            opts.levels
        )));
    }
    if opts.starts == 0 || opts.max_evals == 0 {
        return Err(Error::InvalidArgument("search needs at least one start and a positive evaluation budget".into()));
    }
    let Some(candidate) = step::search(spec, opts) else {
        return Ok(SearchOutcome::NoWitness {
            best_objective: None,
            reason: "the search did not end at a profile with nonnegative measures".into(),
        });
    };
    let profile = StepFunction::from_levels(&candidate.levels, &candidate.measures)?;
    let mut report = assess_profile(spec, Route::Step, profile.into(), &default_j_list())?;
    report.search = Some(SearchDetails {
        levels: opts.levels,
        seed: opts.seed,
        effective_levels: step::effective_levels(&candidate),
    });
    if report.verdict {
        Ok(SearchOutcome::Witness(alloc::boxed::Box::new(report)))
    } else {
        Ok(SearchOutcome::NoWitness {
            best_objective: Some(report.objective),
            reason: format!(
                "best profile has moments ({:e}, {:e}) and ∫F_p(v) = {:e}; needs |moments| <= {:e} and ∫F_p(v) <= -{:e}",
                report.moment1, report.moment2, report.objective, spec.eps_mom, spec.margin
            ),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    /// Geometric hats per side of 0.
    pub basis_size: usize,
    pub ratio_bound: f64,
    pub n_steps: usize,
    pub gamma_tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            basis_size: 40,
            ratio_bound: DEFAULT_RATIO_BOUND,
            n_steps: ode::DEFAULT_STEPS,
            gamma_tol: ode::DEFAULT_GAMMA_TOL,
        }
    }
}

/// Designs `ψ`, integrates the profile ODE and assesses the result.
pub fn ode_counterexample(spec: &MomentSpec, opts: &OdeOptions) -> Result<SearchOutcome> {
    let design = match design_density(spec, spec.range, opts.basis_size, opts.ratio_bound) {
        Ok(d) => d,
        Err(Error::Design(reason)) => {
            return Ok(SearchOutcome::NoWitness { best_objective: None, reason });
        }
        Err(e) => return Err(e),
    };
    let sol = solve_profile_ode(&design.density, opts.n_steps, opts.gamma_tol)?;
    let profile = ProfileFn::Sampled(sol.profile.clone());
    let pushforward = [spec.first_map(), spec.second_map(), spec.objective_map(), ScalarMap::Constant { c: 1.0 }]
        .into_iter()
        .map(|map| pushforward_row(&design.density, &sol, &profile, spec.range, map))
        .collect::<Result<Vec<_>>>()?;
    let mut report = assess_profile(spec, Route::Ode, profile, &default_j_list())?;
    let consistent = pushforward.iter().all(|r| r.ok) && sol.endpoint_map_monotone;
    report.verdict &= consistent;
    report.ode = Some(OdeDetails {
        design,
        gamma: sol.gamma,
        n_steps: sol.n_steps,
        endpoint_residual: sol.endpoint_residual,
        bisection_steps: sol.bisection_steps,
        endpoint_map_monotone: sol.endpoint_map_monotone,
        l1_error: sol.l1_error,
        pushforward,
    });
    if report.verdict {
        Ok(SearchOutcome::Witness(alloc::boxed::Box::new(report)))
    } else {
        Ok(SearchOutcome::NoWitness {
            best_objective: Some(report.objective),
            reason: format!(
                "ODE profile has moments ({:e}, {:e}) ± ({:e}, {:e}), ∫F_p(v) = {:e} ± {:e}, pushforward consistent: {consistent}",
                report.moment1, report.moment2, report.moment_errors[0], report.moment_errors[1], report.objective, report.objective_error
            ),
        })
    }
}

pub fn pushforward_row(density: &DensityDesign, sol: &OdeSolution, profile: &ProfileFn, range: f64, map: ScalarMap) -> Result<PushforwardRow> {
    let pushforward = pushforward_moment(density, sol.gamma, &map)?;
    let direct = profile.integrate_composition(&map)?;
    // γ is known to |v(1) - a|·ψ(a) (the endpoint map has slope 1/ψ(a)),
    // which rescales the pushforward by the same relative amount.
    let gamma_rel = sol.endpoint_residual.abs() * density.eval(density.a) / sol.gamma;
    let rounding = 64.0 * f64::EPSILON * (pushforward.value.abs() + direct.value.abs());
    let bound = pushforward.error
        + direct.error
        + map.modulus(-range, range, sol.l1_error)
        + gamma_rel * pushforward.value.abs()
        + rounding;
    let ok = (pushforward.value - direct.value).abs() <= bound;
    Ok(PushforwardRow {
        map,
        pushforward,
        direct,
        bound,
        ok,
    })
}

/// Pairings of `φ(T_j v)` against one test weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightPairings {
    pub weight: StepFunction,
    pub pairings: Vec<f64>,
    pub errors: Vec<f64>,
    /// `(∫φ(v))(∫ψ)`.
    pub predicted_limit: f64,
    /// Tail rule applied to the deviations from `predicted_limit`.
    pub tail: TailCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub j_list: Vec<u64>,
    pub first: Vec<WeightPairings>,
    pub second: Vec<WeightPairings>,
    /// `T_j v ⇀ 0`: every pairing converges to `(∫v)(∫ψ)` by the tail rule,
    /// and `|∫v|` is within tolerance.
    pub first_vanishes: bool,
    /// `|T_j v|^{p-2}T_j v ⇀ 0`.
    pub second_vanishes: bool,
    pub defect: DefectSeries,
    /// `|D_j - ∫F_p(v)|` within the quadrature error for every `j`.
    pub defect_matches_limit: bool,
    /// `∫F_p(v)` plus its error is negative.
    pub defect_negative: bool,
    pub verdict: bool,
}

/// Rounding allowance for `D_j = ∫F_p(v)`: the exact step sums run over
/// `j·M` pieces with integrands of size `|v|^p`, so the result, a small
/// difference, carries absolute rounding well above machine precision.
pub const DEFECT_MATCH_TOL: f64 = 1e-9;

/// Fixed step weights for the weak-convergence checks.
pub fn test_weights() -> Vec<StepFunction> {
    let golden = 0.618_033_988_749_894_9;
    [
        (alloc::vec![0.0, 0.5, 1.0], alloc::vec![1.0, 0.0]),
        (alloc::vec![0.0, 1.0 / 3.0, 1.0], alloc::vec![1.0, 0.0]),
        (alloc::vec![0.0, 0.25, 0.75, 1.0], alloc::vec![0.0, 1.0, 0.0]),
        (alloc::vec![0.0, 0.3, 0.7, 1.0], alloc::vec![1.0, -2.0, 0.5]),
        (alloc::vec![0.0, golden, 1.0], alloc::vec![1.0, 0.0]),
    ]
    .into_iter()
    .map(|(b, v)| StepFunction::new(b, v).expect("fixed weights are valid"))
    .collect()
}

/// Rechecks a report from scratch along the oscillating sequence `T_j v`.
pub fn verify_counterexample(report: &CounterexampleReport, j_list: &[u64]) -> Result<Verification> {
    validate_j_list(j_list)?;
    let spec = &report.spec;
    let profile = &report.profile;
    let weights = test_weights();
    let l1 = profile.error_l1();
    let pairings_for = |phi: &ScalarMap| -> Result<(Vec<WeightPairings>, bool)> {
        let moment = profile.integrate_composition(phi)?;
        let moment_bound = spec.eps_mom + moment.error + if l1 > 0.0 { phi.modulus(-spec.range, spec.range, l1) } else { 0.0 };
        let mut rows = Vec::with_capacity(weights.len());
        for w in &weights {
            let entries = oscillated_pairings(profile, w, phi, j_list)?;
            let pairings: Vec<f64> = entries.iter().map(|i| i.value).collect();
            let errors: Vec<f64> = entries.iter().map(|i| i.error).collect();
            let predicted_limit = moment.value * w.mean();
            let deviations: Vec<f64> = pairings.iter().map(|x| x - predicted_limit).collect();
            let tail = tail_check(j_list, &deviations);
            rows.push(WeightPairings {
                weight: w.clone(),
                pairings,
                errors,
                predicted_limit,
                tail,
            });
        }
        let vanishes = moment.value.abs() <= moment_bound && rows.iter().all(|r| r.tail.ok);
        Ok((rows, vanishes))
    };
    let (first, first_vanishes) = pairings_for(&spec.first_map())?;
    let (second, second_vanishes) = pairings_for(&spec.second_map())?;

    let defect = defect_series(&StepFunction::constant(1.0), profile, spec.p, j_list)?;
    let scale = DEFECT_MATCH_TOL * (1.0 + defect.theoretical_limit.abs());
    let defect_matches_limit = defect
        .deviations
        .iter()
        .zip(&defect.errors)
        .all(|(d, e)| d.abs() <= e + defect.theoretical_limit_error + scale);
    let defect_negative = defect.theoretical_limit + defect.theoretical_limit_error < 0.0;
    let verdict = first_vanishes && second_vanishes && defect_matches_limit && defect_negative;
    Ok(Verification {
        j_list: j_list.to_vec(),
        first,
        second,
        first_vanishes,
        second_vanishes,
        defect,
        defect_matches_limit,
        defect_negative,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_two_and_one_are_rejected() {
        assert!(matches!(MomentSpec::new(2.0), Err(Error::LinearDependence { .. })));
        assert!(matches!(MomentSpec::new(1.0), Err(Error::InvalidExponent { .. })));
        assert!(MomentSpec::with_parameters(2.5, 0.0, 1e-3, 10.0).is_err());
    }

    #[test]
    fn too_few_levels_rejected() {
        let spec = MomentSpec::new(1.5).unwrap();
        let opts = StepSearchOptions { levels: 2, ..Default::default() };
        assert!(search_step_profile(&spec, &opts).is_err());
    }

    #[test]
    fn step_search_finds_witnesses_below_three() {
        for (p, expected) in [(1.5, -0.8813), (2.5, -6.8e-3)] {
            let spec = MomentSpec::new(p).unwrap();
            let outcome = search_step_profile(&spec, &StepSearchOptions::default()).unwrap();
            let report = outcome.witness().unwrap_or_else(|| panic!("p = {p}: {outcome:?}"));
            assert!(report.moment1.abs() <= 1e-8 && report.moment2.abs() <= 1e-8);
            assert!(report.objective <= -1e-3);
            assert!((report.objective - expected).abs() <= 0.05 * expected.abs(), "p = {p}: {}", report.objective);
            for d in &report.defect_check.values {
                assert!((d - report.objective).abs() <= DEFECT_MATCH_TOL, "{d} vs {}", report.objective);
            }
            let v = verify_counterexample(report, &default_j_list()).unwrap();
            assert!(v.verdict, "{v:?}");
        }
    }

    #[test]
    fn step_search_is_deterministic() {
        let spec = MomentSpec::new(2.5).unwrap();
        let opts = StepSearchOptions { seed: 7, ..Default::default() };
        assert_eq!(search_step_profile(&spec, &opts).unwrap(), search_step_profile(&spec, &opts).unwrap());
    }

    #[test]
    fn no_witness_above_three() {
        for p in [3.0, 3.5] {
            let spec = MomentSpec::new(p).unwrap();
            let outcome = search_step_profile(&spec, &StepSearchOptions::default()).unwrap();
            match outcome {
                SearchOutcome::NoWitness { best_objective, .. } => {
                    if let Some(f) = best_objective {
                        assert!(f >= -1e-9, "p = {p}: {f}");
                    }
                }
                SearchOutcome::Witness(r) => panic!("p = {p}: unexpected witness {r:?}"),
            }
        }
    }
}
