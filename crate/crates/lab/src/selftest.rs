//! Elementary identities that every build must reproduce: constants,
//! symmetric two-level functions, zero inputs and contract restatements.

use blb_core::counterex::{
    design_density, pushforward_moment, search_step_profile, solve_profile_ode, DensityDesign, MomentSpec, StepSearchOptions, DEFAULT_RATIO_BOUND,
};
use blb_core::counterex::density::MomentMap;
use blb_core::defect::{bl_defect, defect_limit_theory, p4_identity_check, psi_weight_check};
use blb_core::funcspace::{integrate_composition, lp_norm, pair};
use blb_core::inequality::check_vector_structure;
use blb_core::oscillate::{composition_weak_limit, convergence_table, pair_oscillated, rescale, weak_limit_mean};
use blb_core::pointwise::{g_p, pair_defect, psi_p, PsiVariant};
use blb_core::{ProfileFn, ScalarMap, StepFunction};
use serde::Serialize;

use crate::output::{num, Table};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub name: &'static str,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub cases: Vec<Case>,
    pub passed: usize,
    pub failed: usize,
}

impl SelftestReport {
    pub fn table(&self) -> Table {
        Table {
            header: vec!["name", "observed", "expected", "tolerance", "pass"],
            rows: self
                .cases
                .iter()
                .map(|c| vec![c.name.to_string(), num(c.observed), num(c.expected), num(c.tolerance), c.pass.to_string()])
                .collect(),
        }
    }
}

struct Suite(Vec<Case>);

impl Suite {
    fn check(&mut self, name: &'static str, observed: f64, expected: f64, tolerance: f64) {
        let pass = (observed - expected).abs() <= tolerance;
        self.0.push(Case { name, observed, expected, tolerance, pass });
    }

    /// Records a failed case when a computation errors out.
    fn try_check(&mut self, name: &'static str, observed: blb_core::Result<f64>, expected: f64, tolerance: f64) {
        self.check(name, observed.unwrap_or(f64::NAN), expected, tolerance);
    }
}

fn two_level() -> StepFunction {
    StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).expect("valid")
}

fn sample_step() -> StepFunction {
    StepFunction::new(vec![0.0, 0.2, 0.45, 1.0], vec![1.5, -0.25, 3.0]).expect("valid")
}

fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn run_suite() -> SelftestReport {
    let mut s = Suite(Vec::new());
    let pm = two_level();
    let one = StepFunction::constant(1.0);
    let zero = StepFunction::constant(0.0);
    let sq = ScalarMap::Polynomial { coeffs: vec![0.0, 0.0, 1.0] };

    // Representations and integration.
    s.try_check("integral of t^2 over +-1 levels", integrate_composition(&pm, &sq).map(|i| i.value), 1.0, 1e-15);
    s.try_check("integral of t over +-1 levels", integrate_composition(&pm, &ScalarMap::Identity).map(|i| i.value), 0.0, 1e-15);
    s.check("pairing of constants", pair(&one, &one), 1.0, 1e-15);
    s.check("pairing of a mean-zero function with 1", pair(&pm, &one), 0.0, 1e-15);
    for (name, p) in [("Lp norm of +-1 levels, p = 1.5", 1.5), ("Lp norm of +-1 levels, p = 3", 3.0)] {
        s.try_check(name, lp_norm(&pm, p), 1.0, 1e-15);
    }
    s.try_check("Lp norm of zero", lp_norm(&zero, 2.0), 0.0, 0.0);

    // Oscillation.
    let v = sample_step();
    s.try_check("rescale by 1 is the identity", rescale(&v, 1).map(|r| if r == v { 0.0 } else { 1.0 }), 0.0, 0.0);
    let tiled = StepFunction::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![1.0, -1.0, 1.0, -1.0]).expect("valid");
    s.try_check("rescale by 2 tiles two periods", rescale(&pm, 2).map(|r| if r == tiled { 0.0 } else { 1.0 }), 0.0, 0.0);
    s.try_check(
        "mean-zero pairings against 1 vanish",
        (1..=16).map(|j| pair_oscillated(&pm, &one, j)).collect::<blb_core::Result<Vec<_>>>().map(max_abs),
        0.0,
        1e-15,
    );
    s.check("weak limit of +-1 levels", weak_limit_mean(&pm), 0.0, 0.0);
    s.check("weak limit of a constant", weak_limit_mean(&StepFunction::constant(-2.5)), -2.5, 0.0);
    s.try_check("odd map of symmetric levels", composition_weak_limit(&pm, &ScalarMap::PowerSign { q: 2.0 }), 0.0, 1e-15);
    s.try_check(
        "identity composition is the mean",
        composition_weak_limit(&v, &ScalarMap::Identity).map(|x| x - weak_limit_mean(&v)),
        0.0,
        1e-15,
    );
    s.try_check(
        "convergence table of a mean-zero function against 1",
        convergence_table(&pm, &one, &[1, 2, 4, 8]).map(|t| max_abs(t.pairings.iter().copied().chain([t.predicted_limit]))),
        0.0,
        1e-15,
    );
    s.try_check("convergence table of v against itself at j = 1", convergence_table(&pm, &pm, &[1]).map(|t| t.pairings[0]), 1.0, 1e-15);

    // Pointwise inequalities.
    s.check("g_p(0) = 0", max_abs([1.5, 2.0, 2.5, 3.0, 4.0, 7.5].map(|p| g_p(p, 0.0))), 0.0, 0.0);
    s.try_check("Fvec symmetry at t = 0, p = 3", check_vector_structure(3.0, &[0.0], &[-1.0, 0.0, 1.0]).map(|r| r.symmetry_residual), 0.0, 0.0);
    s.check(
        "Psi(s, 0) and its slack vanish",
        max_abs([-2.0, -0.5, 0.5, 3.0].into_iter().flat_map(|x| {
            let psi = psi_p(2.5, PsiVariant::SignCorrected, x, 0.0);
            [psi, pair_defect(2.5, x, 0.0) - psi]
        })),
        0.0,
        1e-15,
    );

    // Counterexample routes.
    let witness = MomentSpec::new(1.5).and_then(|spec| search_step_profile(&spec, &StepSearchOptions::default()));
    let witness = witness.ok().and_then(|o| o.witness().cloned());
    s.check(
        "witness moments within eps_mom",
        witness.as_ref().map_or(f64::NAN, |r| r.moment1.abs().max(r.moment2.abs())),
        0.0,
        MomentSpec::DEFAULT_EPS_MOM,
    );
    s.check(
        "witness defect equals the composition limit for every j",
        witness.as_ref().map_or(f64::NAN, |r| {
            let limit = composition_weak_limit(&r.profile, &ScalarMap::FP { p: 1.5 }).unwrap_or(f64::NAN);
            max_abs(r.defect_check.values.iter().map(|d| d - limit))
        }),
        0.0,
        1e-9,
    );
    let unit = DensityDesign::constant(1.0, 1.0).and_then(|d| solve_profile_ode(&d, 256, 1e-12));
    s.try_check("constant density gives gamma = 2a", unit.clone().map(|o| o.gamma), 2.0, 1e-10);
    s.try_check(
        "constant density gives a linear profile",
        unit.clone().map(|o| max_abs(o.profile.nodes().iter().zip(o.profile.samples()).map(|(x, v)| v - (-1.0 + 2.0 * x)))),
        0.0,
        1e-10,
    );
    s.try_check(
        "density c gives gamma = 2ac",
        DensityDesign::constant(3.0, 2.5).and_then(|d| solve_profile_ode(&d, 256, 1e-12)).map(|o| o.gamma),
        15.0,
        1e-9,
    );
    s.try_check(
        "profile starts at -a, ends at a and increases",
        unit.clone().map(|o| {
            let v = o.profile.samples();
            let increasing = v.windows(2).all(|w| w[0] < w[1]);
            if increasing { (v[0] + 1.0).abs().max((v[v.len() - 1] - 1.0).abs()) } else { f64::INFINITY }
        }),
        0.0,
        1e-10,
    );
    s.try_check(
        "pushforward of t under the unit density",
        DensityDesign::constant(1.0, 1.0).and_then(|d| pushforward_moment(&d, 2.0, &ScalarMap::Identity)).map(|i| i.value),
        0.0,
        1e-15,
    );
    let design = MomentSpec::new(2.5).and_then(|spec| design_density(&spec, spec.range, 40, DEFAULT_RATIO_BOUND));
    s.try_check(
        "designed density has vanishing odd moments",
        design.clone().map(|d| max_abs(d.moments)),
        0.0,
        1e-10,
    );
    s.try_check(
        "even bump leaves the odd moments intact",
        design.map(|d| {
            let bumped: Vec<f64> = d.density.knots.iter().zip(&d.density.values).map(|(t, c)| c + 5.0 / (1.0 + t * t)).collect();
            let bumped = DensityDesign::new(d.density.a, d.density.knots.clone(), bumped).expect("still at least 1");
            let scale = bumped.mass();
            max_abs([
                (bumped.exact_moment(MomentMap::Identity) - d.density.exact_moment(MomentMap::Identity)) / scale,
                (bumped.exact_moment(MomentMap::PowerSign(1.5)) - d.density.exact_moment(MomentMap::PowerSign(1.5))) / scale,
            ])
        }),
        0.0,
        1e-12,
    );

    // Defects.
    let prof = ProfileFn::Step(pm.clone());
    s.try_check(
        "Hilbert case: mean-zero v with u = 1 has zero defect",
        (1..=16).map(|j| bl_defect(&one, &prof, 2.0, j).map(|i| i.value)).collect::<blb_core::Result<Vec<_>>>().map(max_abs),
        0.0,
        1e-14,
    );
    s.try_check(
        "zero profile has zero defect",
        [1, 3, 64].into_iter().map(|j| bl_defect(&v, &ProfileFn::Step(zero.clone()), 2.5, j).map(|i| i.value)).collect::<blb_core::Result<Vec<_>>>().map(max_abs),
        0.0,
        0.0,
    );
    let vp = ProfileFn::Step(v.clone());
    s.try_check(
        "defect limit with u = 1 is the F_p composition",
        defect_limit_theory(&one, &vp, 2.5).and_then(|l| Ok(l.value - composition_weak_limit(&vp, &ScalarMap::FP { p: 2.5 })?)),
        0.0,
        1e-14,
    );
    s.try_check("defect limit with u = 0 vanishes", defect_limit_theory(&zero, &vp, 2.5).map(|l| l.value), 0.0, 0.0);
    s.try_check(
        "p = 4 check with v = 0",
        p4_identity_check(&one, &zero, &[1, 2, 4]).map(|r| max_abs(r.defects.iter().copied().chain([r.cross_term]))),
        0.0,
        0.0,
    );
    s.try_check(
        "weight check with v = 0",
        psi_weight_check(&one, &ProfileFn::Step(zero), 3.0, &[1, 2, 4], PsiVariant::SignCorrected)
            .map(|r| max_abs(r.psi_integrals.iter().chain(&r.defects).copied().chain([r.psi_limit]))),
        0.0,
        0.0,
    );

    let failed = s.0.iter().filter(|c| !c.pass).count();
    SelftestReport { passed: s.0.len() - failed, failed, cases: s.0 }
}

#[cfg(test)]
mod tests {
    #[test]
    fn every_case_passes() {
        let report = super::run_suite();
        let failures: Vec<_> = report.cases.iter().filter(|c| !c.pass).collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }
}
