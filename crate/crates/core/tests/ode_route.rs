use blb_core::counterex::*;
use blb_core::{Composable, ProfileFn, ScalarMap};

#[test]
fn unit_density_gives_linear_profile() {
    let d = DensityDesign::constant(1.0, 1.0).unwrap();
    let sol = solve_profile_ode(&d, 64, 1e-12).unwrap();
    assert!((sol.gamma - 2.0).abs() <= 1e-10, "{}", sol.gamma);
    assert!(sol.endpoint_map_monotone);
    let p = &sol.profile;
    assert_eq!(p.samples()[0], -1.0);
    assert!((p.samples()[p.samples().len() - 1] - 1.0).abs() <= 1e-10);
    for (s, v) in p.nodes().iter().zip(p.samples()) {
        assert!((v - (-1.0 + 2.0 * s)).abs() <= 1e-12, "s = {s}: {v}");
    }
    assert!(p.samples().windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn constant_density_scales_gamma() {
    for (a, c) in [(1.0, 3.0), (2.5, 7.0)] {
        let d = DensityDesign::constant(a, c).unwrap();
        let sol = solve_profile_ode(&d, 64, 1e-12).unwrap();
        assert!((sol.gamma - 2.0 * a * c).abs() <= 1e-9 * a * c);
        for (s, v) in sol.profile.nodes().iter().zip(sol.profile.samples()) {
            assert!((v - (-a + 2.0 * a * s)).abs() <= 1e-10);
        }
    }
}

#[test]
fn unit_density_pushforwards() {
    let d = DensityDesign::constant(1.0, 1.0).unwrap();
    let sol = solve_profile_ode(&d, 64, 1e-12).unwrap();
    let id = pushforward_moment(&d, sol.gamma, &ScalarMap::Identity).unwrap();
    assert!(id.value.abs() <= 1e-15);
    let sq = pushforward_moment(&d, sol.gamma, &ScalarMap::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }).unwrap();
    assert!((sq.value - 1.0 / 3.0).abs() <= 1e-12);
    let direct = ProfileFn::Sampled(sol.profile.clone())
        .integrate_composition(&ScalarMap::Polynomial { coeffs: vec![0.0, 0.0, 1.0] })
        .unwrap();
    assert!((direct.value - 1.0 / 3.0).abs() <= 1e-3, "{direct:?}");
    let one = pushforward_moment(&d, sol.gamma, &ScalarMap::Constant { c: 1.0 }).unwrap();
    assert!((one.value - 1.0).abs() <= 1e-12);
}

#[test]
fn designed_density_profile_is_a_verified_witness() {
    let spec = MomentSpec::new(2.5).unwrap();
    let outcome = ode_counterexample(&spec, &OdeOptions::default()).unwrap();
    let report = outcome.witness().unwrap_or_else(|| panic!("{outcome:?}"));
    let ode = report.ode.as_ref().unwrap();
    assert!(ode.endpoint_map_monotone);
    assert!(ode.endpoint_residual.abs() <= OdeOptions::default().gamma_tol);
    for row in &ode.pushforward {
        assert!(row.ok, "{row:?}");
    }
    assert!(report.objective + report.objective_error <= -1e-3);
    let v = verify_counterexample(report, &default_j_list()).unwrap();
    assert!(v.verdict, "{:?}", (v.first_vanishes, v.second_vanishes, v.defect_matches_limit, v.defect_negative));
}
