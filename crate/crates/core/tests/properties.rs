use blb_core::defect::{bl_defect, defect_limit_theory};
use blb_core::funcspace::{integrate_composition, lp_norm, pair};
use blb_core::numeric::linalg::solve3;
use blb_core::numeric::pow_sign;
use blb_core::oscillate::{decay_constant, pair_oscillated, rescale};
use blb_core::pointwise::{g_p, pair_defect, psi_p, PsiVariant};
use blb_core::{Composable, ProfileFn, ScalarMap, StepFunction};
use proptest::prelude::*;

/// Random step function on [0, 1] with 1..=6 pieces and values in [-3, 3].
fn step_fn() -> impl Strategy<Value = StepFunction> {
    prop::collection::vec((0.05f64..1.0, -3.0f64..3.0), 1..=6).prop_map(|pieces| {
        let total: f64 = pieces.iter().map(|(w, _)| w).sum();
        let mut breakpoints = vec![0.0];
        let mut acc = 0.0;
        for (w, _) in &pieces {
            acc += w / total;
            breakpoints.push(acc);
        }
        *breakpoints.last_mut().unwrap() = 1.0;
        StepFunction::new(breakpoints, pieces.iter().map(|(_, v)| *v).collect()).unwrap()
    })
}

fn catalog(p: f64) -> Vec<ScalarMap> {
    vec![
        ScalarMap::Identity,
        ScalarMap::PowerSign { q: p - 1.0 },
        ScalarMap::AbsPower { p },
        ScalarMap::FP { p },
        ScalarMap::GP { p },
        ScalarMap::PhiP { p },
        ScalarMap::Polynomial { coeffs: vec![1.0, -0.5, 0.25] },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rescaling_preserves_distribution(v in step_fn(), j in 1u64..64, p in 1.2f64..5.0) {
        let tv = rescale(&v, j).unwrap();
        for phi in catalog(p) {
            let a = integrate_composition(&v, &phi).unwrap().value;
            let b = integrate_composition(&tv, &phi).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{phi:?}: {a} vs {b}");
        }
        let na = lp_norm(&v, p).unwrap();
        let nb = lp_norm(&tv, p).unwrap();
        prop_assert!((na - nb).abs() <= 1e-12 * (1.0 + na));
    }

    #[test]
    fn pairings_decay_like_one_over_j(v in step_fn(), psi in step_fn(), j in 1u64..1025) {
        let c = decay_constant(&v, &psi);
        let dev = pair_oscillated(&v, &psi, j).unwrap() - v.mean() * psi.mean();
        prop_assert!(dev.abs() <= c / j as f64 + 1e-12, "j = {j}: {dev} vs {c}/j");
    }

    #[test]
    fn constant_u_defect_is_independent_of_j(v in step_fn(), c in -2.0f64..2.0, p in 1.2f64..5.0, j in 1u64..200) {
        let u = StepFunction::constant(c);
        let prof = ProfileFn::Step(v);
        let d = bl_defect(&u, &prof, p, j).unwrap().value;
        let lim = defect_limit_theory(&u, &prof, p).unwrap().value;
        prop_assert!((d - lim).abs() <= 1e-11 * (1.0 + lim.abs()), "{d} vs {lim}");
    }

    #[test]
    fn hilbert_identity_for_mean_zero_v(u in step_fn(), v in step_fn(), j in 1u64..200) {
        let mean = v.mean();
        let centred = StepFunction::new(v.breakpoints().to_vec(), v.values().iter().map(|x| x - mean).collect()).unwrap();
        let d = bl_defect(&u, &ProfileFn::Step(centred.clone()), 2.0, j).unwrap().value;
        let cross = 2.0 * pair(&u, &rescale(&centred, j).unwrap());
        prop_assert!((d - cross).abs() <= 1e-12, "{d} vs {cross}");
    }

    #[test]
    fn above_three_moment_free_profiles_have_nonnegative_defect(
        t in prop::collection::vec(-4.0f64..4.0, 5),
        free in prop::collection::vec(0.0f64..0.2, 2),
        p in prop::sample::select(vec![3.0, 3.5, 4.0, 5.0]),
    ) {
        // Two levels carry free measures; three are solved from the mass and
        // both moment conditions.
        let q = p - 1.0;
        let rhs = [
            1.0 - free[0] - free[1],
            -free[0] * t[3] - free[1] * t[4],
            -free[0] * pow_sign(t[3], q) - free[1] * pow_sign(t[4], q),
        ];
        let mat = [[1.0, 1.0, 1.0], [t[0], t[1], t[2]], [pow_sign(t[0], q), pow_sign(t[1], q), pow_sign(t[2], q)]];
        let head = solve3(&mat, &rhs);
        prop_assume!(head.is_some());
        let head = head.unwrap();
        prop_assume!(head.iter().all(|m| *m >= 0.0));
        let measures = [head[0], head[1], head[2], free[0], free[1]];
        let v = StepFunction::from_levels(&t, &measures);
        prop_assume!(v.is_ok());
        let v = ProfileFn::Step(v.unwrap());
        let m1 = v.integrate_composition(&ScalarMap::Identity).unwrap().value;
        let m2 = v.integrate_composition(&ScalarMap::PowerSign { q }).unwrap().value;
        prop_assume!(m1.abs() <= 1e-8 && m2.abs() <= 1e-8);
        let lim = defect_limit_theory(&StepFunction::constant(1.0), &v, p).unwrap().value;
        prop_assert!(lim >= -1e-8, "p = {p}: {lim}");
    }

    #[test]
    fn residual_nonnegative_above_three(t in -1.0f64..1.0, p in 3.0f64..6.0) {
        prop_assert!(g_p(p, t) >= -1e-12 * (1.0 + p), "g_{p}({t}) = {}", g_p(p, t));
    }

    #[test]
    fn sign_corrected_weight_is_dominated(s in -3.0f64..3.0, t in -3.0f64..3.0, p in 2.0f64..5.0) {
        let slack = pair_defect(p, s, t) - psi_p(p, PsiVariant::SignCorrected, s, t);
        let scale = 1.0 + s.abs().powf(p) + t.abs().powf(p);
        prop_assert!(slack >= -1e-12 * scale, "slack {slack} at ({s}, {t}), p = {p}");
    }

    #[test]
    fn step_function_json_round_trip(v in step_fn()) {
        let text = serde_json::to_string(&v).unwrap();
        let back: StepFunction = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, v);
    }
}
