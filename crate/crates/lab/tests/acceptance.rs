//! Acceptance gate: one PASS/FAIL line per criterion, with timings.
//!
//! Oracles here are written independently of the library where a value is
//! derived rather than restated (closed forms, brute-force grids, direct
//! sums over merged partitions).

use std::time::{Duration, Instant};

use blb_core::counterex::{
    default_j_list, ode_counterexample, pushforward_moment, search_step_profile, solve_profile_ode, verify_counterexample, DensityDesign, MomentSpec,
    OdeOptions, StepSearchOptions,
};
use blb_core::defect::{bl_defect, defect_limit_theory, p4_identity_check};
use blb_core::funcspace::{integrate_composition, lp_norm, pair};
use blb_core::inequality::check_vector_structure;
use blb_core::oscillate::{decay_constant, geometric_j_list, pair_oscillated, rescale};
use blb_core::pointwise::{fvec_p, g_p, PsiVariant};
use blb_core::{ProfileFn, ScalarMap, StepFunction};
use blb_lab::run;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn blb(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("blb").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn random_step(rng: &mut ChaCha8Rng, max_pieces: usize, amplitude: f64) -> StepFunction {
    let pieces = rng.random_range(1..=max_pieces);
    let widths: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = widths.iter().sum();
    let mut breakpoints = vec![0.0];
    let mut acc = 0.0;
    for w in &widths {
        acc += w / total;
        breakpoints.push(acc);
    }
    *breakpoints.last_mut().unwrap() = 1.0;
    let values = (0..pieces).map(|_| rng.random_range(-amplitude..amplitude)).collect();
    StepFunction::new(breakpoints, values).unwrap()
}

fn phase_boundary() -> Outcome {
    let start = Instant::now();
    let (code, out) = blb(&["scan", "--residual", "g_p", "--p-list", "1.2,1.5,2.0,2.5,2.9,3.0,3.5,4,5", "--box", "-1:1", "--h", "1e-5", "--format", "json"]);
    let elapsed = start.elapsed();
    let rows: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let rows = rows["result"].as_array().ok_or("no rows")?;
    let mut ok = code == 0 && rows.len() == 9 && elapsed < Duration::from_secs(10);
    let mut detail = Vec::new();
    for r in rows {
        let p = r["p"].as_f64().unwrap();
        let min = r["grid_min"].as_f64().unwrap();
        ok &= if p < 3.0 { min < -1e-4 } else { min >= -1e-9 };
        detail.push(format!("p={p}: {min:.3e}"));
    }
    check(ok, format!("{} in {:.2}s", detail.join(", "), elapsed.as_secs_f64()))
}

fn closed_forms() -> Outcome {
    let ts = grid(-1.0, 1.0, 1e-4);
    let four = ts.iter().map(|&t| (g_p(4.0, t) - 6.0 * t * t).abs()).fold(0.0, f64::max);
    let two = ts.iter().map(|&t| (g_p(2.0, t) + 2.0 * t).abs()).fold(0.0, f64::max);
    check(four <= 1e-12 && two <= 1e-12, format!("max|g_4 - 6t^2| = {four:.2e}, max|g_2 + 2t| = {two:.2e}"))
}

fn vector_structure() -> Outcome {
    let ts = grid(-1.0, 1.0, 1e-3);
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [3.0, 4.0] {
        let report = check_vector_structure(p, &ts, &ts).map_err(|e| e.to_string())?;
        // Independent recomputation of the two identities on the same grid.
        let reduction = ts.iter().map(|&t| (fvec_p(p, t, 1.0) - g_p(p, t)).abs()).fold(0.0, f64::max);
        let symmetry = ts.iter().map(|&t| (fvec_p(p, t, -1.0) - fvec_p(p, -t, 1.0)).abs()).fold(0.0, f64::max);
        ok &= reduction <= 1e-12 && symmetry <= 1e-12 && report.min_second_difference >= -1e-10 && report.reduction_residual <= 1e-12;
        detail.push(format!(
            "p={p}: reduction {reduction:.1e}, symmetry {symmetry:.1e}, min second difference {:.2e}",
            report.min_second_difference
        ));
    }
    check(ok, detail.join("; "))
}

fn catalog(p: f64) -> Vec<ScalarMap> {
    vec![
        ScalarMap::Identity,
        ScalarMap::Constant { c: 2.0 },
        ScalarMap::PowerSign { q: p - 1.0 },
        ScalarMap::AbsPower { p },
        ScalarMap::FP { p },
        ScalarMap::GP { p },
        ScalarMap::PhiP { p },
        ScalarMap::PairDefect { base: -0.5, p },
        ScalarMap::Polynomial { coeffs: vec![1.0, -0.5, 0.25, 0.1] },
    ]
}

fn isometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_abs, mut worst_rel, mut worst_norm) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let v = random_step(&mut rng, 6, 3.0);
        let p = rng.random_range(1.2..5.0);
        for j in 1..=64 {
            let tv = rescale(&v, j).map_err(|e| e.to_string())?;
            for phi in catalog(p) {
                let a = integrate_composition(&v, &phi).unwrap().value;
                let b = integrate_composition(&tv, &phi).unwrap().value;
                worst_abs = worst_abs.max((a - b).abs());
                worst_rel = worst_rel.max((a - b).abs() / (1.0 + a.abs()));
            }
            let na = lp_norm(&v, p).unwrap();
            worst_norm = worst_norm.max((na - lp_norm(&tv, p).unwrap()).abs() / (1.0 + na));
        }
    }
    // Integrals reach |v|^5 ~ 250, so the comparison is relative to 1 + |value|.
    check(
        worst_rel <= 1e-12 && worst_norm <= 1e-12,
        format!("max |diff|/(1+|I|) = {worst_rel:.1e} (absolute {worst_abs:.1e}), norms {worst_norm:.1e}"),
    )
}

fn decay() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let v = random_step(&mut rng, 6, 3.0);
        let psi = random_step(&mut rng, 6, 3.0);
        let c = decay_constant(&v, &psi);
        let limit = v.mean() * psi.mean();
        for j in 1..=1024u64 {
            let dev = (pair_oscillated(&v, &psi, j).unwrap() - limit).abs();
            worst = worst.max(dev * j as f64 / c);
        }
    }
    check(worst <= 1.0 + 1e-9, format!("max j|dev|/C = {worst:.4} over 50 pairs, j <= 1024"))
}

fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

fn f_p(p: f64, t: f64) -> f64 {
    (1.0 + t).abs().powf(p) - 1.0 - t.abs().powf(p)
}

/// Best three-level objective over a uniform level grid on `[-a, a]`.
fn brute_force(p: f64, a: f64, n: usize) -> f64 {
    let levels: Vec<f64> = (0..=n).map(|i| -a + 2.0 * a * i as f64 / n as f64).collect();
    let phi2 = |t: f64| t.abs().powf(p - 2.0) * t;
    let mut best = f64::INFINITY;
    for i in 0..levels.len() {
        for j in i + 1..levels.len() {
            for k in j + 1..levels.len() {
                let t = [levels[i], levels[j], levels[k]];
                let sys = [[1.0, 1.0, 1.0, 1.0], [t[0], t[1], t[2], 0.0], [phi2(t[0]), phi2(t[1]), phi2(t[2]), 0.0]];
                if let Some(m) = solve3(sys) {
                    if m.iter().all(|x| *x >= -1e-14) {
                        best = best.min((0..3).map(|q| m[q] * f_p(p, t[q])).sum());
                    }
                }
            }
        }
    }
    best
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [1.5, 2.5] {
        let spec = MomentSpec::new(p).map_err(|e| e.to_string())?;
        let outcome = search_step_profile(&spec, &StepSearchOptions::default()).map_err(|e| e.to_string())?;
        let Some(report) = outcome.witness() else {
            ok = false;
            detail.push(format!("p={p}: no witness"));
            continue;
        };
        let series = &report.defect_check;
        let defect_ok = series.values.iter().all(|d| (d - report.objective).abs() <= 1e-9 && *d < 0.0);
        let verification = verify_counterexample(report, &default_j_list()).map_err(|e| e.to_string())?;
        ok &= report.verdict
            && verification.verdict
            && report.moment1.abs() <= 1e-8
            && report.moment2.abs() <= 1e-8
            && report.objective <= -1e-3
            && defect_ok;
        detail.push(format!(
            "p={p}: objective {:.6}, moments ({:.1e}, {:.1e}), D_j = limit for {} values of j",
            report.objective,
            report.moment1,
            report.moment2,
            series.values.len()
        ));
        if p == 1.5 {
            let oracle = brute_force(1.5, spec.range, 200);
            ok &= (report.objective - oracle).abs() <= 1e-3;
            detail.push(format!("grid oracle {oracle:.6}"));
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    check(ok, format!("{} (range 10) in {:.2}s", detail.join("; "), elapsed.as_secs_f64()))
}

/// Orthogonal projection of `m` onto mass 1 and both vanishing moments.
fn project(t: &[f64], m: &[f64], p: f64) -> Option<Vec<f64>> {
    let phi2 = |t: f64| t.abs().powf(p - 2.0) * t;
    let rows: [Vec<f64>; 3] = [vec![1.0; t.len()], t.to_vec(), t.iter().map(|&x| phi2(x)).collect()];
    let target = [1.0, 0.0, 0.0];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut sys = [[0.0; 4]; 3];
    for i in 0..3 {
        for k in 0..3 {
            sys[i][k] = dot(&rows[i], &rows[k]);
        }
        sys[i][3] = dot(&rows[i], m) - target[i];
    }
    let lambda = solve3(sys)?;
    let out: Vec<f64> = (0..t.len()).map(|i| m[i] - (0..3).map(|k| lambda[k] * rows[k][i]).sum::<f64>()).collect();
    out.iter().all(|x| *x > 1e-9).then_some(out)
}

fn positive_side() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    let mut tried = 0;
    let mut worst_moment = 0.0f64;
    for p in [3.0, 4.0] {
        let mut accepted = 0;
        while accepted < 20 {
            tried += 1;
            let n = rng.random_range(3..=6);
            let t: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let m: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
            let Some(m) = project(&t, &m, p) else { continue };
            let Ok(v) = StepFunction::from_levels(&t, &m) else { continue };
            let v = ProfileFn::Step(v);
            let m1 = integrate_composition(&v, &ScalarMap::Identity).unwrap().value;
            let m2 = integrate_composition(&v, &ScalarMap::PowerSign { q: p - 1.0 }).unwrap().value;
            if m1.abs() > 1e-8 || m2.abs() > 1e-8 {
                continue;
            }
            worst_moment = worst_moment.max(m1.abs()).max(m2.abs());
            let limit = defect_limit_theory(&StepFunction::constant(1.0), &v, p).unwrap().value;
            worst = worst.min(limit);
            accepted += 1;
        }
    }
    check(worst >= -1e-8, format!("min limit {worst:.3e} over 40 projected profiles ({tried} drawn), moments <= {worst_moment:.1e}"))
}

fn p4_identity() -> Outcome {
    let pm = StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap();
    let j_list = geometric_j_list(1, 1024).unwrap();
    let constant = p4_identity_check(&StepFunction::constant(1.0), &pm, &j_list).map_err(|e| e.to_string())?;
    let exact = constant.defects.iter().all(|d| *d == 6.0);
    let u = StepFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0]).unwrap();
    let two_level = p4_identity_check(&u, &pm, &j_list).map_err(|e| e.to_string())?;
    let late = two_level
        .j_list
        .iter()
        .zip(&two_level.deviations)
        .filter(|(j, _)| **j >= 256)
        .map(|(_, d)| d.abs())
        .fold(0.0, f64::max);
    check(exact && late < 1e-3, format!("D_j = 6 exactly: {exact}; two-level u: max |D_j - cross| for j >= 256 = {late:.2e}"))
}

fn hilbert() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut j_list: Vec<u64> = (1..=64).collect();
    j_list.extend(geometric_j_list(128, 1024).unwrap());
    for _ in 0..20 {
        let u = random_step(&mut rng, 5, 2.0);
        let v = random_step(&mut rng, 5, 2.0);
        let mean = v.mean();
        let v = StepFunction::new(v.breakpoints().to_vec(), v.values().iter().map(|x| x - mean).collect()).unwrap();
        let prof = ProfileFn::Step(v.clone());
        for &j in &j_list {
            let d = bl_defect(&u, &prof, 2.0, j).unwrap().value;
            let cross = 2.0 * pair(&u, &rescale(&v, j).unwrap());
            worst = worst.max((d - cross).abs());
        }
    }
    check(worst <= 1e-12, format!("max |D_j - 2<u, T_j v>| = {worst:.2e} over 20 pairs"))
}

fn ode_route() -> Outcome {
    let unit = DensityDesign::constant(1.0, 1.0).map_err(|e| e.to_string())?;
    let sol = solve_profile_ode(&unit, 1024, 1e-12).map_err(|e| e.to_string())?;
    let linear = sol.profile.nodes().iter().zip(sol.profile.samples()).map(|(s, v)| (v - (2.0 * s - 1.0)).abs()).fold(0.0, f64::max);
    let half = pushforward_moment(&unit, sol.gamma, &ScalarMap::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }).map_err(|e| e.to_string())?;
    let mut ok = (sol.gamma - 2.0).abs() <= 1e-10 && linear <= 1e-12 && (half.value - 1.0 / 3.0).abs() <= 1e-12;
    let mut detail = vec![format!("unit density: gamma - 2 = {:.1e}, linearity {linear:.1e}", sol.gamma - 2.0)];

    let spec = MomentSpec::new(2.5).map_err(|e| e.to_string())?;
    let outcome = ode_counterexample(&spec, &OdeOptions::default()).map_err(|e| e.to_string())?;
    match outcome.witness() {
        Some(report) => {
            let ode = report.ode.as_ref().ok_or("missing ODE details")?;
            let rows_ok = ode.pushforward.iter().all(|r| (r.pushforward.value - r.direct.value).abs() <= r.bound);
            let verification = verify_counterexample(report, &default_j_list()).map_err(|e| e.to_string())?;
            ok &= rows_ok && verification.verdict;
            let worst = ode.pushforward.iter().map(|r| (r.pushforward.value - r.direct.value).abs() / r.bound).fold(0.0, f64::max);
            detail.push(format!(
                "designed density (range 10): gamma {:.6}, objective {:.4e}, pushforward within bound (worst ratio {worst:.2}), verified {}",
                ode.gamma, report.objective, verification.verdict
            ));
        }
        None => {
            ok = false;
            detail.push("designed density: no witness".into());
        }
    }
    check(ok, detail.join("; "))
}

fn psi_domination() -> Outcome {
    let s_grid = grid(-3.0, 3.0, 0.01);
    let t_grid = grid(-3.0, 3.0, 0.01);
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [2.0, 2.5, 3.0, 4.0] {
        let r = blb_core::inequality::check_psi_domination(p, &s_grid, &t_grid, PsiVariant::SignCorrected).map_err(|e| e.to_string())?;
        ok &= r.min_slack >= -1e-10;
        if p == 2.0 {
            let antipodal = r.antipodal_min_abs_slack.unwrap_or(f64::INFINITY);
            ok &= antipodal <= 1e-12 && r.min_slack.abs() <= 1e-10;
            detail.push(format!("p=2: min slack {:.1e}, slack at t = -s {antipodal:.1e}", r.min_slack));
        } else {
            detail.push(format!("p={p}: min slack {:.2e}", r.min_slack));
        }
    }
    check(ok, detail.join(", "))
}

fn reproducibility() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for args in [&["selftest"][..], &["counterexample", "--p", "1.5", "--seed", "3"], &["counterexample", "--p", "2.5", "--route", "ode"]] {
        let (c1, a) = blb(args);
        let (c2, b) = blb(args);
        let same = a == b && c1 == c2;
        ok &= same && c1 == 0;
        detail.push(format!("{}: exit {c1}, identical {same}", args.join(" ")));
    }
    check(ok, detail.join("; "))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("1 inequality phase boundary", phase_boundary),
        ("2 closed-form residuals", closed_forms),
        ("3 vector reduction and symmetry", vector_structure),
        ("4 equimeasurability and isometry", isometry),
        ("5 weak-limit decay", decay),
        ("6 counterexample witnesses", counterexample),
        ("7 nonnegative limits above three", positive_side),
        ("8 p = 4 identity", p4_identity),
        ("9 Hilbert identity", hilbert),
        ("10 ODE route", ode_route),
        ("11 Psi domination", psi_domination),
        ("12 reproducibility", reproducibility),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} [{secs:.2}s]: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name} [{secs:.2}s]: {detail}");
            }
        }
    }
    println!("{} of 12 criteria pass", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
