use std::path::Path;
use std::process::Command;

use blb_core::{ProfileFn, SampledProfile, StepFunction};
use blb_lab::{run, EXIT_EXPECTATION, EXIT_NO_WITNESS, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn blb(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("blb").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn path_arg(prefix: &str, p: &Path) -> String {
    format!("{prefix}:{}", p.display())
}

#[test]
fn certify_reports_verdicts_and_expectations() {
    let (code, out, _) = blb(&["certify", "--residual", "g_p", "--p", "3", "--box", "-1:1", "--h", "1e-5", "--tol", "1e-9"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["result"]["verdict"], "certified_nonneg_up_to_tol");
    assert_eq!(v["config"]["subcommand"], "certify");
    assert_eq!(v["config"]["box"], serde_json::json!([[-1.0, 1.0]]));

    let (code, out, _) = blb(&["certify", "--residual", "g_p", "--p", "2.5", "--h", "1e-3", "--expect", "nonneg"]);
    assert_eq!(code, EXIT_EXPECTATION);
    assert_eq!(json(&out)["result"]["verdict"], "violated");
    let (code, _, _) = blb(&["certify", "--residual", "g_p", "--p", "2.5", "--h", "1e-3"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn invalid_calls_exit_with_usage_code() {
    let (code, _, err) = blb(&["counterexample", "--p", "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("linearly dependent"), "{err}");
    assert_eq!(err.lines().count(), 1);

    for args in [
        &["certify", "--residual", "g_p", "--p", "3", "--frobnicate"][..],
        &["certify", "--residual", "h_p", "--p", "3"],
        &["certify", "--residual", "g_p", "--p", "0.5"],
        &["certify", "--residual", "g_p", "--p", "3", "--box", "1:-1"],
        &["defect", "--p", "3", "--v", "const:1", "--j", "4,2"],
        &["weaklimit", "--v", "nowhere.json"],
        &["counterexample", "--p", "1.5", "--levels", "2"],
    ] {
        let (code, _, err) = blb(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(!err.is_empty());
    }

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"breakpoints\": [0, 1], ").unwrap();
    let (code, _, err) = blb(&["defect", "--p", "3", "--v", &path_arg("file", &bad)]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("malformed JSON"), "{err}");
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = blb(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("counterexample"));
    let (code, out, _) = blb(&["certify", "--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("[default: 0.00001]"), "{out}");
}

#[test]
fn no_witness_above_three() {
    let (code, out, _) = blb(&["counterexample", "--p", "3.5"]);
    assert_eq!(code, EXIT_NO_WITNESS);
    assert_eq!(json(&out)["result"]["outcome"], "no_witness");
}

#[test]
fn reports_and_profiles_round_trip_through_file_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let envelope = dir.path().join("envelope.json");
    let (code, out, _) = blb(&["counterexample", "--p", "1.5", "--out", report.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    std::fs::write(&envelope, &out).unwrap();
    let result = &json(&out)["result"];
    assert_eq!(result["outcome"], "witness");
    assert_eq!(result["verification"]["verdict"], true);
    let objective = result["objective"].as_f64().unwrap();
    assert!(objective < -1e-3);

    // The bare report, the envelope and the embedded profile all load back.
    let profile = dir.path().join("profile.json");
    std::fs::write(&profile, serde_json::to_string(&json(&out)["result"]["profile"]).unwrap()).unwrap();
    let mut outputs = Vec::new();
    for source in [path_arg("witness", &report), path_arg("witness", &envelope), path_arg("file", &report), path_arg("file", &profile)] {
        let (code, out, err) = blb(&["defect", "--p", "1.5", "--v", &source, "--j", "geometric:1:64", "--format", "json"]);
        assert_eq!(code, EXIT_OK, "{source}: {err}");
        let series = &json(&out)["result"];
        assert_eq!(series["theoretical_limit"].as_f64().unwrap(), objective);
        outputs.push(series.clone());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let loaded: ProfileFn = serde_json::from_str(&std::fs::read_to_string(&profile).unwrap()).unwrap();
    assert_eq!(serde_json::to_value(&loaded).unwrap(), json(&out)["result"]["profile"]);
}

#[test]
fn sampled_profiles_load_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("linear.json");
    let linear = SampledProfile::new(vec![0.0, 0.5, 1.0], vec![-1.0, 0.0, 1.0], 1.0, 0.0).unwrap();
    std::fs::write(&path, serde_json::to_string(&linear).unwrap()).unwrap();
    let (code, out, err) = blb(&["weaklimit", "--v", &path_arg("file", &path), "--phi", "abs_power:2", "--j", "range:1:8"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let result = &json(&out)["result"];
    assert!((result["predicted_limit"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn csv_outputs_have_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v.json");
    let pm = StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap();
    std::fs::write(&v, serde_json::to_string(&pm).unwrap()).unwrap();

    let (code, out, _) = blb(&["defect", "--p", "4", "--v", &path_arg("file", &v), "--j", "geometric:1:1024"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("j,D_j,theoretical_limit,deviation"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1].parse::<f64>().unwrap(), 6.0, "{line}");
    }

    let (code, out, _) = blb(&["weaklimit", "--v", &path_arg("file", &v), "--psi", &path_arg("file", &v), "--j", "1", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "j,pairing,deviation\n1,1.0,1.0\n");

    let (code, out, _) = blb(&["scan", "--p-list", "2,4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("p,grid_min,argmin,verdict\n"));
    assert!(out.contains(",violated\n") && out.contains(",certified_nonneg_up_to_tol\n"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let a = blb(&["selftest"]);
    let b = blb(&["selftest"]);
    assert_eq!(a.0, EXIT_OK);
    assert_eq!(a.1, b.1);
    let a = blb(&["counterexample", "--p", "2.5", "--seed", "7"]);
    let b = blb(&["counterexample", "--p", "2.5", "--seed", "7"]);
    assert_eq!(a.0, EXIT_OK);
    assert_eq!(a.1, b.1);
}

#[test]
fn thread_count_does_not_change_output() {
    let exe = env!("CARGO_BIN_EXE_blb");
    let args = ["scan", "--p-list", "1.5,2.5,3,4", "--h", "1e-4"];
    let one = Command::new(exe).args(args).env("BLB_THREADS", "1").output().unwrap();
    let four = Command::new(exe).args(args).env("BLB_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);

    let bad = Command::new(exe).args(args).env("BLB_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("BLB_THREADS"));
}
