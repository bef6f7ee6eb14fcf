use std::io::Write;

use blb_core::counterex::{
    default_j_list, ode_counterexample, search_step_profile, verify_counterexample, CounterexampleReport, MomentSpec, OdeOptions, SearchOutcome,
    StepSearchOptions, Verification,
};
use blb_core::defect::{assemble_series, bl_defect, tail_check, TailCheck};
use blb_core::inequality::{certify_nonneg, scan_row, InequalityCertificate, Residual, ScanRow, Verdict};
use blb_core::oscillate::{composition_weak_limit, oscillated_pairings};
use blb_core::{ProfileFn, ScalarMap};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::cli::{CertifyArgs, Cli, Command, CounterexampleArgs, DefectArgs, Expectation, Format, RouteArg, ScanArgs, WeakLimitArgs};
use crate::output::{emit, num, Table};
use crate::selftest::run_suite;
use crate::{CliError, EXIT_EXPECTATION, EXIT_FAILURE, EXIT_NO_WITNESS, EXIT_OK};

pub(crate) fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Scan(_) | Command::Defect(_) => Format::Csv,
        _ => Format::Json,
    });
    let mut config = serde_json::to_value(&cli.command).map_err(CliError::internal)?;
    config["format"] = serde_json::to_value(format).map_err(CliError::internal)?;
    match &cli.command {
        Command::Certify(args) => certify(args, format, &config, out),
        Command::Scan(args) => scan(args, format, &config, out),
        Command::Weaklimit(args) => weaklimit(args, format, &config, out),
        Command::Counterexample(args) => counterexample(args, format, &config, out),
        Command::Defect(args) => defect(args, format, &config, out),
        Command::Selftest(_) => {
            let report = run_suite();
            emit(out, format, &config, &report, || Some(report.table()))?;
            Ok(if report.failed == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

fn default_box(domain: &Option<crate::inputs::BoxSpec>, arity: usize) -> Vec<[f64; 2]> {
    domain.as_ref().map_or_else(|| vec![[-1.0, 1.0]; arity], |b| b.0.clone())
}

fn verdict_name(v: Verdict) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn point(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

fn certify(args: &CertifyArgs, format: Format, config: &Value, out: &mut dyn Write) -> Result<i32, CliError> {
    let residual = Residual::new(args.residual, args.p)?.with_variant(args.variant);
    let domain = default_box(&args.domain, args.residual.arity());
    let cert = certify_nonneg(&residual, &domain, args.h, args.tol)?;
    emit(out, format, config, &cert, || Some(certificate_table(&cert)))?;
    let met = cert.verdict == Verdict::CertifiedNonnegUpToTol;
    Ok(if args.expect == Some(Expectation::Nonneg) && !met { EXIT_EXPECTATION } else { EXIT_OK })
}

fn certificate_table(c: &InequalityCertificate) -> Table {
    Table {
        header: vec!["residual", "p", "grid_step", "grid_points", "grid_min", "certified_lower_bound", "tolerance", "verdict", "witness"],
        rows: vec![vec![
            c.residual.kind.name().to_string(),
            num(c.residual.p),
            num(c.grid_step),
            c.grid_points.to_string(),
            num(c.grid_min),
            c.certified_lower_bound.map(num).unwrap_or_default(),
            num(c.tolerance),
            verdict_name(c.verdict),
            point(&c.witness),
        ]],
    }
}

fn scan(args: &ScanArgs, format: Format, config: &Value, out: &mut dyn Write) -> Result<i32, CliError> {
    let domain = default_box(&args.domain, args.residual.arity());
    let rows: Vec<ScanRow> = args.p_list.0.par_iter().map(|&p| scan_row(p, args.residual, &domain, args.h, args.tol)).collect::<Result<_, _>>()?;
    emit(out, format, config, &rows, || {
        Some(Table {
            header: vec!["p", "grid_min", "argmin", "verdict"],
            rows: rows.iter().map(|r| vec![num(r.p), num(r.grid_min), point(&r.argmin), verdict_name(r.verdict)]).collect(),
        })
    })?;
    Ok(EXIT_OK)
}

/// Pairings `⟨φ(T_j v), ψ⟩` against `(∫φ(v))(∫ψ)`.
#[derive(Serialize)]
struct WeakLimitTable {
    map: ScalarMap,
    predicted_limit: f64,
    j_list: Vec<u64>,
    pairings: Vec<f64>,
    /// Quadrature error per pairing (zero for step profiles).
    errors: Vec<f64>,
    deviations: Vec<f64>,
    tail: TailCheck,
}

fn weaklimit(args: &WeakLimitArgs, format: Format, config: &Value, out: &mut dyn Write) -> Result<i32, CliError> {
    let v = args.v.load()?;
    let psi = args.psi.load()?;
    let map = args.phi.clone().unwrap_or(ScalarMap::Identity);
    let j_list = args.j.expand()?;
    let entries = oscillated_pairings(&v, &psi, &map, &j_list)?;
    let predicted_limit = composition_weak_limit(&v, &map)? * psi.mean();
    let pairings: Vec<f64> = entries.iter().map(|e| e.value).collect();
    let deviations: Vec<f64> = pairings.iter().map(|x| x - predicted_limit).collect();
    let table = WeakLimitTable {
        map,
        predicted_limit,
        tail: tail_check(&j_list, &deviations),
        errors: entries.iter().map(|e| e.error).collect(),
        j_list,
        pairings,
        deviations,
    };
    emit(out, format, config, &table, || {
        Some(Table {
            header: vec!["j", "pairing", "deviation"],
            rows: (0..table.j_list.len())
                .map(|i| vec![table.j_list[i].to_string(), num(table.pairings[i]), num(table.deviations[i])])
                .collect(),
        })
    })?;
    Ok(EXIT_OK)
}

/// Outcome of the independent recheck of a witness.
#[derive(Serialize)]
struct VerificationSummary {
    j_list: Vec<u64>,
    first_vanishes: bool,
    second_vanishes: bool,
    defect_limit: f64,
    max_defect_deviation: f64,
    defect_matches_limit: bool,
    defect_negative: bool,
    verdict: bool,
}

impl From<&Verification> for VerificationSummary {
    fn from(v: &Verification) -> Self {
        Self {
            j_list: v.j_list.clone(),
            first_vanishes: v.first_vanishes,
            second_vanishes: v.second_vanishes,
            defect_limit: v.defect.theoretical_limit,
            max_defect_deviation: v.defect.deviations.iter().fold(0.0f64, |m, d| m.max(d.abs())),
            defect_matches_limit: v.defect_matches_limit,
            defect_negative: v.defect_negative,
            verdict: v.verdict,
        }
    }
}

#[derive(Serialize)]
struct CounterexampleResult<'a> {
    #[serde(flatten)]
    outcome: &'a SearchOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<VerificationSummary>,
}

fn profile_table(report: &CounterexampleReport) -> Table {
    match &report.profile {
        ProfileFn::Step(f) => Table {
            header: vec!["x_left", "x_right", "value"],
            rows: f.breakpoints().windows(2).zip(f.values()).map(|(b, v)| vec![num(b[0]), num(b[1]), num(*v)]).collect(),
        },
        ProfileFn::Sampled(f) => Table {
            header: vec!["s", "v"],
            rows: f.nodes().iter().zip(f.samples()).map(|(s, v)| vec![num(*s), num(*v)]).collect(),
        },
    }
}

fn counterexample(args: &CounterexampleArgs, format: Format, config: &Value, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = MomentSpec::with_parameters(args.p, args.eps_mom, args.margin, args.range)?;
    let outcome = match args.route {
        RouteArg::Step => search_step_profile(&spec, &StepSearchOptions { levels: args.levels, seed: args.seed, ..Default::default() })?,
        RouteArg::Ode => ode_counterexample(
            &spec,
            &OdeOptions {
                basis_size: args.basis_size,
                ratio_bound: args.ratio_bound,
                n_steps: args.steps,
                ..Default::default()
            },
        )?,
    };
    let verification = match outcome.witness() {
        Some(report) => Some(VerificationSummary::from(&verify_counterexample(report, &default_j_list())?)),
        None => None,
    };
    if let (Some(path), Some(report)) = (&args.out, outcome.witness()) {
        let text = serde_json::to_string_pretty(report).map_err(CliError::internal)?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    }
    let verified = verification.as_ref().is_some_and(|v| v.verdict);
    let result = CounterexampleResult { outcome: &outcome, verification };
    emit(out, format, config, &result, || outcome.witness().map(profile_table))?;
    Ok(if verified { EXIT_OK } else { EXIT_NO_WITNESS })
}

fn defect(args: &DefectArgs, format: Format, config: &Value, out: &mut dyn Write) -> Result<i32, CliError> {
    let u = args.u.load()?;
    let v = args.v.load()?;
    let j_list = args.j.expand()?;
    let entries = j_list.par_iter().map(|&j| bl_defect(&u, &v, args.p, j)).collect::<Result<Vec<_>, _>>()?;
    let series = assemble_series(&u, &v, args.p, &j_list, entries)?;
    emit(out, format, config, &series, || {
        Some(Table {
            header: vec!["j", "D_j", "theoretical_limit", "deviation"],
            rows: (0..series.j_list.len())
                .map(|i| {
                    vec![
                        series.j_list[i].to_string(),
                        num(series.values[i]),
                        num(series.theoretical_limit),
                        num(series.deviations[i]),
                    ]
                })
                .collect(),
        })
    })?;
    Ok(EXIT_OK)
}
