use std::path::PathBuf;

use blb_core::inequality::ResidualKind;
use blb_core::pointwise::PsiVariant;
use blb_core::ScalarMap;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::inputs::{parse_box, parse_map, parse_p_list, parse_variant, BoxSpec, JSpec, ProfileSource, WeightSource};

#[derive(Debug, Parser)]
#[command(name = "blb", version, about = "Brezis-Lieb defects, pointwise inequalities and oscillating counterexamples")]
#[command(after_help = "Exit codes: 0 ok, 1 internal failure, 2 invalid input, 3 no witness found, 4 --expect not met.\n\
BLB_THREADS caps the worker threads; results do not depend on it.")]
pub struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// Certify residual >= -tol on a box with a grid plus derivative bounds.
    Certify(CertifyArgs),
    /// Certify one residual for a list of exponents (CSV by default).
    Scan(ScanArgs),
    /// Pairings <phi(T_j v), psi> against their weak limit.
    Weaklimit(WeakLimitArgs),
    /// Search for v with vanishing moments and negative defect limit.
    Counterexample(CounterexampleArgs),
    /// Defect series D_j for u + T_j v (CSV by default).
    Defect(DefectArgs),
    /// Run the built-in suite of elementary identities.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Nonneg,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CertifyArgs {
    /// g_p, F_p, Phi_p, F_minus_Phi_p, Fvec_p, Psi_p or Psi_slack_p.
    #[arg(long)]
    pub residual: ResidualKind,
    #[arg(long)]
    pub p: f64,
    /// Box as lo:hi[,lo:hi]; defaults to -1:1 on every axis.
    #[arg(long = "box", allow_hyphen_values = true, value_parser = parse_box)]
    #[serde(rename = "box")]
    pub domain: Option<BoxSpec>,
    /// Grid step.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Reading of Psi (as_printed or sign_corrected).
    #[arg(long, default_value = "sign_corrected", value_parser = parse_variant)]
    pub variant: PsiVariant,
    /// Exit with 4 unless the verdict is certified_nonneg_up_to_tol.
    #[arg(long, value_enum)]
    pub expect: Option<Expectation>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value = "g_p")]
    pub residual: ResidualKind,
    /// Comma-separated exponents.
    #[arg(long, default_value = "1.2,1.5,2,2.5,2.9,3,3.5,4,5", value_parser = parse_p_list)]
    pub p_list: PList,
    #[arg(long = "box", allow_hyphen_values = true, value_parser = parse_box)]
    #[serde(rename = "box")]
    pub domain: Option<BoxSpec>,
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PList(pub Vec<f64>);

#[derive(Clone, Debug, Args, Serialize)]
pub struct WeakLimitArgs {
    /// Profile: const:<c>, file:<json> or witness:<report json>.
    #[arg(long, allow_hyphen_values = true)]
    pub v: ProfileSource,
    /// Step weight: const:<c> or file:<json>.
    #[arg(long, default_value = "const:1", allow_hyphen_values = true)]
    pub psi: WeightSource,
    /// Map applied to T_j v: identity, power_sign:q, abs_power:p, fp:p, gp:p,
    /// phi_p:p, const:c, poly:c0,c1,... or a JSON object.
    #[arg(long, value_parser = parse_map)]
    pub phi: Option<ScalarMap>,
    /// geometric:lo:hi, range:lo:hi or a comma list.
    #[arg(long, default_value = "geometric:1:1024")]
    pub j: JSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteArg {
    Step,
    Ode,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum, default_value = "step")]
    pub route: RouteArg,
    /// Levels of the step profile (step route).
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Profiles take values in [-range, range].
    #[arg(long, default_value_t = 10.0)]
    pub range: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub eps_mom: f64,
    /// The defect limit must be at most -margin.
    #[arg(long, default_value_t = 1e-3)]
    pub margin: f64,
    /// Hat functions per side of 0 (ode route).
    #[arg(long, default_value_t = 40)]
    pub basis_size: usize,
    /// Bound on max/min of the density (ode route).
    #[arg(long, default_value_t = 1e6)]
    pub ratio_bound: f64,
    /// Uniform integration steps before knot refinement (ode route).
    #[arg(long, default_value_t = 4096)]
    pub steps: usize,
    /// Also write the bare report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DefectArgs {
    #[arg(long)]
    pub p: f64,
    /// Step function u: const:<c> or file:<json>.
    #[arg(long, default_value = "const:1", allow_hyphen_values = true)]
    pub u: WeightSource,
    /// Profile v: const:<c>, file:<json> or witness:<report json>.
    #[arg(long, allow_hyphen_values = true)]
    pub v: ProfileSource,
    #[arg(long, default_value = "geometric:1:1024")]
    pub j: JSpec,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SelftestArgs {}
