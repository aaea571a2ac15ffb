//! `fourier-cond`: bounds, oracle queries, τ sweeps, interpolant export,
//! and the reference experiments, from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 inapplicable hypothesis.
//! `FOURIER_COND_THREADS` caps the worker pool.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fourier_cond::bounds::{
    clumps_corollary_bound, gautschi_bazan_bound, sigma1_upper_bound, theorem1_bound,
    theorem2_bound, well_separated_bounds, BoundMethod, BoundReport, Inapplicable, Theorem1Variant,
    Theorem2Variant,
};
use fourier_cond::experiments as exp;
use fourier_cond::matrix::{extreme_singular_values, OracleError};
use fourier_cond::poly::{
    bad_set_interpolant_general, bad_set_interpolant_separated, duality_lower_bound,
    good_set_interpolant, lagrange_family, min_norm_interpolant, InterpolationError, TrigPoly,
};
use fourier_cond::sweep::{best_bound, candidate_taus, SweepError};
use fourier_cond::torus::{neighborhood_split, validate_clumps, GeometryError, NodeSet};
use num_complex::Complex64;
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "fourier-cond",
    about = "Certified bounds on the extreme singular values of non-harmonic Fourier matrices",
    long_about = None,
    after_help = "Node files are JSON arrays of doubles in [0,1); the reader wraps and sorts.\n\
        Experiment CSVs:\n\
          motivational: m,tau,sigma_min,main1,gautschi_bazan\n\
          multiscale:   eps,sigma_min,main1,gautschi_bazan\n\
          spiketrain:   eps,s,sigma_min,main1,thm2_spike_train,barnett_reference\n\
                        (barnett_reference is a reference-only comparison curve)\n\
          colliding:    beta,tau,sigma_min,main1,gautschi_bazan\n\
        Exit codes: 0 ok, 1 input error, 2 inapplicable hypothesis.\n\
        FOURIER_COND_THREADS caps parallelism."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one bound and print its report as JSON.
    Bound(BoundArgs),
    /// Print sigma_1, sigma_s, and the condition number as JSON.
    Svd(SvdArgs),
    /// Sweep a bound over candidate tau values and print the result.
    Sweep(SweepArgs),
    /// Reproduce one of the reference experiments (CSV + summary JSON).
    Experiment(ExperimentArgs),
    /// Export interpolants with certified and measured norms as JSON.
    Interpolant(InterpolantArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// Path to a JSON array of node positions.
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// A value in (0, 1/2], or `auto` to sweep the breakpoint grid.
    #[arg(long, default_value = "auto")]
    tau: String,
    /// Separation floor in (0, 1/m], or `auto` for the measured one.
    #[arg(long, default_value = "auto")]
    delta: String,
    /// Clump partition (JSON array of arrays); required by clumps-corollary.
    #[arg(long)]
    clumps: Option<PathBuf>,
}

#[derive(Args)]
struct SvdArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    m: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Comma-separated tau values; defaults to the breakpoint grid.
    #[arg(long)]
    taus: Option<String>,
    #[arg(long, default_value = "auto")]
    delta: String,
    /// Also write the per-candidate table as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    name: ExperimentName,
    /// Output directory for CSV files and the summary JSON.
    #[arg(long)]
    out: PathBuf,
    /// Motivational only: sweep tau instead of the hand-picked schedule.
    #[arg(long)]
    auto_tau: bool,
}

#[derive(Args)]
struct InterpolantArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    tau: f64,
    /// Index of the center node within the sorted set.
    #[arg(long)]
    center: usize,
    #[arg(long, value_enum)]
    kind: InterpolantKind,
    /// Separation floor for bad-separated; defaults to the measured one.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Main1,
    Main2,
    Thm2eq3,
    Thm2eq4,
    ClumpsCorollary,
    GautschiBazan,
    WellSeparatedLower,
    Sigma1Upper,
}

impl From<MethodArg> for BoundMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Main1 => BoundMethod::Main1,
            MethodArg::Main2 => BoundMethod::Main2,
            MethodArg::Thm2eq3 => BoundMethod::Thm2Eq3,
            MethodArg::Thm2eq4 => BoundMethod::Thm2Eq4,
            MethodArg::ClumpsCorollary => BoundMethod::ClumpsCorollary,
            MethodArg::GautschiBazan => BoundMethod::GautschiBazan,
            MethodArg::WellSeparatedLower => BoundMethod::WellSeparatedLower,
            MethodArg::Sigma1Upper => BoundMethod::Sigma1Upper,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentName {
    Motivational,
    Multiscale,
    Spiketrain,
    Colliding,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterpolantKind {
    Family,
    Good,
    BadGeneral,
    BadSeparated,
    Minnorm,
}

/// Errors split by the exit code they map to.
enum CliError {
    /// Malformed input: exit 1.
    Input(String),
    /// A theorem hypothesis the data fails: exit 2.
    Inapplicable(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Inapplicable(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Inapplicable(m) => m,
        }
    }
}

impl From<Inapplicable> for CliError {
    fn from(e: Inapplicable) -> Self {
        CliError::Inapplicable(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Underdetermined { .. } => CliError::Inapplicable(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<InterpolationError> for CliError {
    fn from(e: InterpolationError) -> Self {
        match e {
            InterpolationError::Geometry(g) => g.into(),
            InterpolationError::Oracle(o) => o.into(),
            InterpolationError::DataLengthMismatch { .. } => CliError::Input(e.to_string()),
            other => CliError::Inapplicable(other.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Geometry(g) => g.into(),
            SweepError::MethodNotSweepable(_) => CliError::Input(e.to_string()),
            SweepError::NoAdmissibleTau => CliError::Inapplicable(e.to_string()),
        }
    }
}

impl From<exp::ExperimentError> for CliError {
    fn from(e: exp::ExperimentError) -> Self {
        match e {
            exp::ExperimentError::Geometry(g) => g.into(),
            exp::ExperimentError::Oracle(o) => o.into(),
            exp::ExperimentError::Inapplicable(i) => i.into(),
            exp::ExperimentError::Sweep(s) => s.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    configure_threads();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("FOURIER_COND_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn load_nodes(path: &Path) -> Result<NodeSet, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_auto(field: &str, value: &str) -> Result<Option<f64>, CliError> {
    if value == "auto" {
        return Ok(None);
    }
    value
        .parse::<f64>()
        .map(Some)
        .map_err(|_| CliError::Input(format!("--{field} must be a number or `auto`")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bound(args) => cmd_bound(args),
        Command::Svd(args) => cmd_svd(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Interpolant(args) => cmd_interpolant(args),
    }
}

fn cmd_bound(args: BoundArgs) -> Result<(), CliError> {
    let nodes = load_nodes(&args.nodes)?;
    let method: BoundMethod = args.method.into();
    let tau = parse_auto("tau", &args.tau)?;
    let delta = parse_auto("delta", &args.delta)?;
    let report: BoundReport = match method {
        BoundMethod::Main1 | BoundMethod::Main2 | BoundMethod::Thm2Eq3 | BoundMethod::Thm2Eq4 => {
            match tau {
                Some(tau) => match method {
                    BoundMethod::Main1 => {
                        theorem1_bound(args.m, tau, &nodes, Theorem1Variant::Eq1)?
                    }
                    BoundMethod::Main2 => {
                        theorem1_bound(args.m, tau, &nodes, Theorem1Variant::Eq2)?
                    }
                    BoundMethod::Thm2Eq3 => {
                        theorem2_bound(args.m, tau, delta, &nodes, Theorem2Variant::Eq3)?
                    }
                    _ => theorem2_bound(args.m, tau, delta, &nodes, Theorem2Variant::Eq4)?,
                },
                None => {
                    let grid = candidate_taus(&nodes)?;
                    best_bound(args.m, &nodes, &grid, method, delta)?
                        .best_report()
                        .clone()
                }
            }
        }
        BoundMethod::ClumpsCorollary => {
            let path = args.clumps.ok_or_else(|| {
                CliError::Input("clumps-corollary needs --clumps <json partition>".into())
            })?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let raw: Vec<Vec<f64>> = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let partition = raw
                .into_iter()
                .map(NodeSet::new)
                .collect::<Result<Vec<_>, _>>()?;
            let sep = nodes.min_separation()?;
            let delta = delta.unwrap_or_else(|| sep.min(1.0 / args.m as f64));
            let params = validate_clumps(&nodes, &partition, delta)?;
            clumps_corollary_bound(args.m, &params)?
        }
        BoundMethod::GautschiBazan => gautschi_bazan_bound(args.m, &nodes)?,
        BoundMethod::WellSeparatedLower => {
            let (lower, _) = well_separated_bounds(args.m, &nodes)?;
            BoundReport {
                method: BoundMethod::WellSeparatedLower,
                m: args.m,
                tau: None,
                delta: None,
                value: lower,
                per_node: None,
            }
        }
        BoundMethod::Sigma1Upper => {
            let tau = tau.ok_or_else(|| CliError::Input("sigma1-upper needs --tau".into()))?;
            sigma1_upper_bound(args.m, tau, &nodes)?
        }
    };
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}

fn cmd_svd(args: SvdArgs) -> Result<(), CliError> {
    let nodes = load_nodes(&args.nodes)?;
    let data = extreme_singular_values(args.m, &nodes)?;
    let out = json!({
        "m": args.m,
        "s": nodes.len(),
        "sigma_1": data.sigma_max,
        "sigma_s": data.sigma_min,
        "condition_number": data.condition_number(),
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let nodes = load_nodes(&args.nodes)?;
    let method: BoundMethod = args.method.into();
    let delta = parse_auto("delta", &args.delta)?;
    let taus = match &args.taus {
        Some(list) => {
            let parsed = list
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Input("--taus must be comma-separated numbers".into()))?;
            if let Some(&bad) = parsed.iter().find(|t| !(**t > 0.0 && **t <= 0.5)) {
                return Err(CliError::Input(format!("tau = {bad} outside (0, 1/2]")));
            }
            parsed
        }
        None => candidate_taus(&nodes)?,
    };
    let result = best_bound(args.m, &nodes, &taus, method, delta)?;
    if let Some(path) = &args.csv {
        std::fs::write(path, result.to_csv())?;
    }
    println!("{}", serde_json::to_string_pretty(&result).unwrap());
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out)?;
    let out = |name: &str| args.out.join(name);
    match args.name {
        ExperimentName::Motivational => {
            let report = exp::run_motivational(54, 600, args.auto_tau)?;
            std::fs::write(out("motivational.csv"), report.to_csv())?;
            std::fs::write(
                out("motivational_summary.json"),
                serde_json::to_string_pretty(&report.summary_json()).unwrap(),
            )?;
        }
        ExperimentName::Multiscale => {
            let grid = exp::multiscale_default_grid();
            let mut summaries = Vec::new();
            for m in [400usize, 100] {
                let report = exp::run_multiscale(m, &grid)?;
                std::fs::write(out(&format!("multiscale_m{m}.csv")), report.to_csv())?;
                summaries.push(report.summary_json());
            }
            std::fs::write(
                out("multiscale_summary.json"),
                serde_json::to_string_pretty(&serde_json::Value::Array(summaries)).unwrap(),
            )?;
        }
        ExperimentName::Spiketrain => {
            let report = exp::run_spike_train(200, 5, 30, &[0.9, 0.7, 0.5])?;
            std::fs::write(out("spiketrain.csv"), report.to_csv())?;
            std::fs::write(
                out("spiketrain_summary.json"),
                serde_json::to_string_pretty(&report.summary_json()).unwrap(),
            )?;
        }
        ExperimentName::Colliding => {
            let m = 100;
            let report = exp::run_colliding(m, &exp::colliding_default_grid(m))?;
            std::fs::write(out("colliding.csv"), report.to_csv())?;
            std::fs::write(
                out("colliding_summary.json"),
                serde_json::to_string_pretty(&report.summary_json()).unwrap(),
            )?;
        }
    }
    Ok(())
}

fn poly_entry(
    index: usize,
    poly: &TrigPoly,
    l2_bound: Option<f64>,
    sup_bound: Option<f64>,
) -> serde_json::Value {
    json!({
        "index": index,
        "deg": poly.deg(),
        "l2_bound": l2_bound,
        "sup_bound": sup_bound,
        "measured_l2": poly.l2_norm(),
        "measured_sup": poly.sup_norm(),
        "coeff_l1": poly.coeff_l1_norm(),
        "poly": poly,
    })
}

fn cmd_interpolant(args: InterpolantArgs) -> Result<(), CliError> {
    let nodes = load_nodes(&args.nodes)?;
    if args.center >= nodes.len() {
        return Err(CliError::Input(format!(
            "--center {} out of range for {} nodes",
            args.center,
            nodes.len()
        )));
    }
    let center = nodes.points()[args.center];
    let out = match args.kind {
        InterpolantKind::Family => {
            let family = lagrange_family(args.m, args.tau, &nodes)?;
            let items: Vec<_> = family
                .polys
                .iter()
                .enumerate()
                .map(|(i, p)| poly_entry(i, p, Some(family.l2_bounds[i]), None))
                .collect();
            json!({
                "kind": "family",
                "budget_m": family.budget_m,
                "kronecker_residual": family.kronecker_residual(),
                "duality_lower_bound": duality_lower_bound(&family),
                "items": items,
            })
        }
        InterpolantKind::Good => {
            let (_, good) = neighborhood_split(center, args.tau, &nodes)?;
            let g = good_set_interpolant(args.tau, &good, center)?;
            json!({
                "kind": "good",
                "center": center.value(),
                "zero_set_size": good.len(),
                "items": [poly_entry(0, &g.poly, Some(g.l2_bound), g.sup_bound)],
            })
        }
        InterpolantKind::BadGeneral => {
            let (bad, _) = neighborhood_split(center, args.tau, &nodes)?;
            let shifted = bad.translate(-center.value())?;
            let b = bad_set_interpolant_general(args.m, bad.len(), &shifted)?;
            json!({
                "kind": "bad-general",
                "center": center.value(),
                "bad_set_size": bad.len(),
                "items": [poly_entry(0, &b.poly, Some(b.l2_bound), None)],
            })
        }
        InterpolantKind::BadSeparated => {
            let (bad, _) = neighborhood_split(center, args.tau, &nodes)?;
            let shifted = bad.translate(-center.value())?;
            let measured = if bad.len() >= 2 {
                shifted.min_separation()?
            } else {
                1.0 / args.m as f64
            };
            let delta = args
                .delta
                .unwrap_or_else(|| measured.min(1.0 / args.m as f64));
            let b = bad_set_interpolant_separated(args.m, bad.len(), delta, &shifted)?;
            json!({
                "kind": "bad-separated",
                "center": center.value(),
                "bad_set_size": bad.len(),
                "delta": delta,
                "items": [poly_entry(0, &b.poly, Some(b.l2_bound), None)],
            })
        }
        InterpolantKind::Minnorm => {
            let mut w = vec![Complex64::new(0.0, 0.0); nodes.len()];
            w[args.center] = Complex64::new(1.0, 0.0);
            let f = min_norm_interpolant(args.m, &nodes, &w)?;
            json!({
                "kind": "minnorm",
                "center": center.value(),
                "items": [poly_entry(0, &f, None, None)],
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}
