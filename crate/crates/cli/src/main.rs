//! `tolstack` command-line front end.
//!
//! Exit status: 0 on success, 1 on a numerical failure, 2 on bad input.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tolstack::bounds::{bound_curve, rho_grid, tolerance};
use tolstack::io::{read_chain, write_results, write_results_to_path, OutputFormat, Results};
use tolstack::montecarlo::{mc_prob, mc_quantile, McConfig, DEFAULT_DRAWS};
use tolstack::study::{run_study, StudySpec};
use tolstack::{ConfidenceLevel, Error, Method};

#[derive(Debug, Parser)]
#[command(name = "tolstack", version, about = "Tolerance stack-up analysis for uniform inputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Output half-width of a chain under every requested method.
    Analyze(AnalyzeArgs),
    /// Half-width as a function of the confidence level, as CSV.
    Sweep(SweepArgs),
    /// Batch study over random chains.
    Study(StudyArgs),
    /// Monte Carlo quantile (with --rho) or exceedance probability (with --t).
    Mc(McArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Chain file (.csv or .json).
    file: PathBuf,
    /// Two-sided out-of-tolerance probability.
    #[arg(long, default_value_t = ConfidenceLevel::SIX_SIGMA)]
    rho: f64,
    /// Comma-separated methods; defaults to all analytic methods.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    /// table, csv or json.
    #[arg(long, default_value = "table")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SweepArgs {
    file: PathBuf,
    #[arg(long)]
    rho_min: f64,
    #[arg(long)]
    rho_max: f64,
    #[arg(long)]
    points: usize,
    /// Space the levels linearly instead of geometrically.
    #[arg(long)]
    linear: bool,
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct StudyArgs {
    /// Contributors per chain.
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Smallest half-width.
    #[arg(long, default_value_t = 1.0)]
    lo: f64,
    /// Largest half-width.
    #[arg(long, default_value_t = 5.0)]
    hi: f64,
    #[arg(long)]
    chains: usize,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    seed: u64,
    /// Monte Carlo draws per chain; 0 disables the Monte Carlo column.
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    mc_draws: usize,
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    /// Output CSV path.
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct McArgs {
    file: PathBuf,
    /// Estimate the (1 - rho) quantile of |Y|.
    #[arg(long, required_unless_present = "t", conflicts_with = "t")]
    rho: Option<f64>,
    /// Estimate P(|Y| >= t).
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    draws: usize,
    #[arg(long)]
    seed: u64,
}

fn methods_or_all(methods: Vec<Method>) -> Vec<Method> {
    if methods.is_empty() {
        Method::ANALYTIC.to_vec()
    } else {
        methods
    }
}

fn analyze(args: AnalyzeArgs) -> tolstack::Result<Vec<u8>> {
    let chain = read_chain(&args.file)?;
    let rho = ConfidenceLevel::new(args.rho)?;
    let results = methods_or_all(args.methods)
        .into_iter()
        .map(|m| tolerance(m, &chain, rho))
        .collect::<tolstack::Result<Vec<_>>>()?;
    let mut out = Vec::new();
    write_results(Results::Tolerance(&results), args.format, &mut out)?;
    Ok(out)
}

fn sweep(args: SweepArgs) -> tolstack::Result<Vec<u8>> {
    let chain = read_chain(&args.file)?;
    let grid = rho_grid(args.rho_min, args.rho_max, args.points, !args.linear)?;
    let curve = bound_curve(&chain, &grid, &methods_or_all(args.methods))?;
    let mut out = Vec::new();
    write_results(Results::Curve(&curve), args.format, &mut out)?;
    Ok(out)
}

fn study(args: StudyArgs) -> tolstack::Result<Vec<u8>> {
    let spec = StudySpec {
        n_inputs: args.n,
        bound_lo: args.lo,
        bound_hi: args.hi,
        n_chains: args.chains,
        rho: ConfidenceLevel::new(args.rho)?,
        seed: args.seed,
        methods: methods_or_all(args.methods),
        mc_draws: (args.mc_draws > 0).then_some(args.mc_draws),
    };
    let rows = run_study(&spec)?;
    write_results_to_path(Results::Study(&rows), OutputFormat::Csv, &args.out)?;
    Ok(Vec::new())
}

fn mc(args: McArgs) -> tolstack::Result<Vec<u8>> {
    let chain = read_chain(&args.file)?;
    let cfg = McConfig::new(args.draws, args.seed)?;
    let mut out = Vec::new();
    match (args.rho, args.t) {
        (Some(rho), _) => {
            let e = mc_quantile(&chain, ConfidenceLevel::new(rho)?, &cfg);
            writeln!(out, "rho,t_hat,stderr")?;
            writeln!(out, "{rho:?},{:?},{:?}", e.value, e.stderr)?;
        }
        (None, Some(t)) => {
            let e = mc_prob(&chain, t, &cfg)?;
            writeln!(out, "t,p_hat,stderr")?;
            writeln!(out, "{t:?},{:?},{:?}", e.value, e.stderr)?;
        }
        (None, None) => unreachable!("clap enforces --rho or --t"),
    }
    Ok(out)
}

fn exit_code(err: &Error) -> u8 {
    if err.is_input_error() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => sweep(a),
        Command::Study(a) => study(a),
        Command::Mc(a) => mc(a),
    };
    match outcome {
        Ok(bytes) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(&bytes).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
