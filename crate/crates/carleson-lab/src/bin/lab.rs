//! Command-line driver for the curve-operator laboratory.
//!
//! Exit codes: 0 when every check in scope passes, 1 on a numerical check
//! failure (the failing rows are listed), 2 on usage or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use carleson_lab::config::ExperimentConfig;
use carleson_lab::experiments;
use carleson_lab::report::ExperimentReport;

#[derive(Parser)]
#[command(
    name = "lab",
    about = "Numerical experiments for modulated Hilbert transforms along monomial curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key=value configuration file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every randomized draw in the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Curve exponent of (t, t^m).
    #[arg(long, global = true)]
    m: Option<u32>,

    /// Phase exponent of e^{i N t^d}.
    #[arg(long, global = true)]
    d: Option<u32>,

    /// Stopping-time axis: x or y.
    #[arg(long, global = true)]
    axis: Option<String>,

    /// Grid points per line (power of two).
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Band-index sweep, e.g. 2:10.
    #[arg(long, global = true)]
    ell: Option<String>,

    /// Coefficient-scale sweep as dyadic exponents, e.g. 4:10.
    #[arg(long, global = true)]
    r: Option<String>,

    /// Kernel family for kernel-decay: product or ttstar.
    #[arg(long, global = true)]
    kind: Option<String>,

    /// Randomized draw count for lemma suites and signal batteries.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Also write plot.svg with the decay fit.
    #[arg(long, global = true)]
    plot: bool,

    /// Output directory for report.csv and plots.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy, PartialEq)]
enum Command {
    /// Randomized checks of the determinant, matrix and oscillatory lemmas.
    Lemmas,
    /// Oscillatory kernel decay profiles (product or adjoint-composition).
    KernelDecay,
    /// Operator-norm decay of the dyadic band pieces.
    OperatorDecay,
    /// Dilation, modulation and quadratic-twist identities.
    Symmetries,
    /// Single-annulus split: even-curve cancellation and Carleson control.
    Annulus,
    /// Curve-average square function, domination and measure decay.
    SquareFunction,
    /// Everything above at desk-scale settings.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Lemmas => "lemmas",
            Command::KernelDecay => "kernel-decay",
            Command::OperatorDecay => "operator-decay",
            Command::Symmetries => "symmetries",
            Command::Annulus => "annulus",
            Command::SquareFunction => "square-function",
            Command::All => "all",
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| e.to_string())?,
        None => ExperimentConfig::default(),
    };
    let mut set = |key: &str, value: Option<String>| -> Result<(), String> {
        if let Some(v) = value {
            cfg.set(key, &v).map_err(|e| e.to_string())?;
        }
        Ok(())
    };
    set("seed", cli.seed.map(|v| v.to_string()))?;
    set("m", cli.m.map(|v| v.to_string()))?;
    set("d", cli.d.map(|v| v.to_string()))?;
    set("axis", cli.axis.clone())?;
    set("grid", cli.grid.map(|v| v.to_string()))?;
    set("ell", cli.ell.clone())?;
    set("r", cli.r.clone())?;
    set("kind", cli.kind.clone())?;
    set("trials", cli.trials.map(|v| v.to_string()))?;
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if cli.plot {
        cfg.plot = true;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn run(command: Command, cfg: &ExperimentConfig) -> carleson_lab::Result<ExperimentReport> {
    match command {
        Command::Lemmas => experiments::run_lemmas(cfg),
        Command::KernelDecay => experiments::run_kernel_decay(cfg),
        Command::OperatorDecay => experiments::run_operator_decay(cfg),
        Command::Symmetries => experiments::run_symmetries(cfg),
        Command::Annulus => experiments::run_annulus(cfg),
        Command::SquareFunction => experiments::run_square_function(cfg),
        Command::All => experiments::run_all(cfg),
    }
}

fn plot_target(command: Command, cfg: &ExperimentConfig) -> Option<(&'static str, &'static str)> {
    match command {
        Command::KernelDecay if cfg.kind == "product" => Some(("kernel-decay-product", "r")),
        Command::KernelDecay => Some(("kernel-decay-ttstar", "ell")),
        Command::OperatorDecay => Some(("operator-decay", "ell")),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("LAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        } else {
            eprintln!("error: LAB_THREADS must be a number, got '{threads}'");
            return ExitCode::from(2);
        }
    }

    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };

    let report = match run(cli.command, &cfg) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    if let Err(e) = std::fs::create_dir_all(&cfg.out_dir) {
        eprintln!("error: cannot create {}: {e}", cfg.out_dir.display());
        return ExitCode::from(2);
    }
    let csv_path = cfg.out_dir.join("report.csv");
    if let Err(e) = report.write_csv(&csv_path) {
        eprintln!("error: cannot write {}: {e}", csv_path.display());
        return ExitCode::from(2);
    }

    if cfg.plot {
        match plot_target(cli.command, &cfg) {
            Some((experiment, x_param)) => match report.to_svg(experiment, x_param) {
                Some(svg) => {
                    let path = cfg.out_dir.join("plot.svg");
                    if let Err(e) = std::fs::write(&path, svg) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => eprintln!("warning: fewer than two plottable rows, skipping plot.svg"),
            },
            None => eprintln!("warning: no plot defined for this subcommand"),
        }
    }

    let checked = report.rows.iter().filter(|r| r.pass.is_some()).count();
    println!(
        "{}: {} rows ({} checked) -> {}",
        cli.command.name(),
        report.rows.len(),
        checked,
        csv_path.display()
    );
    let failing = report.failing_rows();
    if failing.is_empty() {
        println!("all checks passed");
        ExitCode::SUCCESS
    } else {
        println!("{} check(s) FAILED:", failing.len());
        for row in failing {
            println!(
                "  {} [{}] value={:e} slope={:?} residual={:?}",
                row.experiment,
                row.params.join(" "),
                row.value,
                row.fit_slope,
                row.fit_residual
            );
        }
        ExitCode::from(1)
    }
}
