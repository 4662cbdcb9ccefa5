use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rfjacobi::basis::{ExponentPair, JacobiIndex};
use rfjacobi::diagnostics::{check_stable_conditions, check_wiener_conditions, ConditionReport};
use rfjacobi::experiment::{
    apply_override, load_config_table, preset, run_with_workers, write_report, ExperimentConfig,
    PRESETS,
};
use rfjacobi::stochastic::ProcessDescriptor;
use rfjacobi::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rfj",
    version,
    about = "Random Fourier-Jacobi series experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write report.json / report.csv.
    Run(RunArgs),
    /// List the built-in presets.
    Presets,
    /// Evaluate the weight conditions without sampling.
    Check(CheckArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML config, or a report.json to replay from its provenance block.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Start from a built-in preset.
    #[arg(long)]
    preset: Option<String>,
    /// Override one config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: rfj-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProcessArg {
    Stable,
    Wiener,
}

#[derive(clap::Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    tau: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    p: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ProcessArg::Stable)]
    process: ProcessArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Presets => {
            for p in &PRESETS {
                println!("{:<34} {}", p.name, p.summary);
            }
            Ok(())
        }
        Command::Check(args) => check(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            })
        }
    }
}

fn run(args: RunArgs) -> Result<(), Error> {
    let mut table = match (&args.config, &args.preset) {
        (Some(path), _) => load_config_table(path)?,
        (None, Some(name)) => preset(name)
            .ok_or_else(|| Error::Config(format!("unknown preset '{name}' (see `rfj presets`)")))?
            .table(),
        (None, None) => return Err(Error::Config("need --config or --preset".into())),
    };
    for s in &args.set {
        apply_override(&mut table, s)?;
    }
    if let Some(seed) = args.seed {
        apply_override(&mut table, &format!("seed={seed}"))?;
    }
    if let Some(w) = args.workers {
        apply_override(&mut table, &format!("workers={w}"))?;
    }
    let cfg = ExperimentConfig::from_table(table)?;
    cfg.plan()?;
    let out = args
        .out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("rfj-out"));
    let files = run_with_workers(&cfg, cfg.workers)?;
    for path in write_report(&out, &files)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_report(rep: &ConditionReport<f64>) {
    for c in &rep.checks {
        println!(
            "{:?}: lhs {} rhs {} margin {} ({})",
            c.id,
            c.lhs,
            c.rhs,
            c.margin,
            if c.satisfied { "ok" } else { "fails" }
        );
    }
    if let Some(ok) = rep.p_at_least_alpha {
        if !ok {
            println!("warning: p >= alpha >= 1 does not hold");
        }
    }
    println!("{}, margin {}", rep.verdict, rep.margin);
}

fn check(args: CheckArgs) -> Result<(), Error> {
    let idx = JacobiIndex::new(args.gamma, args.delta)?;
    let exp = ExponentPair::new(args.eta, args.tau)?;
    let rep = match args.process {
        ProcessArg::Wiener => check_wiener_conditions(&idx, &exp),
        ProcessArg::Stable => {
            ProcessDescriptor::stable(args.alpha, 1.0)?;
            if args.p.is_nan() || args.p < 1.0 {
                return Err(Error::InvalidParameter {
                    name: "p",
                    reason: format!("{} must be >= 1", args.p),
                });
            }
            check_stable_conditions(&idx, &exp, args.p, args.alpha)
        }
    };
    print_report(&rep);
    Ok(())
}
