use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ima::experiment::sweep::DEFAULT_VALIDATE_TRIALS;
use ima::experiment::{
    parse_config, reproduce, run_configs, run_validation, Figure, Overrides, RowSources, RunOutcome,
};

#[derive(Parser)]
#[command(
    name = "ima",
    version,
    about = "Accuracy of simplified interference models against the SINR model"
)]
struct Cli {
    /// Base seed; overrides the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per point; overrides the configuration file.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (all cores when unset).
    #[arg(long, global = true, env = "IMA_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo rows only.
    Simulate { configs: Vec<PathBuf> },
    /// Closed-form rows only (Rayleigh, omnidirectional scenarios).
    Analytic { configs: Vec<PathBuf> },
    /// Monte Carlo and closed-form rows.
    Sweep { configs: Vec<PathBuf> },
    /// Regenerate a figure from the bundled configurations.
    Reproduce { figure: Figure },
    /// Check the simulator against closed forms and structural properties.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err("--threads must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    let overrides = Overrides {
        seed: cli.seed,
        n_trials: cli.trials,
    };
    let sources = |monte_carlo, analytic| RowSources {
        monte_carlo,
        analytic,
    };
    let outcome = match cli.command {
        Command::Simulate { configs } => {
            run_files(&configs, overrides, sources(true, false), &cli.out, args)?
        }
        Command::Analytic { configs } => {
            run_files(&configs, overrides, sources(false, true), &cli.out, args)?
        }
        Command::Sweep { configs } => {
            run_files(&configs, overrides, sources(true, true), &cli.out, args)?
        }
        Command::Reproduce { figure } => reproduce(figure, overrides, &cli.out, args)?,
        Command::Validate => {
            let n = cli.trials.unwrap_or(DEFAULT_VALIDATE_TRIALS);
            let mut failed = 0;
            for check in run_validation(n, cli.seed.unwrap_or(1))? {
                println!("{check}");
                failed += usize::from(!check.passed);
            }
            return Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
    };
    Ok(report(&outcome, &cli.out))
}

fn run_files(
    paths: &[PathBuf],
    overrides: Overrides,
    sources: RowSources,
    out: &std::path::Path,
    args: Vec<String>,
) -> Result<RunOutcome, Box<dyn std::error::Error>> {
    if paths.is_empty() {
        return Err("no configuration files given".into());
    }
    let mut configs = Vec::new();
    for p in paths {
        let mut cfg = parse_config(p)?;
        overrides.apply(&mut cfg)?;
        configs.push(cfg);
    }
    Ok(run_configs(&configs, sources, out, args)?)
}

fn report(outcome: &RunOutcome, out: &std::path::Path) -> ExitCode {
    for (name, rows) in &outcome.sweeps {
        println!("{name}: {} rows", rows.len());
    }
    println!("wrote {}", out.display());
    let errors: Vec<_> = outcome.errors().collect();
    if errors.is_empty() {
        return ExitCode::SUCCESS;
    }
    eprintln!("{} rows failed:", errors.len());
    for (name, row) in errors {
        eprintln!(
            "  {name} {}={} {}: {}",
            row.swept_var.as_str(),
            row.value,
            row.model,
            row.note
        );
    }
    ExitCode::FAILURE
}
