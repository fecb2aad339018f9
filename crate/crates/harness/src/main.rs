use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use confounded_ridge_harness::checks::{run_all_timed, CheckContext};
use confounded_ridge_harness::commands;
use confounded_ridge_harness::kernels::{KernelName, Perturbation};
use confounded_ridge_harness::output::{json_bytes, write_artifact};
use confounded_ridge_harness::{ExperimentConfig, HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Print the derived statistical model and scalar summaries as JSON.
    Derive,
    /// Write observational and interventional samples as CSV.
    Simulate,
    /// Limiting min-norm risks over the gamma grid.
    RiskCurve,
    /// Limiting min-norm risks for the three signal regimes.
    Figure2,
    /// Limiting versus finite-sample risks of min-norm and optimally tuned ridge.
    Figure3,
    /// Optimal statistical and causal penalties over the (zeta, gamma) grid.
    OptimalLambda,
    /// Run the invariant check suite.
    Check,
}

#[derive(Debug, Parser)]
#[command(name = "confounded-ridge", version, about = "Ridge and min-norm regression under hidden confounding")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Smaller grids for `check`.
    #[arg(long)]
    quick: bool,
    /// Scale one kernel (m, m_prime, risk_derivative) by 1 + EPS during `check`.
    #[arg(long, num_args = 2, value_names = ["NAME", "EPS"])]
    perturb: Option<Vec<String>>,
}

fn parse_perturbation(args: &[String]) -> Result<Perturbation> {
    let kernel: KernelName = args[0].parse().map_err(HarnessError::Config)?;
    let eps: f64 = args[1]
        .parse()
        .map_err(|_| HarnessError::Config(format!("perturbation size must be a number, got {:?}", args[1])))?;
    if !eps.is_finite() {
        return Err(HarnessError::Config("perturbation size must be finite".into()));
    }
    Ok(Perturbation { kernel, eps })
}

fn run(cli: Cli) -> Result<()> {
    let mut config = ExperimentConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| config.outputs.clone());
    let perturbation = cli.perturb.as_deref().map(parse_perturbation).transpose()?;

    match cli.command {
        Command::Derive => {
            let report = commands::derive_report(&config)?;
            print!("{}", String::from_utf8_lossy(&json_bytes(&report)));
        }
        Command::Simulate => {
            for path in commands::run_simulate(&config, &out)? {
                println!("wrote {}", path.display());
            }
        }
        Command::RiskCurve => println!("wrote {}", commands::run_risk_curve(&config, &out)?.display()),
        Command::Figure2 => println!("wrote {}", commands::run_figure2(&config, &out)?.display()),
        Command::Figure3 => println!("wrote {}", commands::run_figure3(&config, &out)?.display()),
        Command::OptimalLambda => println!("wrote {}", commands::run_optimal_lambda(&config, &out)?.display()),
        Command::Check => {
            let ctx = CheckContext::new(config.seed, cli.quick, perturbation);
            let report = run_all_timed(&ctx, |o, secs| {
                let status = if o.passed { "ok  " } else { "FAIL" };
                println!("{status} {:<48} {secs:>7.2}s  {}", o.name, o.detail);
            });
            let path = write_artifact(&out, "check_report.json", &json_bytes(&report))?;
            println!("{}/{} checks passed; report at {}", report.summary.passed, report.summary.total, path.display());
            if !report.all_passed {
                return Err(HarnessError::ChecksFailed(report.failed_names().join(", ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
