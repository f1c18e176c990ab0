//! Thin command-line front end over [`tsd::pipeline`].
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver non-convergence
//! (the result is still written), 4 validation failure. Set `TSD_LOG=info`
//! (or `debug`) for progress logging.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tsd::pipeline::{
    run_reconstruct, run_simulate, run_sweep, run_validate, write_simulation, ExperimentConfig,
};
use tsd::tomography::TomographyDataset;

#[derive(Parser)]
#[command(name = "tsd", version, about = "Tomography, reconstruction, and error decomposition for single-qubit gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a twelve-setting tomography dataset from a config file.
    Simulate(SimulateArgs),
    /// Fit a channel to a dataset and decompose its error against a target.
    Reconstruct(ReconstructArgs),
    /// Run simulate + reconstruct across a sweep of noise values.
    Sweep(SweepArgs),
    /// Check a dataset or result file and list the findings.
    Validate(ValidateArgs),
}

/// Config-file overrides shared by `simulate` and `sweep`.
#[derive(Args)]
struct ConfigOverrides {
    /// Experiment config (JSON).
    #[arg(long, value_name = "JSON")]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's shots per setting.
    #[arg(long)]
    shots: Option<u64>,
    /// Record exact probabilities instead of sampled counts.
    #[arg(long)]
    exact_probabilities: bool,
    /// Apply angle noise to the preparation and analysis rotations too.
    #[arg(long)]
    noise_all_gates: bool,
    /// Output directory (defaults to the config's output_dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl ConfigOverrides {
    fn load(&self) -> tsd::Result<ExperimentConfig> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.plan.seed = seed;
        }
        if let Some(shots) = self.shots {
            config.plan.n_shots = shots;
        }
        if self.exact_probabilities {
            config.plan.shot_noise = false;
        }
        if self.noise_all_gates {
            config.noise_scope = tsd::simulator::NoiseScope::AllGates;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Dataset to fit (JSON).
    dataset: PathBuf,
    /// Target gate label for the error decomposition; defaults to the
    /// dataset's own gate label.
    target: Option<String>,
    /// Solver settings (JSON config file; only the "solver" block is used).
    #[arg(long, value_name = "JSON")]
    config: Option<PathBuf>,
    /// Identity-labeled reference dataset; folds its channel into the
    /// measurement model to cancel preparation/analysis errors.
    #[arg(long, value_name = "FILE")]
    mitigate: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct ValidateArgs {
    /// Dataset or result file (JSON).
    file: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("TSD_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> tsd::Result<u8> {
    match cli.command {
        Command::Simulate(args) => {
            let config = args.overrides.load()?;
            let output = run_simulate(&config)?;
            let paths = write_simulation(&output, &config.output_dir)?;
            for path in &paths {
                println!("wrote {}", path.display());
            }
            println!(
                "provenance: {}",
                output.dataset.provenance.as_ref().unwrap_or(&serde_json::Value::Null)
            );
            Ok(0)
        }
        Command::Reconstruct(args) => {
            let dataset = TomographyDataset::load(&args.dataset)?;
            let solver = match &args.config {
                Some(path) => ExperimentConfig::load(path)?.solver,
                None => Default::default(),
            };
            let reference = args
                .mitigate
                .as_ref()
                .map(|path| TomographyDataset::load(path))
                .transpose()?;
            let report =
                run_reconstruct(&dataset, args.target.as_deref(), reference.as_ref(), &solver)?;
            std::fs::create_dir_all(&args.out)?;
            let path = args.out.join("result.json");
            report.save(&path)?;
            println!("wrote {}", path.display());
            println!(
                "gate {}: eps2 total {:.3e} (markovian {:.3e}, coherent {:.3e}, nonmarkovian {:.3e}), F_av {:.6}",
                report.gate,
                report.budget.total,
                report.budget.markovian,
                report.budget.coherent,
                report.budget.nonmarkovian,
                report.f_average
            );
            if report.gross_setting_error == Some(true) {
                eprintln!("warning: setting channel far from identity; mitigation unreliable");
            }
            if report.reconstruction.converged {
                Ok(0)
            } else {
                eprintln!(
                    "solver did not converge in {} iterations (primal {:.3e}, dual {:.3e})",
                    report.reconstruction.iterations,
                    report.reconstruction.kkt_primal,
                    report.reconstruction.kkt_dual
                );
                Ok(3)
            }
        }
        Command::Sweep(args) => {
            let config = args.overrides.load()?;
            let report = run_sweep(&config)?;
            let (csv_path, json_path) = report.save(&config.output_dir)?;
            println!("wrote {}", csv_path.display());
            println!("wrote {}", json_path.display());
            if report.all_converged() {
                Ok(0)
            } else {
                eprintln!("solver did not converge at every sweep point");
                Ok(3)
            }
        }
        Command::Validate(args) => {
            let report = run_validate(&args.file)?;
            println!("{}: {}", args.file.display(), report.kind);
            for check in &report.checks {
                let status = if check.passed { "ok" } else { "FAIL" };
                println!("  {status:4} {}: {}", check.name, check.detail);
            }
            Ok(if report.passed() { 0 } else { 4 })
        }
    }
}
