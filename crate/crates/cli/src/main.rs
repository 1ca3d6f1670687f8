use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use infospread::config::db_to_linear;
use infospread::Mode;
use infospread_cli::{commands, exit, CliError, ExperimentConfig, Output, VerifyGrid};

#[derive(Parser, Debug)]
#[command(
    name = "infospread",
    version,
    about = "D2D information spreading: analysis, oracle, simulation and power control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Configuration file (`key = value` lines); keys not given keep the preset values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base preset.
    #[arg(long, global = true, default_value = "fig2")]
    preset: String,
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Target SIR in dB, stored as linear.
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta_db: Option<f64>,
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Cross-check the optimizer against a brute-force grid.
    #[arg(long, global = true)]
    oracle: bool,
    /// CSV destination; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic coverage curve and redundancy per slot.
    Predict,
    /// Closed forms against nested quadrature over a parameter grid.
    Verify,
    /// Monte Carlo coverage curve and homogeneity diagnostics.
    Simulate,
    /// Optimal constant and dynamic power control.
    Optimize,
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::preset(&common.preset)?;
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        cfg = cfg.merge_str(&text)?;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(db) = common.beta_db {
        cfg.network.beta = db_to_linear(db);
    }
    if let Some(m) = common.mode {
        cfg.mode = m;
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let cfg = load(&cli.common)?;
    let output = match cli.command {
        Command::Predict => commands::predict(&cfg)?,
        Command::Verify => commands::verify(&cfg, &VerifyGrid::default())?,
        Command::Simulate => commands::simulate(&cfg)?,
        Command::Optimize => commands::optimize(&cfg, cli.common.oracle)?,
    };
    match &cfg.output {
        Some(path) => std::fs::write(path, &output.csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => emit(&output.csv),
    }
    Ok(output)
}

/// Writes to standard output; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(output) => {
            emit(&output.report);
            match output.failure {
                Some(err) => {
                    eprintln!("error: {err}");
                    err.exit_code()
                }
                None => exit::OK,
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
