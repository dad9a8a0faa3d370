use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tdho_cli::commands::{self, report_path, to_json, write_json};
use tdho_cli::{configure_threads, CliError, Overrides, Scenario};

#[derive(Parser)]
#[command(
    name = "tdho",
    version,
    about = "Exact wavefunctions of time-dependent harmonic oscillators"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario TOML file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated mode indices, replacing the scenario's list.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<usize>>,
    /// Time step of the Schrödinger-residual check.
    #[arg(long)]
    dt: Option<f64>,
    /// Number of grid nodes.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Verb {
    /// Write wavefunction frames as CSV plus a JSON summary.
    Evolve(Common),
    /// Run the verification checks and report them as JSON.
    Verify(Common),
    /// Geometric and dynamical phases over the detected period.
    Phase(Common),
    /// Matrix elements of the quadratic invariant over time.
    Invariant(Common),
}

fn load(c: &Common) -> Result<Scenario, CliError> {
    let mut s = Scenario::load(&c.config)?;
    s.apply(&Overrides {
        modes: c.modes.clone(),
        dt: c.dt,
        grid_n: c.grid_n,
    })?;
    Ok(s)
}

fn emit<T: serde::Serialize>(c: &Common, scenario: &Scenario, verb: &str, report: &T) -> Result<(), CliError> {
    match &c.out {
        Some(out) => {
            std::fs::create_dir_all(out)?;
            let path = report_path(out, scenario, verb);
            write_json(&path, report)?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", to_json(report)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.verb {
        Verb::Evolve(c) => {
            let s = load(&c)?;
            let out = c.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let summary = commands::evolve(&s, &out)?;
            for m in &summary.modes {
                println!("wrote {} ({} rows)", out.join(&m.file).display(), m.rows);
            }
            Ok(())
        }
        Verb::Verify(c) => {
            let s = load(&c)?;
            let report = commands::verify(&s, c.seed)?;
            emit(&c, &s, "verify", &report)?;
            for check in report.checks.iter().filter(|c| !c.pass) {
                eprintln!(
                    "FAIL {}: {:e} (threshold {:e})",
                    check.name, check.value, check.threshold
                );
            }
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Check(format!("scenario {} failed verification", s.name)))
            }
        }
        Verb::Phase(c) => {
            let s = load(&c)?;
            let table = commands::phase(&s)?;
            print!("{}", table.render());
            if c.out.is_some() {
                emit(&c, &s, "phase", &table)?;
            }
            Ok(())
        }
        Verb::Invariant(c) => {
            let s = load(&c)?;
            let report = commands::invariant(&s)?;
            emit(&c, &s, "invariant", &report)?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Check(format!(
                    "invariant drifts by {:e}, spectrum off by {:e}",
                    report.max_deviation, report.spectrum_error
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tdho: {e}");
            e.exit_code()
        }
    }
}
