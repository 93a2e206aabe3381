use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mrlrc::acceptance;
use mrlrc::dss::parse_transcript;
use mrlrc::scenario::{Scenario, ScenarioConfig};
use mrlrc::sweep::{sweep, to_csv, SweepParams};
use mrlrc::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_UNRECOVERABLE: u8 = 2;
const EXIT_ACCEPTANCE: u8 = 3;

#[derive(Parser)]
#[command(name = "mrlrc", version, about = "MR-LRC global repair simulator and secrecy analyzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode, fail nodes, repair, and report formula and oracle secrecy.
    Simulate {
        config: PathBuf,
        /// Transcript output (default: the config path with a `.transcript` extension).
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Secrecy dimension versus number of groups, as CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        g_min: usize,
        #[arg(long)]
        g_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the pinned acceptance checks.
    Selftest,
    /// Re-analyze a transcript against the scenario it came from.
    Analyze { transcript: PathBuf, config: PathBuf },
}

/// Failures split by exit status.
enum Failure {
    Config(String),
    Unrecoverable(String),
    Acceptance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unrecoverable(_) | Error::NotPIndependent | Error::Invariant(_) | Error::TooLarge(_) => {
                Failure::Unrecoverable(e.to_string())
            }
            other => Failure::Config(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Config(format!("{}: {e}", path.display()))
}

fn simulate(config: &Path, transcript: Option<PathBuf>, report: Option<PathBuf>) -> Result<(), Failure> {
    let scenario = Scenario::from_path(config)?;
    let sim = scenario.simulate()?;
    let transcript = transcript.unwrap_or_else(|| config.with_extension("transcript"));
    std::fs::write(&transcript, &sim.transcript).map_err(|e| io_err(&transcript, e))?;
    let text = sim.report.to_string();
    print!("{text}");
    println!("transcript: {}", transcript.display());
    if let Some(path) = report {
        std::fs::write(&path, &text).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn run_sweep(config: &Path, g_min: usize, g_max: usize, out: &Path) -> Result<(), Failure> {
    let cfg = ScenarioConfig::from_path(config)?;
    let (l1, l2) = cfg.eavesdropper_counts()?;
    let r = cfg.code.r;
    let h = match cfg.sweep.as_ref().and_then(|s| s.h) {
        Some(h) => h,
        None => (r * cfg.code.g)
            .checked_sub(cfg.code.k)
            .ok_or_else(|| Failure::Config("config error in `code.k`: k exceeds r g".into()))?,
    };
    let q = cfg.field.q as usize;
    if g_max > q - 1 {
        return Err(Failure::Config(format!(
            "config error in `--g-max`: g = {g_max} needs q - 1 >= g, but q = {q}"
        )));
    }
    if q <= r + cfg.code.delta - 2 {
        return Err(Failure::Config(format!(
            "config error in `field.q`: q = {q} must exceed r + delta - 2"
        )));
    }
    let rows = sweep(SweepParams { r, h, l1, l2 }, g_min, g_max)?;
    std::fs::write(out, to_csv(&rows)).map_err(|e| io_err(out, e))?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn selftest() -> Result<(), Failure> {
    let mut failed = Vec::new();
    for outcome in acceptance::run_all() {
        println!("{outcome}");
        if !outcome.passed {
            failed.push(outcome.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Acceptance(format!("failing criteria: {}", failed.join(", "))))
    }
}

fn analyze(transcript: &Path, config: &Path) -> Result<(), Failure> {
    let scenario = Scenario::from_path(config)?;
    let text = std::fs::read_to_string(transcript).map_err(|e| io_err(transcript, e))?;
    let rounds = parse_transcript(scenario.params.field(), &text)?;
    print!("{}", scenario.analyze(&rounds)?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate {
            config,
            transcript,
            report,
        } => simulate(&config, transcript, report),
        Command::Sweep {
            config,
            g_min,
            g_max,
            out,
        } => run_sweep(&config, g_min, g_max, &out),
        Command::Selftest => selftest(),
        Command::Analyze { transcript, config } => analyze(&transcript, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Unrecoverable(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_UNRECOVERABLE)
        }
        Err(Failure::Acceptance(msg)) => {
            eprintln!("selftest failed: {msg}");
            ExitCode::from(EXIT_ACCEPTANCE)
        }
    }
}
