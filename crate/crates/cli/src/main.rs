//! `gc`: run the gaussconv verifications and write reports.

mod cmd;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use gaussconv::mgf::MIN_SAMPLES;

use report::{Check, Context, Format};

/// Failures that stop a run before its checks can be judged.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or rejected input (exit 2).
    Input(String),
    /// A module could not complete its computation (exit 3). The message
    /// already names the failure.
    Numerical(String),
    /// Report files could not be written (exit 3).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => f.write_str(m),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<gaussconv::Error> for CliError {
    fn from(e: gaussconv::Error) -> Self {
        use gaussconv::Error as E;
        match e {
            E::NumericalFailure(_) | E::Overflow(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gc", version, about = "Verify Gaussian convexity inequalities numerically and write reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON input for a single module; without it the built-in fixtures run.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,
    /// Override the module's headline tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Report directory; GC_OUT_DIR, when set, takes precedence.
    #[arg(long, global = true, default_value = "gc-reports")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Divide the sample count by 10.
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Normalized log-MGF convexity, chord gaps, tail and MGF bounds.
    Mgf,
    /// Concavity of the Gaussian transport map.
    Transport,
    /// Rényi divergence comparisons.
    Renyi,
    /// Conic intrinsic volumes, identities and tail bounds.
    Conic,
    /// Wills functional, McMullen's inequality and its reversal.
    Wills,
    /// Zeros and sign structure of exponential sums.
    Expsum,
    /// Every module on its built-in fixtures.
    All,
    /// Print the inventory of built-in fixtures.
    Fixtures,
}

impl Command {
    fn module(self) -> Option<&'static str> {
        Some(match self {
            Command::Mgf => cmd::MGF,
            Command::Transport => cmd::TRANSPORT,
            Command::Renyi => cmd::RENYI,
            Command::Conic => cmd::CONIC,
            Command::Wills => cmd::WILLS,
            Command::Expsum => cmd::EXPSUM,
            Command::All | Command::Fixtures => return None,
        })
    }
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let samples = if cli.quick { cli.samples / 10 } else { cli.samples };
    if samples < MIN_SAMPLES {
        return Err(CliError::Input(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Input(format!("--tol must be finite and >= 0, got {t}")));
        }
    }
    let out_dir = match std::env::var_os("GC_OUT_DIR") {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => cli.out_dir.clone(),
    };
    let generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(Context {
        seed: cli.seed,
        samples,
        quick: cli.quick,
        tol: cli.tol,
        format: cli.format,
        out_dir,
        generated_unix,
    })
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let ctx = context(cli)?;
    let modules: Vec<&str> = match cli.command {
        Command::Fixtures => {
            let inv = cmd::fixtures::inventory_json();
            println!("{}", serde_json::to_string_pretty(&inv).expect("serializable"));
            ctx.write_raw("fixtures.json", "fixtures", inv)?;
            return Ok(0);
        }
        Command::All => {
            if cli.input.is_some() {
                return Err(CliError::Input("`all` runs built-in fixtures and takes no --input".into()));
            }
            cmd::MODULES.to_vec()
        }
        c => vec![c.module().expect("module subcommand")],
    };
    let mut failures: Vec<(String, Check)> = Vec::new();
    for m in &modules {
        let report = cmd::run(m, &ctx, cli.input.as_deref())?;
        let dir = ctx.write_module(&report)?;
        let failed: Vec<Check> = report.failures().cloned().collect();
        eprintln!(
            "{m}: {}/{} checks passed, reports in {}",
            report.checks.len() - failed.len(),
            report.checks.len(),
            dir.display()
        );
        failures.extend(failed.into_iter().map(|c| (m.to_string(), c)));
    }
    let name = if modules.len() == 1 { modules[0] } else { "all" };
    let listing = ctx.write_failures(name, &failures)?;
    if failures.is_empty() {
        Ok(0)
    } else {
        println!("{listing}");
        Ok(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
