//! `ghlab`: run spectral-laboratory experiments from a JSON config.
//!
//! Exit codes: 0 ok, 2 usage, 3 numeric failure, 4 verification failure.

mod commands;
mod config;
mod generators;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{Command, Loaded};

#[derive(Debug)]
pub enum CliError {
    Usage { pointer: String, message: String },
    Engine(ghlab::Error),
    EngineAt { pointer: String, error: ghlab::Error },
    Io(String),
}

impl CliError {
    pub fn usage(pointer: &str, message: String) -> Self {
        Self::Usage {
            pointer: pointer.to_string(),
            message,
        }
    }

    pub fn engine_at(pointer: &str, error: ghlab::Error) -> Self {
        Self::EngineAt {
            pointer: pointer.to_string(),
            error,
        }
    }

    fn exit_code(&self) -> u8 {
        use ghlab::Error as E;
        match self {
            Self::Usage { .. } | Self::Io(_) => 2,
            Self::Engine(e) | Self::EngineAt { error: e, .. } => match e {
                E::VerificationFailed { .. } => 4,
                E::NonFinite { .. }
                | E::Resonance { .. }
                | E::Overflow { .. }
                | E::Precision { .. }
                | E::NoConvergence { .. }
                | E::ModeFailures { .. } => 3,
                _ => 2,
            },
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Self::Usage { pointer, message } => json!({"kind": "usage", "pointer": pointer, "message": message}),
            Self::Engine(e) => json!({"kind": "engine", "message": e.to_string(), "detail": format!("{e:?}")}),
            Self::EngineAt { pointer, error } => json!({
                "kind": "engine",
                "pointer": pointer,
                "message": error.to_string(),
                "detail": format!("{error:?}"),
            }),
            Self::Io(msg) => json!({"kind": "io", "message": msg}),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage { pointer, message } if pointer.is_empty() => write!(f, "usage error: {message}"),
            Self::Usage { pointer, message } => write!(f, "usage error at {pointer}: {message}"),
            Self::Engine(e) => write!(f, "{e}"),
            Self::EngineAt { pointer, error } => write!(f, "{error} (at {pointer})"),
            Self::Io(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "ghlab", version, about = "Global-hypoellipticity experiments on modeled spectra")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the command named in the config's `command` field.
    Run(Common),
    /// Generate a spectrum and check its growth certificate.
    Spectrum(Common),
    /// Solve every mode equation for the configured data.
    Solve(Common),
    /// Decide global hypoellipticity of the configured operator.
    Verdict(Common),
    /// Scan the Diophantine condition for a frequency.
    Diophantine(Common),
    /// Classify a coefficient field by its regularity.
    Classify(Common),
    /// Build and verify a non-smooth solution with smooth data.
    Counterexample(Common),
    /// Solve for smooth data and classify the solution.
    Ghx(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `outputs.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted-path override, e.g. `truncation.J=20`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Decimal digits for exact irrational frequencies.
    #[arg(long, value_name = "DIGITS")]
    precision: Option<usize>,
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn execute(requested: Option<Command>, args: &Common) -> Result<(Value, PathBuf, bool), (CliError, Option<PathBuf>)> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| (CliError::Io(format!("cannot read {}: {e}", args.config.display())), None))?;
    let Loaded { config, hash } = config::load(&text, &args.sets, args.precision).map_err(|e| (e, None))?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&config.outputs.dir));
    let fail = |e: CliError| (e, Some(out.clone()));
    let cmd = requested
        .or(config.command)
        .ok_or_else(|| fail(CliError::usage("/command", "no command given".into())))?;
    let outcome = commands::run(cmd, &config).map_err(fail)?;
    std::fs::create_dir_all(&out)
        .map_err(|e| fail(CliError::Io(format!("cannot create {}: {e}", out.display()))))?;
    let report = json!({
        "command": cmd.name(),
        "config_hash": hash,
        "truncation": config.truncation,
        "precision_digits": config.precision(),
        "verified": outcome.verified,
        "result": outcome.result,
    });
    let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    write(&out.join(format!("{}.json", cmd.name())), &text).map_err(fail)?;
    for (name, contents) in &outcome.csv {
        write(&out.join(name), contents).map_err(fail)?;
    }
    Ok((report, out, outcome.verified))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (requested, args) = match &cli.command {
        Cmd::Run(a) => (None, a),
        Cmd::Spectrum(a) => (Some(Command::Spectrum), a),
        Cmd::Solve(a) => (Some(Command::Solve), a),
        Cmd::Verdict(a) => (Some(Command::Verdict), a),
        Cmd::Diophantine(a) => (Some(Command::Diophantine), a),
        Cmd::Classify(a) => (Some(Command::Classify), a),
        Cmd::Counterexample(a) => (Some(Command::Counterexample), a),
        Cmd::Ghx(a) => (Some(Command::Ghx), a),
    };
    match execute(requested, args) {
        Ok((report, out, verified)) => {
            println!("{} report written to {}", report["command"].as_str().unwrap_or(""), out.display());
            if verified {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed; see the report");
                ExitCode::from(4)
            }
        }
        Err((err, out)) => {
            eprintln!("error: {err}");
            if let Some(out) = out {
                let body = json!({"error": err.to_json(), "exit_code": err.exit_code()});
                if std::fs::create_dir_all(&out).is_ok() {
                    let _ = std::fs::write(
                        out.join("error.json"),
                        serde_json::to_string_pretty(&body).expect("errors serialize") + "\n",
                    );
                }
            }
            ExitCode::from(err.exit_code())
        }
    }
}
