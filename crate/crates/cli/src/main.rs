use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lorch_cli::commands::{self, Command};
use lorch_cli::config::JobConfig;
use lorch_cli::report::{self, Envelope, ErrorBody, ErrorPayload};

#[derive(Parser)]
#[command(name = "lorch", version, about = "Calculus over commutative unital algebras")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a field against the configured algebra (exit 1 if not algebrizable)
    Check(JobArgs),
    /// Infer the algebras a field is algebrizable in (exit 1 if none)
    Infer(JobArgs),
    /// Antiderivative, dual fields, metric, distances and first integrals
    Analyze(JobArgs),
    /// Integrate a trajectory to CSV and report first-integral drift
    Trace(JobArgs),
    /// Compare printed closed forms against computed values
    Errata(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    #[arg(long)]
    config: PathBuf,
    /// JSON report path; overrides `[output] json`
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed; overrides `[task] seed`
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance; overrides `[task] tol`
    #[arg(long)]
    tol: Option<f64>,
}

fn write_to(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Check(a) => (Command::Check, a),
        Cmd::Infer(a) => (Command::Infer, a),
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Trace(a) => (Command::Trace, a),
        Cmd::Errata(a) => (Command::Errata, a),
    };
    let bytes = match std::fs::read(&args.config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("lorch: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let config_hash = report::config_hash(&bytes);

    let parsed = String::from_utf8(bytes)
        .map_err(|e| format!("config is not UTF-8: {e}"))
        .and_then(|text| JobConfig::parse(&text).map_err(|e| e.to_string()));
    let mut cfg = match parsed {
        Ok(c) => c,
        Err(msg) => {
            let env = Envelope {
                version: report::VERSION,
                config_hash,
                seed: args.seed.unwrap_or(0),
                command: command.name(),
                payload: ErrorPayload {
                    error: ErrorBody { kind: "ConfigError", message: msg },
                },
            };
            print!("{}", report::render(&env));
            return ExitCode::from(2);
        }
    };
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            eprintln!("lorch: --tol must be positive");
            return ExitCode::from(2);
        }
        cfg.task.tol = Some(tol);
    }
    let seed = args.seed.unwrap_or(cfg.task.seed);
    let json_path = args.out.clone().or_else(|| cfg.output.json.clone());

    let (payload, exit, csv) = match commands::run(command, &cfg, seed) {
        Ok(o) => (o.payload, o.exit, o.csv),
        Err(e) => {
            let body = ErrorPayload {
                error: ErrorBody {
                    kind: e.kind(),
                    message: e.to_string(),
                },
            };
            (serde_json::to_value(body).expect("errors serialize"), 2, None)
        }
    };
    let json = report::render(&Envelope {
        version: report::VERSION,
        config_hash,
        seed,
        command: command.name(),
        payload,
    });

    let mut json_to_stderr = false;
    if let Some(csv) = csv {
        match &cfg.output.csv {
            Some(path) => {
                if let Err(msg) = write_to(path, &csv) {
                    eprintln!("lorch: {msg}");
                    return ExitCode::from(2);
                }
            }
            None => {
                print!("{csv}");
                json_to_stderr = json_path.is_none();
            }
        }
    }
    match json_path {
        Some(path) => {
            if let Err(msg) = write_to(&path, &json) {
                eprintln!("lorch: {msg}");
                return ExitCode::from(2);
            }
        }
        None if json_to_stderr => eprint!("{json}"),
        None => print!("{json}"),
    }
    let _ = std::io::stdout().flush();
    ExitCode::from(exit as u8)
}
