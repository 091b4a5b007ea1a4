//! `qthermo`: run declarative open-system thermodynamics experiments and
//! certify the laws of thermodynamics on the results.
//!
//! Exit codes: 0 when every check passes, 2 when a law check fails, 1 on a
//! configuration or model error.

mod certificate;
mod config;
mod kinds;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kinds::{Outcome, RunError};

#[derive(Parser)]
#[command(name = "qthermo", version, about = "Open-quantum-system thermodynamics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run {
        config: PathBuf,
        /// Write artifacts here instead of the config's output_dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// List the experiment kinds.
    List,
    /// Print a complete config with the defaults of one kind.
    Describe { kind: String },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_LAW: u8 = 2;

fn thread_pool() -> Result<(), String> {
    let Ok(v) = std::env::var("QTHERMO_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| format!("QTHERMO_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn write_outputs(dir: &Path, out: &Outcome) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in &out.files {
        fs::write(dir.join(name), body)?;
    }
    fs::write(dir.join("certificate.csv"), out.certificate.to_csv())
}

fn run(path: &Path, output_dir: Option<PathBuf>) -> Result<bool, RunError> {
    let text = fs::read_to_string(path).map_err(|e| kinds::invalid(format!("cannot read {}: {e}", path.display())))?;
    let kind_name = config::experiment_kind(&text)?;
    let kind = kinds::find(&kind_name).ok_or_else(|| kinds::invalid(format!("unknown experiment kind '{kind_name}'; see `qthermo list`")))?;
    let (dir, out) = (kind.run)(&text)?;
    let dir = output_dir.unwrap_or(dir);
    write_outputs(&dir, &out).map_err(|e| kinds::invalid(format!("cannot write to {}: {e}", dir.display())))?;
    for line in &out.summary {
        println!("{line}");
    }
    for c in &out.certificate.checks {
        println!("{:<24} {:>20} {}", c.name, qthermo_core::gkls::fmt_sig(c.value), if c.passes() { "pass" } else { "FAIL" });
    }
    println!("artifacts written to {}", dir.display());
    Ok(out.certificate.passes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = thread_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    match cli.command {
        Command::List => {
            for k in &kinds::KINDS {
                println!("{:<16} {}", k.name, k.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Describe { kind } => match kinds::find(&kind) {
            Some(k) => {
                println!("{}", (k.describe)());
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown experiment kind '{kind}'; see `qthermo list`");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Run { config, output_dir } => match run(&config, output_dir) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("law certification failed; see certificate.csv");
                ExitCode::from(EXIT_LAW)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
