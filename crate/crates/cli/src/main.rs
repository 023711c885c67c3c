//! `qbein`: run the verification suites from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a verification fails,
//! 2 for usage, config or parameter errors.

mod commands;
mod settings;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{CmdResult, Output};
use settings::{Format, Params};

#[derive(Parser)]
#[command(
    name = "qbein",
    version,
    about = "Exact and numeric checks of twisted quantum-group geometry"
)]
struct Cli {
    /// TOML file supplying defaults for any flag
    #[arg(long, global = true, visible_alias = "params")]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// R-matrices: construction, twist and their identities
    Rmat {
        #[command(subcommand)]
        action: Rmat,
    },
    /// Twisted coordinates and bein constraints
    Twist {
        #[command(subcommand)]
        action: Twist,
    },
    /// Relation suites of the noncommutative calculus
    Alg {
        #[command(subcommand)]
        action: Alg,
    },
    /// Jackson derivatives and integrals on geometric lattices
    Jackson {
        #[command(subcommand)]
        action: Jackson,
    },
    /// The two-dimensional lattice model
    Qm {
        #[command(subcommand)]
        action: Qm,
    },
    /// Every check at small sizes
    All,
}

#[derive(Subcommand, Clone, Copy)]
enum Rmat {
    /// Print the R-matrix
    Build,
    /// Print the twisted R-matrix
    Twist,
    /// Yang-Baxter equation
    Ybe,
    /// Push-through relations
    Push,
    /// Twist lemmas
    Lemmas,
}

#[derive(Subcommand, Clone, Copy)]
enum Twist {
    /// Closure of the twisted coordinate relations
    Coords,
    /// Bein constraints for a B, C or D series
    Bein,
}

#[derive(Subcommand, Clone, Copy)]
enum Alg {
    /// Reduce a relation suite to normal form
    Check,
}

#[derive(Subcommand, Clone, Copy)]
enum Jackson {
    /// Sample a derivative on a lattice cube (CSV by default)
    Diff,
    /// Jackson integral of a one-variable polynomial
    Int,
    /// Commutation relations on random polynomials
    Check,
}

#[derive(Subcommand, Clone, Copy)]
enum Qm {
    /// Operator algebra on the truncated basis
    Relations,
    /// Hamiltonian spectrum against the analytic formula
    Spectrum,
    /// One-loop trace with tail bound
    Trace,
    /// Free action on plane waves
    Action,
    /// Map of the radial lattice to a cylinder
    Cylinder,
}

impl Command {
    fn group(&self) -> &'static str {
        match self {
            Command::Rmat { .. } => "rmat",
            Command::Twist { .. } => "twist",
            Command::Alg { .. } => "alg",
            Command::Jackson { .. } => "jackson",
            Command::Qm { .. } => "qm",
            Command::All => "all",
        }
    }

    /// Tabular commands default to CSV, everything else to JSON.
    fn default_format(&self) -> Format {
        match self {
            Command::Jackson {
                action: Jackson::Diff,
            }
            | Command::Qm {
                action: Qm::Spectrum,
            } => Format::Csv,
            _ => Format::Json,
        }
    }

    fn run(&self, p: &Params) -> CmdResult<Output> {
        use commands::*;
        match self {
            Command::Rmat { action } => match action {
                Rmat::Build => rmat_build(p),
                Rmat::Twist => rmat_twist(p),
                Rmat::Ybe => rmat_ybe(p),
                Rmat::Push => rmat_push(p),
                Rmat::Lemmas => rmat_lemmas(p),
            },
            Command::Twist { action } => match action {
                Twist::Coords => twist_coords(p),
                Twist::Bein => twist_bein(p),
            },
            Command::Alg { action: Alg::Check } => alg_check(p),
            Command::Jackson { action } => match action {
                Jackson::Diff => jackson_diff(p),
                Jackson::Int => jackson_int(p),
                Jackson::Check => jackson_check(p),
            },
            Command::Qm { action } => match action {
                Qm::Relations => qm_relations(p),
                Qm::Spectrum => qm_spectrum(p),
                Qm::Trace => qm_trace(p),
                Qm::Action => qm_action(p),
                Qm::Cylinder => qm_cylinder(p),
            },
            Command::All => all(p),
        }
    }
}

fn configure_threads() -> Result<usize, String> {
    let Ok(raw) = std::env::var("QBEIN_THREADS") else {
        return Ok(rayon::current_num_threads());
    };
    let k: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| format!("QBEIN_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| e.to_string())?;
    Ok(k)
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Resolved settings without the unset ones.
fn settings_json(p: &Params) -> serde_json::Value {
    let mut v = serde_json::to_value(p).unwrap_or_default();
    if let Some(obj) = v.as_object_mut() {
        obj.retain(|_, x| !x.is_null());
    }
    v
}

fn write_output(out: &Output, p: &Params, format: Format, threads: usize) -> Result<(), String> {
    let body = match format {
        Format::Json => &out.json,
        Format::Csv => &out.csv,
    };
    let Some(path) = &p.out else {
        print!("{body}");
        if !body.ends_with('\n') {
            println!();
        }
        return Ok(());
    };
    std::fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))?;
    let manifest = json!({
        "artifact_version": qbein_core::ARTIFACT_VERSION,
        "command": std::env::args().skip(1).collect::<Vec<_>>(),
        "settings": settings_json(p),
        "format": format,
        "output": path,
        "bytes": body.len(),
        "pass": out.pass,
        "threads": threads,
        "written_unix": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())?;
    let mpath = manifest_path(path);
    std::fs::write(&mpath, text + "\n").map_err(|e| format!("{}: {e}", mpath.display()))
}

fn run(cli: Cli) -> Result<bool, String> {
    let threads = configure_threads()?;
    let params = match &cli.config {
        Some(path) => cli
            .params
            .or(&settings::load_config(path, cli.command.group())?),
        None => cli.params,
    };
    let format = params
        .format
        .unwrap_or_else(|| cli.command.default_format());
    let out = cli.command.run(&params)?;
    write_output(&out, &params, format, threads)?;
    eprintln!("{}", out.summary);
    Ok(out.pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
