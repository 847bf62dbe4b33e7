//! Command-line front end for `anyonlin`: a network text format, ket
//! expressions, and subcommands that print deterministic JSON.
//!
//! [`execute`] runs one invocation and returns what the binary would print
//! together with its exit code, so tests can drive it without a process.

pub mod commands;
pub mod dsl;
pub mod ket;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use anyonlin::{Angle, ParticleClass};
use clap::{Parser, Subcommand};

use crate::commands::{CircuitSpec, CliError, CoherentSpec, RunConfig};
use crate::output::{to_json, to_table, Report};

#[derive(Debug, Parser)]
#[command(name = "anyonlin", version, about = "Linear-optics simulator for one-dimensional lattice anyons")]
pub struct Cli {
    /// Exchange phase: radians or a pi expression such as `pi/2` or `3*pi/4`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Particle class: `bosonic` (the default) or `fermionic`.
    #[arg(long, global = true)]
    pub class: Option<String>,
    /// JSON output (the default).
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    /// Plain-text table output.
    #[arg(long, global = true)]
    pub table: bool,
    /// Compare with a closed form; exit with code 3 on mismatch.
    #[arg(long, global = true)]
    pub check: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a ket through a network file. phi defaults to 0.
    Run {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        no_normalize: bool,
        /// Include the network unitary on each occupied particle-number sector.
        #[arg(long)]
        dump_unitary: bool,
    },
    /// Three-mode braiding network. phi defaults to 0.
    Braid {
        #[arg(long, default_value = "|1,1,0>")]
        input: String,
        #[arg(long)]
        no_normalize: bool,
    },
    /// Two particles on a beam splitter. phi defaults to 0.
    Hom {
        #[arg(long, default_value = "pi/4", allow_hyphen_values = true)]
        theta: String,
    },
    /// Compile a dual-rail circuit file, or a batch of random single-qubit targets.
    Compile {
        /// Circuit JSON: {"qubits":2,"phi":1.0,"class":"bosonic","gates":[...]}.
        #[arg(long, required_unless_present = "haar", conflicts_with = "haar")]
        circuit: Option<PathBuf>,
        /// Logical input bitstring, qubit 1 first. Defaults to all zeros.
        #[arg(long)]
        input: Option<String>,
        /// Number of seeded Haar-random single-qubit targets.
        #[arg(long)]
        haar: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Coherent state through the anyonic mirror. phi defaults to pi.
    Cat {
        /// Coherent amplitude, e.g. `0.8` or `0.3+0.4i`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        u: String,
        #[arg(long, default_value_t = 1)]
        mode: usize,
        #[arg(long, default_value_t = 40)]
        nmax: u32,
    },
    /// Two-mode coherent family from a JSON spec, optionally through a network. phi defaults to 0.
    Coherent {
        /// Family JSON: {"family":"type1","u":{"re":0.5,"im":0},"v":{"re":0,"im":0.5},"nmax":40}.
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        network: Option<PathBuf>,
        /// Overrides the cutoff given in the family file.
        #[arg(long)]
        nmax: Option<u32>,
    },
}

/// What the process prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn angle(text: &str, what: &str) -> Result<Angle, CliError> {
    text.parse().map_err(|_| CliError::Validation(format!("malformed {what} '{text}'")))
}

/// Flags win over values from input files.
fn config(cli: &Cli, default_phi: Option<Angle>, file_class: Option<ParticleClass>) -> Result<RunConfig, CliError> {
    let phi = match (&cli.phi, default_phi) {
        (Some(t), _) => angle(t, "phi")?,
        (None, Some(a)) => a,
        (None, None) => return Err(CliError::Validation("--phi is required".into())),
    };
    let class = match &cli.class {
        Some(t) => t.parse()?,
        None => file_class.unwrap_or(ParticleClass::Bosonic),
    };
    RunConfig::new(class, phi, cli.check)
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Run { network, input, no_normalize, dump_unitary } => {
            let cfg = config(cli, Some(Angle::ZERO), None)?;
            commands::cmd_run(&cfg, &read(network)?, input, !no_normalize, *dump_unitary)
        }
        Command::Braid { input, no_normalize } => {
            commands::cmd_braid(&config(cli, Some(Angle::ZERO), None)?, input, !no_normalize)
        }
        Command::Hom { theta } => commands::cmd_hom(&config(cli, Some(Angle::ZERO), None)?, angle(theta, "theta")?),
        Command::Compile { circuit: Some(path), input, .. } => {
            let circuit = CircuitSpec::from_json(&read(path)?)?;
            let cfg = config(cli, circuit.phi, circuit.class)?;
            commands::cmd_compile(&cfg, &circuit, input.as_deref())
        }
        Command::Compile { circuit: None, haar, seed, .. } => {
            let cfg = config(cli, Some(Angle::ZERO), None)?;
            commands::cmd_compile_haar(&cfg, haar.expect("clap requires --haar without --circuit"), *seed)
        }
        Command::Cat { u, mode, nmax } => {
            commands::cmd_cat(&config(cli, Some(Angle::PI), None)?, commands::complex_arg(u)?, *mode, *nmax)
        }
        Command::Coherent { family, network, nmax } => {
            let mut s = CoherentSpec::from_json(&read(family)?)?;
            if nmax.is_some() {
                s.nmax = *nmax;
            }
            let net = network.as_deref().map(read).transpose()?;
            commands::cmd_coherent(&config(cli, Some(Angle::ZERO), None)?, &s, net.as_deref())
        }
    }
}

/// Runs one invocation given the full argument list (program name first).
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    match dispatch(&cli) {
        Ok(r) => Outcome { stdout: if cli.table { to_table(&r) } else { to_json(&r) }, stderr: String::new(), code: 0 },
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() },
    }
}
