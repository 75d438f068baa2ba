mod commands;
mod config;
mod table;
mod verify;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0} check(s) out of tolerance")]
    Verification(usize),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

/// Transient and steady-state coherence of a double quantum dot embedded in an
/// Aharonov-Bohm interferometer. Energies are in units of the total linewidth.
#[derive(Parser)]
#[command(name = "abmol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced density matrix after a sudden lead coupling, on a time grid
    TimeTrace,
    /// Steady-state coherence against the flux phase
    FluxSweep,
    /// Transmission probability over an energy and flux grid
    Transmission,
    /// Steady-state current against the flux phase
    Current,
    /// Check the solver against closed forms, the discretised-lead oracle and its invariants
    Verify,
}

#[derive(Args)]
struct Opts {
    /// Level energy of dot 1
    #[arg(long, global = true, allow_hyphen_values = true)]
    e1: Option<String>,
    /// Level energy of dot 2
    #[arg(long, global = true, allow_hyphen_values = true)]
    e2: Option<String>,
    /// Left-lead linewidth
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma_l: Option<String>,
    /// Right-lead linewidth
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma_r: Option<String>,
    /// Flux phase in radians; accepts forms like pi/2 or -3pi/4
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Bias eV, applied symmetrically as mu_L = -mu_R = eV/2
    #[arg(long, global = true, allow_hyphen_values = true)]
    bias: Option<String>,
    /// Lead temperature
    #[arg(long, global = true, allow_hyphen_values = true)]
    temperature: Option<String>,
    /// Lead half-bandwidth
    #[arg(long, global = true, allow_hyphen_values = true)]
    cutoff: Option<String>,
    /// Add the analytic contribution of energies beyond the cutoff
    #[arg(long, global = true)]
    tail: bool,
    #[arg(long, global = true)]
    abs_tol: Option<String>,
    #[arg(long, global = true)]
    rel_tol: Option<String>,
    #[arg(long, global = true)]
    max_panels: Option<String>,
    #[arg(long, global = true)]
    t_max: Option<String>,
    #[arg(long, global = true)]
    n_t: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi_min: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi_max: Option<String>,
    #[arg(long, global = true)]
    n_phi: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    w_min: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    w_max: Option<String>,
    #[arg(long, global = true)]
    n_w: Option<String>,
    /// Modes per lead in the oracle
    #[arg(long, global = true)]
    oracle_modes: Option<String>,
    /// Half-bandwidth of the oracle leads
    #[arg(long, global = true)]
    oracle_bandwidth: Option<String>,
    #[arg(long, global = true)]
    fuzz_draws: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key = value file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Use the full linewidth in the decay matrix (deliberately wrong; exercises verify)
    #[arg(long, global = true, hide = true)]
    debug_full_linewidth: bool,
}

impl Opts {
    fn given(&self) -> BTreeMap<String, String> {
        let entries = [
            ("e1", &self.e1),
            ("e2", &self.e2),
            ("gamma-l", &self.gamma_l),
            ("gamma-r", &self.gamma_r),
            ("phi", &self.phi),
            ("bias", &self.bias),
            ("temperature", &self.temperature),
            ("cutoff", &self.cutoff),
            ("abs-tol", &self.abs_tol),
            ("rel-tol", &self.rel_tol),
            ("max-panels", &self.max_panels),
            ("t-max", &self.t_max),
            ("n-t", &self.n_t),
            ("phi-min", &self.phi_min),
            ("phi-max", &self.phi_max),
            ("n-phi", &self.n_phi),
            ("w-min", &self.w_min),
            ("w-max", &self.w_max),
            ("n-w", &self.n_w),
            ("oracle-modes", &self.oracle_modes),
            ("oracle-bandwidth", &self.oracle_bandwidth),
            ("fuzz-draws", &self.fuzz_draws),
            ("format", &self.format),
            ("seed", &self.seed),
        ];
        let mut map: BTreeMap<String, String> = entries
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
            .collect();
        if self.tail {
            map.insert("tail".into(), "true".into());
        }
        if let Some(out) = &self.out {
            map.insert("out".into(), out.display().to_string());
        }
        map
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
            config::parse_file(&text)?
        }
        None => BTreeMap::new(),
    };
    let config = RunConfig::resolve(cli.opts.given(), file, cli.opts.debug_full_linewidth)?;

    let (table, failures) = match cli.command {
        Command::TimeTrace => (commands::time_trace(&config)?, 0),
        Command::FluxSweep => (commands::flux_sweep(&config)?, 0),
        Command::Transmission => (commands::transmission_scan(&config)?, 0),
        Command::Current => (commands::current(&config)?, 0),
        Command::Verify => {
            let (table, failures) = verify::verify(&config)?;
            eprint!("{}", verify::report(&table));
            (table, failures)
        }
    };

    match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(&config, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(&config, &mut w)?;
            w.flush()?;
        }
    }

    if failures > 0 {
        return Err(CliError::Verification(failures));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("abmol: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
