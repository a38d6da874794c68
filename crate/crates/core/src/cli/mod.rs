//! Command-line front end.
//!
//! Every subcommand writes one report (CSV by default, or JSON) to the
//! output file or stdout, and short notes to stderr. Exit codes: 0 success,
//! 1 I/O failure, 2 invalid configuration or parameters outside an
//! operation's domain, 3 solver or other numeric failure.
//!
//! Thread count never changes the output: grid points are evaluated
//! independently and collected in grid order.

mod commands;
pub mod mccheck;
pub mod params;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
pub use params::{Format, Params, SchemeKind, Site, Vary};
pub use report::{FormatError, Meta, Report, Series};

/// Environment variable giving the default worker count.
pub const THREADS_ENV: &str = "STOCHRES_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(e) if e.is_numeric() => 3,
            CliError::Compute(_) => 2,
            CliError::Format(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "stochres", version, about = "Stochastic resonance in lossy bosonic channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Invocation {
    /// TOML file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Success probability against noise, one series per threshold.
    Sweep(Invocation),
    /// Forbidden threshold interval of the unassisted scheme.
    Interval(Invocation),
    /// Forbidden rectangle of the entanglement-assisted scheme.
    Rectangle(Invocation),
    /// Channel discrimination success against noise.
    Discriminate(Invocation),
    /// Average fidelity of the qubit channel against noise.
    Fidelity(Invocation),
    /// Logarithmic negativity of the qubit channel's Choi state.
    Negativity(Invocation),
    /// Private rate against noise, one series per threshold, plus chi.
    Private(Invocation),
    /// Whether sender-side noise raises the private rate, per threshold.
    ProbeConjecture(Invocation),
    /// Analytic success probabilities against Monte Carlo sampling.
    McCheck(Invocation),
}

const SCENARIO: [&str; 5] = ["eta", "alpha", "r", "prior", "site"];
const GRID: [&str; 3] = ["start", "stop", "step"];
const PLUMBING: [&str; 4] = ["seed", "threads", "format", "output"];

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sweep(_) => "sweep",
            Command::Interval(_) => "interval",
            Command::Rectangle(_) => "rectangle",
            Command::Discriminate(_) => "discriminate",
            Command::Fidelity(_) => "fidelity",
            Command::Negativity(_) => "negativity",
            Command::Private(_) => "private",
            Command::ProbeConjecture(_) => "probe-conjecture",
            Command::McCheck(_) => "mc-check",
        }
    }

    pub fn invocation(&self) -> &Invocation {
        match self {
            Command::Sweep(i)
            | Command::Interval(i)
            | Command::Rectangle(i)
            | Command::Discriminate(i)
            | Command::Fidelity(i)
            | Command::Negativity(i)
            | Command::Private(i)
            | Command::ProbeConjecture(i)
            | Command::McCheck(i) => i,
        }
    }

    /// Keys this command reads.
    fn allowed(&self) -> Vec<&'static str> {
        let mut keys: Vec<&'static str> = PLUMBING.to_vec();
        let extra: &[&str] = match self {
            Command::Sweep(_) => &["scheme", "theta", "alpha-p", "theta-p", "prior-p", "sigma-p"],
            Command::Interval(_) => &["vary"],
            Command::Rectangle(_) => &["vary", "alpha-p", "prior-p"],
            Command::Discriminate(_) => &["eta0", "eta1", "theta"],
            Command::Fidelity(_) | Command::Negativity(_) => &["x0", "theta"],
            Command::Private(_) | Command::ProbeConjecture(_) => &["theta"],
            Command::McCheck(_) => &["n", "scenarios"],
        };
        keys.extend(extra);
        match self {
            Command::Fidelity(_) | Command::Negativity(_) => keys.extend(GRID),
            Command::McCheck(_) => {}
            Command::Discriminate(_) => keys.extend(GRID.iter().chain(&SCENARIO).filter(|k| **k != "eta")),
            _ => keys.extend(GRID.iter().chain(&SCENARIO)),
        }
        keys
    }

    /// Values used for keys left unset.
    fn defaults(&self, p: &Params) -> Params {
        let list = |v: &[f64]| Some(v.to_vec());
        let scenario = Params {
            eta: Some(0.8),
            alpha: Some(1.0),
            r: Some(0.0),
            prior: Some(0.5),
            site: Some(Site::Receiver),
            start: Some(0.0),
            stop: Some(3.0),
            step: Some(0.05),
            ..Params::default()
        };
        let plumbing = Params {
            seed: Some(42),
            format: Some(Format::Csv),
            ..Params::default()
        };
        let own = match self {
            Command::Sweep(_) => Params {
                scheme: Some(SchemeKind::Classical),
                theta: list(&[0.85, 0.95, 1.05, 1.15, 1.25, 1.35]),
                ..scenario
            },
            Command::Interval(_) | Command::Rectangle(_) => {
                let vary = p.vary.unwrap_or(Vary::None);
                let (start, stop) = match vary {
                    Vary::Alpha => (0.2, 3.0),
                    _ => (0.0, 2.0),
                };
                Params {
                    vary: Some(vary),
                    start: Some(start),
                    stop: Some(stop),
                    ..scenario
                }
            }
            Command::Discriminate(_) => Params {
                eta: None,
                eta0: Some(0.9),
                eta1: Some(0.5),
                theta: list(&[0.0, 0.1, 0.5, 1.0, 1.6, 2.0]),
                ..scenario
            },
            Command::Fidelity(_) | Command::Negativity(_) => Params {
                x0: Some(0.3),
                theta: list(&[0.20, 0.25, 0.29, 0.31, 0.35, 0.40]),
                start: Some(0.0),
                stop: Some(1.0),
                step: Some(0.01),
                ..Params::default()
            },
            Command::Private(_) | Command::ProbeConjecture(_) => Params {
                site: Some(Site::Sender),
                theta: list(&[0.0, 0.5, 1.0, 1.5, 2.0, 2.5]),
                ..scenario
            },
            Command::McCheck(_) => Params {
                n: Some(1_000_000),
                scenarios: Some(20),
                ..Params::default()
            },
        };
        own.or(plumbing)
    }
}

/// A fully resolved run: what to compute and where to write it.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Explicit and default values merged.
    pub params: Params,
    pub threads: usize,
}

impl RunConfig {
    /// Merges flags over the config file over defaults and checks keys.
    pub fn resolve(command: Command) -> Result<RunConfig, CliError> {
        let inv = command.invocation();
        let file = match &inv.config {
            Some(path) => Params::from_file(path)?,
            None => Params::default(),
        };
        let given = inv.params.clone().or(file);
        let allowed = command.allowed();
        if let Some(k) = given.set_keys().into_iter().find(|k| !allowed.contains(k)) {
            return Err(CliError::Config(format!("key {k} is not used by {}", command.name())));
        }
        let threads = match given.threads {
            Some(t) => t,
            None => match std::env::var(THREADS_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
                Err(_) => 1,
            },
        };
        if threads == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        let params = given.clone().or(command.defaults(&given));
        Ok(RunConfig {
            command,
            params,
            threads,
        })
    }

    fn format(&self) -> Format {
        self.params.format.unwrap_or(Format::Csv)
    }
}

/// Computes the report and the stderr notes for a resolved run.
pub fn execute(cfg: &RunConfig) -> Result<(Report, Vec<String>), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker threads: {e}")))?;
    let p = &cfg.params;
    let out = pool.install(|| match cfg.command {
        Command::Sweep(_) => commands::sweep(p),
        Command::Interval(_) => commands::interval(p),
        Command::Rectangle(_) => commands::rectangle(p),
        Command::Discriminate(_) => commands::discriminate(p),
        Command::Fidelity(_) => commands::fidelity(p),
        Command::Negativity(_) => commands::negativity(p),
        Command::Private(_) => commands::private(p),
        Command::ProbeConjecture(_) => commands::probe(p),
        Command::McCheck(_) => commands::mc_check(p),
    })?;
    let mut parameters = p.to_meta();
    parameters.insert("x".into(), out.x_name.into());
    let report = Report {
        meta: Meta {
            parameters,
            command: cfg.command.name().into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: p.seed.unwrap_or(42),
        },
        series: out.series,
    };
    Ok((report, out.notes))
}

/// Serialises the report in the configured format.
pub fn render(cfg: &RunConfig, report: &Report) -> Result<String, CliError> {
    Ok(match cfg.format() {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    })
}

fn run_parsed(cli: Cli) -> Result<Vec<String>, CliError> {
    let cfg = RunConfig::resolve(cli.command)?;
    let (report, notes) = execute(&cfg)?;
    let text = render(&cfg, &report)?;
    match &cfg.params.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(notes)
}

/// Parses `args` (program name first), runs and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_parsed(cli) {
        Ok(notes) => {
            for n in notes {
                eprintln!("{n}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
