//! Command-line front end for kaclab experiments.
//!
//! Every subcommand builds a [`RunConfig`], executes it and writes a CSV
//! table plus a [`RunManifest`] sidecar. `replay` re-executes a manifest's
//! configuration and reproduces the CSV byte for byte.

pub mod config;
pub mod manifest;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kaclab::distributions::LawConfig;
use kaclab::montecarlo::{Coupling, Family, RunOptions};

pub use config::{LawSource, Method, RunConfig};
pub use manifest::RunManifest;
pub use output::Table;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "KACLAB_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] kaclab::Error),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(kaclab::Error::Certification { .. } | kaclab::Error::TruncationInstability { .. }) => {
                EXIT_CERTIFICATION
            }
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kaclab", version, about = "Real-root statistics of random Kac polynomials")]
pub struct Cli {
    /// Worker threads (overrides KACLAB_THREADS; default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo mean root count per (degree, interval).
    Simulate(SimulateArgs),
    /// Estimate the constant term of the expected root count.
    Constant(ConstantArgs),
    /// Gaussian expected root counts by Kac-Rice quadrature.
    Kacrice(KacriceArgs),
    /// Coupled constants along a law sequence and the gaps to its limit.
    Continuity(ContinuityArgs),
    /// Re-run the configuration recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct LawArgs {
    /// Builtin law: gaussian, rademacher, uniform-sym, four-moment,
    /// ternary(q), zero-atom(p), gauss-quantile(m).
    #[arg(long, conflicts_with = "law_file", required_unless_present = "law_file")]
    pub law: Option<String>,
    /// JSON law config: {"name": ..., "atoms": [[value, num, den], ...]}.
    #[arg(long)]
    pub law_file: Option<PathBuf>,
}

impl LawArgs {
    fn source(&self) -> Result<LawSource, CliError> {
        match (&self.law, &self.law_file) {
            (Some(name), _) => Ok(LawSource::Builtin(name.clone())),
            (None, Some(path)) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
                let cfg: LawConfig = serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("{}: invalid law config: {e}", path.display())))?;
                Ok(LawSource::Custom(cfg))
            }
            (None, None) => Err(CliError::Usage("one of --law or --law-file is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Manifest destination (default: <out>.manifest.json when --out is set).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    /// Intervals such as "(0,1]", "R", "[1,inf)" or "0"; repeatable.
    #[arg(long, required = true)]
    pub interval: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConstantArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Target interval of the direct method; the corollary method always
    /// targets (0,1].
    #[arg(long, default_value = "R")]
    pub interval: String,
    /// Degree schedule for the direct method, increasing, at least 3 entries.
    #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048,4096,8192,16384")]
    pub n_schedule: Vec<u64>,
    /// Cutoffs C for the corollary method, increasing, each > 1.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub c_values: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    pub method: Method,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct KacriceArgs {
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long, default_value = "R")]
    pub interval: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ContinuityArgs {
    /// gaussian-quantile-discretization or ternary-q-path.
    #[arg(long)]
    pub family: String,
    /// Sequence indices m, comma separated; "limit" (or "inf") uses the limit
    /// law itself.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m_list: Vec<String>,
    /// Limit zero mass of the ternary path.
    #[arg(long, default_value = "1/3")]
    pub q: String,
    #[arg(long, default_value = "R")]
    pub interval: String,
    #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
    pub n_schedule: Vec<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw each law from its own stream instead of common random numbers.
    #[arg(long)]
    pub independent: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Worker count: `--threads`, then `KACLAB_THREADS`, then the rayon default.
pub fn resolve_threads(flag: Option<usize>, env: Option<&str>) -> Result<Option<usize>, CliError> {
    if let Some(t) = flag {
        return positive_threads(t).map(Some);
    }
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        None => Ok(None),
        Some(s) => {
            let t: usize = s
                .parse()
                .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={s} is not a thread count")))?;
            positive_threads(t).map(Some)
        }
    }
}

fn positive_threads(t: usize) -> Result<usize, CliError> {
    if t == 0 {
        Err(CliError::Usage("thread count must be >= 1".into()))
    } else {
        Ok(t)
    }
}

fn parse_m(s: &str) -> Result<Option<u64>, CliError> {
    match s.trim() {
        "limit" | "inf" => Ok(None),
        t => t
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("--m-list entry `{t}` is not a count or `limit`"))),
    }
}

fn canonical(s: &str) -> Result<String, CliError> {
    Ok(config::canonical_interval(s)?.1)
}

impl Command {
    /// The configuration and output settings of a non-replay command.
    fn plan(&self) -> Result<(RunConfig, &OutputArgs), CliError> {
        Ok(match self {
            Command::Simulate(a) => (
                RunConfig::Simulate {
                    law: a.law.source()?,
                    n: a.n.clone(),
                    intervals: a.interval.iter().map(|s| canonical(s)).collect::<Result<_, _>>()?,
                    trials: a.trials,
                    seed: a.seed,
                },
                &a.output,
            ),
            Command::Constant(a) => (
                RunConfig::Constant {
                    law: a.law.source()?,
                    method: a.method,
                    interval: canonical(&a.interval)?,
                    n_schedule: a.n_schedule.clone(),
                    c_values: a.c_values.clone(),
                    trials: a.trials,
                    seed: a.seed,
                },
                &a.output,
            ),
            Command::Kacrice(a) => (
                RunConfig::Kacrice {
                    n: a.n.clone(),
                    interval: canonical(&a.interval)?,
                },
                &a.output,
            ),
            Command::Continuity(a) => (
                RunConfig::Continuity {
                    family: a.family.parse::<Family>()?,
                    m_list: a.m_list.iter().map(|s| parse_m(s)).collect::<Result<_, _>>()?,
                    q: a.q.trim().to_string(),
                    interval: canonical(&a.interval)?,
                    n_schedule: a.n_schedule.clone(),
                    trials: a.trials,
                    seed: a.seed,
                    coupling: if a.independent {
                        Coupling::Independent
                    } else {
                        Coupling::CommonRandomNumbers
                    },
                },
                &a.output,
            ),
            Command::Replay(_) => unreachable!("replay has no plan"),
        })
    }
}

fn write_csv(out: Option<&Path>, csv: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, csv).map_err(|e| CliError::Io(path.display().to_string(), e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io("stdout".into(), e))
        }
    }
}

/// Default sidecar path for a CSV destination.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Parses arguments, runs the command and returns its output table.
pub fn run(cli: &Cli, command_line: String) -> Result<Table, CliError> {
    let threads = resolve_threads(cli.threads, std::env::var(THREADS_ENV).ok().as_deref())?;
    let opts = RunOptions {
        threads,
        ..Default::default()
    };
    if let Command::Replay(a) = &cli.command {
        let m = RunManifest::read(&a.manifest)?;
        let table = m.config.execute(&opts)?;
        write_csv(a.out.as_deref(), &table.to_csv())?;
        return Ok(table);
    }
    let (config, output) = cli.command.plan()?;
    config.validate()?;
    let table = config.execute(&opts)?;
    write_csv(output.out.as_deref(), &table.to_csv())?;
    let sidecar = output.manifest.clone().or_else(|| output.out.as_deref().map(manifest_path));
    if let Some(path) = sidecar {
        RunManifest::new(config, command_line).write(&path)?;
    }
    Ok(table)
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let command_line = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match run(&cli, command_line) {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_precedence() {
        assert_eq!(resolve_threads(Some(3), Some("8")).unwrap(), Some(3));
        assert_eq!(resolve_threads(None, Some("8")).unwrap(), Some(8));
        assert_eq!(resolve_threads(None, None).unwrap(), None);
        assert_eq!(resolve_threads(None, Some(" ")).unwrap(), None);
        assert!(resolve_threads(None, Some("many")).is_err());
        assert!(resolve_threads(Some(0), None).is_err());
    }

    #[test]
    fn exit_codes_by_error_kind() {
        let cert = CliError::Core(kaclab::Error::Certification {
            uncertified: 5,
            trials: 10,
            limit: 1e-3,
        });
        assert_eq!(cert.exit_code(), EXIT_CERTIFICATION);
        let unstable = CliError::Core(kaclab::Error::TruncationInstability { unstable: 1, trials: 2 });
        assert_eq!(unstable.exit_code(), EXIT_CERTIFICATION);
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::Core(kaclab::Error::Schedule("x".into())).exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn m_list_entries() {
        assert_eq!(parse_m("16").unwrap(), Some(16));
        assert_eq!(parse_m("limit").unwrap(), None);
        assert!(parse_m("x").is_err());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(manifest_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.manifest.json"));
    }
}
