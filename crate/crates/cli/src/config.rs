//! Canonical run configurations and their execution.
//!
//! A [`RunConfig`] holds everything that determines a command's output. Its
//! JSON form is hashed into the run manifest and is what `replay` executes.

use kaclab::distributions::{parse_rational, LawConfig};
use kaclab::gauss::{expected_roots_gaussian, validate_schedule};
use kaclab::montecarlo::{
    coupled_continuity_experiment, estimate_constant_corollary, estimate_constant_with, estimate_expected_roots_with,
    ConstantEstimate, Coupling, Family, RunOptions,
};
use kaclab::{CoefficientLaw, IntervalSpec};
use serde::{Deserialize, Serialize};

use crate::output::{fmt_f64, Table};
use crate::CliError;

/// Where a coefficient law comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawSource {
    /// A builtin name such as `rademacher` or `zero-atom(9/10)`.
    Builtin(String),
    /// The contents of a `--law-file`.
    Custom(LawConfig),
}

impl LawSource {
    pub fn build(&self) -> Result<CoefficientLaw, CliError> {
        Ok(match self {
            LawSource::Builtin(name) => CoefficientLaw::by_name(name)?,
            LawSource::Custom(cfg) => CoefficientLaw::from_config(cfg)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Monte Carlo means along a degree schedule, centered by log growth.
    Direct,
    /// Truncated power series on `(0, 1 - 1/C)` for each cutoff `C`.
    Corollary,
}

/// Everything that determines a command's CSV output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Simulate {
        law: LawSource,
        n: Vec<u64>,
        intervals: Vec<String>,
        trials: u64,
        seed: u64,
    },
    Constant {
        law: LawSource,
        method: Method,
        interval: String,
        n_schedule: Vec<u64>,
        c_values: Vec<f64>,
        trials: u64,
        seed: u64,
    },
    Kacrice {
        n: Vec<u64>,
        interval: String,
    },
    Continuity {
        family: Family,
        /// `None` stands for the limit law itself.
        m_list: Vec<Option<u64>>,
        q: String,
        interval: String,
        n_schedule: Vec<u64>,
        trials: u64,
        seed: u64,
        coupling: Coupling,
    },
}

/// Parses an interval and returns it with its canonical spelling.
pub fn canonical_interval(s: &str) -> Result<(IntervalSpec, String), CliError> {
    let iv: IntervalSpec = s.parse()?;
    Ok((iv, iv.to_string()))
}

fn interval(s: &str) -> Result<IntervalSpec, CliError> {
    Ok(canonical_interval(s)?.0)
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        match self {
            RunConfig::Simulate { seed, .. } | RunConfig::Constant { seed, .. } | RunConfig::Continuity { seed, .. } => {
                *seed
            }
            RunConfig::Kacrice { .. } => 0,
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |trials: u64| {
            if trials == 0 {
                Err(CliError::Usage("--trials must be >= 1".into()))
            } else {
                Ok(())
            }
        };
        match self {
            RunConfig::Simulate { law, n, intervals, trials, .. } => {
                law.build()?;
                positive(*trials)?;
                if n.is_empty() || intervals.is_empty() {
                    return Err(CliError::Usage("--n and --interval need at least one value".into()));
                }
                for s in intervals {
                    interval(s)?;
                }
            }
            RunConfig::Constant { law, method, interval: iv, n_schedule, c_values, trials, .. } => {
                law.build()?;
                positive(*trials)?;
                interval(iv)?;
                match method {
                    Method::Direct => validate_schedule(n_schedule)?,
                    Method::Corollary => {
                        if c_values.is_empty() || c_values.iter().any(|&c| !(c > 1.0 && c.is_finite())) {
                            return Err(CliError::Usage("--c-values must be finite and > 1".into()));
                        }
                        if c_values.windows(2).any(|w| w[1] <= w[0]) {
                            return Err(CliError::Usage("--c-values must be strictly increasing".into()));
                        }
                    }
                }
            }
            RunConfig::Kacrice { n, interval: iv } => {
                interval(iv)?;
                if n.is_empty() || n.contains(&0) {
                    return Err(CliError::Usage("--n needs degrees >= 1".into()));
                }
            }
            RunConfig::Continuity { family, m_list, q, interval: iv, n_schedule, trials, .. } => {
                positive(*trials)?;
                interval(iv)?;
                validate_schedule(n_schedule)?;
                if m_list.is_empty() {
                    return Err(CliError::Usage("--m-list needs at least one value".into()));
                }
                let q = parse_rational(q)?;
                for &m in m_list {
                    family.member(m, &q)?;
                }
            }
        }
        Ok(())
    }

    /// Runs the configuration and renders its CSV table.
    pub fn execute(&self, run: &RunOptions) -> Result<Table, CliError> {
        self.validate()?;
        match self {
            RunConfig::Simulate { law, n, intervals, trials, seed } => {
                let law = law.build()?;
                let mut t = Table::new(&["law", "n", "interval", "mean", "stderr", "trials", "degenerate", "seed"]);
                for &deg in n {
                    for s in intervals {
                        let (iv, name) = canonical_interval(s)?;
                        let e = estimate_expected_roots_with(&law, deg, &iv, *trials, *seed, run)?;
                        t.push(vec![
                            law.name().to_string(),
                            deg.to_string(),
                            name,
                            fmt_f64(e.mean),
                            fmt_f64(e.stderr),
                            e.trials.to_string(),
                            e.degenerate_samples.to_string(),
                            seed.to_string(),
                        ]);
                    }
                }
                Ok(t)
            }
            RunConfig::Constant { law, method, interval: iv, n_schedule, c_values, trials, seed } => {
                let law = law.build()?;
                let (iv, name) = canonical_interval(iv)?;
                let (est, name) = match method {
                    Method::Direct => (estimate_constant_with(&law, &iv, n_schedule, *trials, *seed, run)?, name),
                    Method::Corollary => (
                        estimate_constant_corollary(&law, c_values, *trials, *seed, run)?,
                        IntervalSpec::unit_right().to_string(),
                    ),
                };
                Ok(constant_table(law.name(), &name, *method, &est, *trials, *seed))
            }
            RunConfig::Kacrice { n, interval: iv } => {
                let (iv, name) = canonical_interval(iv)?;
                let slope = iv.log_coefficient();
                let mut t = Table::new(&["n", "interval", "expected_roots", "error_estimate", "centered"]);
                for &deg in n {
                    let q = expected_roots_gaussian(deg, &iv);
                    t.push(vec![
                        deg.to_string(),
                        name.clone(),
                        fmt_f64(q.value),
                        fmt_f64(q.error_estimate),
                        fmt_f64(q.value - slope * (deg as f64).ln()),
                    ]);
                }
                Ok(t)
            }
            RunConfig::Continuity { family, m_list, q, interval: iv, n_schedule, trials, seed, coupling } => {
                let (iv, _) = canonical_interval(iv)?;
                let q = parse_rational(q)?;
                let laws = m_list
                    .iter()
                    .map(|&m| family.member(m, &q))
                    .collect::<kaclab::Result<Vec<_>>>()?;
                let limit = family.limit(&q)?;
                let r = coupled_continuity_experiment(&laws, &limit, &iv, n_schedule, *trials, *seed, *coupling, run)?;
                let family_name = serde_json::to_value(family).expect("enum serializes");
                let family_name = family_name.as_str().expect("unit variant");
                let mut t = Table::new(&["family", "law", "m", "value", "stderr", "cauchy_gap", "gap"]);
                for ((m, law), (e, gap)) in m_list.iter().zip(&r.laws).zip(r.estimates.iter().zip(&r.gaps)) {
                    t.push(vec![
                        family_name.to_string(),
                        law.clone(),
                        m.map_or("limit".to_string(), |m| m.to_string()),
                        fmt_f64(e.value),
                        fmt_f64(e.stderr),
                        fmt_f64(e.cauchy_gap),
                        fmt_f64(*gap),
                    ]);
                }
                t.push(vec![
                    family_name.to_string(),
                    r.limit_law.clone(),
                    "limit".to_string(),
                    fmt_f64(r.limit.value),
                    fmt_f64(r.limit.stderr),
                    fmt_f64(r.limit.cauchy_gap),
                    fmt_f64(0.0),
                ]);
                Ok(t)
            }
        }
    }
}

/// One `point` row per schedule entry and a `final` row.
fn constant_table(law: &str, interval: &str, method: Method, est: &ConstantEstimate, trials: u64, seed: u64) -> Table {
    let method = match method {
        Method::Direct => "direct",
        Method::Corollary => "corollary",
    };
    let mut t = Table::new(&[
        "law", "interval", "method", "row", "x", "value", "stderr", "cauchy_gap", "trials", "seed",
    ]);
    let row = |kind: &str, x: f64, v: f64, se: f64| {
        vec![
            law.to_string(),
            interval.to_string(),
            method.to_string(),
            kind.to_string(),
            fmt_f64(x),
            fmt_f64(v),
            fmt_f64(se),
            fmt_f64(est.cauchy_gap),
            trials.to_string(),
            seed.to_string(),
        ]
    };
    for (&(x, v), &se) in est.per_n_values.iter().zip(&est.per_n_stderr) {
        t.push(row("point", x, v, se));
    }
    let last_x = est.per_n_values.last().map_or(f64::NAN, |p| p.0);
    t.push(row("final", last_x, est.value, est.stderr));
    t
}
