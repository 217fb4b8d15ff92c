//! Constants of a sequence of laws against a limit law, with the samples of
//! every law driven by the same uniforms.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{estimate_constant_with, ConstantEstimate, RunOptions};
use crate::distributions::{BuiltinLaw, CoefficientLaw};
use crate::error::{Error, Result};
use crate::interval::IntervalSpec;

/// Law sequences converging to a limit law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `gauss-quantile(m)` towards `gaussian`.
    GaussianQuantileDiscretization,
    /// `ternary(q m / (m + 1))` towards `ternary(q)`.
    TernaryQPath,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-quantile-discretization" => Ok(Family::GaussianQuantileDiscretization),
            "ternary-q-path" => Ok(Family::TernaryQPath),
            _ => Err(Error::Parameter(format!(
                "unknown family `{s}` (expected gaussian-quantile-discretization or ternary-q-path)"
            ))),
        }
    }
}

impl Family {
    /// The limit law; `q` is used by [`Family::TernaryQPath`] only.
    pub fn limit(&self, q: &BigRational) -> Result<CoefficientLaw> {
        match self {
            Family::GaussianQuantileDiscretization => CoefficientLaw::builtin(&BuiltinLaw::Gaussian),
            Family::TernaryQPath => CoefficientLaw::builtin(&BuiltinLaw::Ternary(q.clone())),
        }
    }

    /// Member `m` of the sequence, or the limit law for `None`.
    pub fn member(&self, m: Option<u64>, q: &BigRational) -> Result<CoefficientLaw> {
        let Some(m) = m else { return self.limit(q) };
        match self {
            Family::GaussianQuantileDiscretization => {
                CoefficientLaw::builtin(&BuiltinLaw::GaussianQuantiles(m as usize))
            }
            Family::TernaryQPath => {
                let qm = q * BigRational::new(m.into(), (m + 1).into());
                CoefficientLaw::builtin(&BuiltinLaw::Ternary(qm))
            }
        }
    }
}

/// How the laws of a continuity experiment share randomness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// Every law uses the run seed: `xi_k = F^{-1}(U_k)` with shared `U_k`.
    #[default]
    CommonRandomNumbers,
    /// Law `j` of the sequence uses its own derived seed.
    Independent,
}

/// Estimates for each law of the sequence and for the limit law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub coupling: Coupling,
    pub laws: Vec<String>,
    pub estimates: Vec<ConstantEstimate>,
    pub limit_law: String,
    pub limit: ConstantEstimate,
    /// `|C_{mu_j} - C_{mu_inf}|` per law of the sequence.
    pub gaps: Vec<f64>,
}

/// Seed of law `j` under [`Coupling::Independent`]; the limit keeps `seed`.
pub fn independent_seed(seed: u64, j: usize) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ (j as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs [`estimate_constant`](super::estimate_constant) for every law of
/// `law_sequence` and for `law_limit`, and reports the gaps between their
/// constants.
#[allow(clippy::too_many_arguments)]
pub fn coupled_continuity_experiment(
    law_sequence: &[CoefficientLaw],
    law_limit: &CoefficientLaw,
    interval: &IntervalSpec,
    schedule: &[u64],
    trials: u64,
    seed: u64,
    coupling: Coupling,
    run: &RunOptions,
) -> Result<ContinuityReport> {
    let limit = estimate_constant_with(law_limit, interval, schedule, trials, seed, run)?;
    let mut estimates = Vec::with_capacity(law_sequence.len());
    for (j, law) in law_sequence.iter().enumerate() {
        let s = match coupling {
            Coupling::CommonRandomNumbers => seed,
            Coupling::Independent => independent_seed(seed, j),
        };
        estimates.push(estimate_constant_with(law, interval, schedule, trials, s, run)?);
    }
    let gaps = estimates.iter().map(|e| (e.value - limit.value).abs()).collect();
    Ok(ContinuityReport {
        coupling,
        laws: law_sequence.iter().map(|l| l.name().to_string()).collect(),
        estimates,
        limit_law: law_limit.name().to_string(),
        limit,
        gaps,
    })
}
