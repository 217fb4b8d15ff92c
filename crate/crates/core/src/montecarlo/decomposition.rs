//! Split of the root count on `(0, 1]` into a neighbourhood of 0, a bulk
//! region and a neighbourhood of 1, measured on shared samples.

use serde::{Deserialize, Serialize};

use super::{count_sample, run_trials, EstimateResult, RunOptions, Sample, Tally};
use crate::distributions::CoefficientSource;
use crate::error::{Error, Result};
use crate::interval::IntervalSpec;
use crate::rng::CouplingStream;

/// Per-region estimates over the same samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// `(0, delta]`.
    pub near_zero: EstimateResult,
    /// `(delta, 1 - 1/C)`.
    pub bulk: EstimateResult,
    /// `[1 - 1/C, 1]`.
    pub near_one: EstimateResult,
    /// `(0, 1]`.
    pub total: EstimateResult,
    /// Roots at exactly 1: the difference between the `(0, 1]` and
    /// `(0, 1)` counts.
    pub at_one: EstimateResult,
    /// Multiplicity of the root at 0.
    pub zero_multiplicity: EstimateResult,
    /// Samples whose region counts do not sum to their `(0, 1]` count.
    pub conservation_violations: u64,
}

impl DecompositionReport {
    /// `near_zero + bulk + near_one - total` in means.
    pub fn conservation_residual(&self) -> f64 {
        self.near_zero.mean + self.bulk.mean + self.near_one.mean - self.total.mean
    }
}

/// Region means for degree `n`, cutoff `C` and near-0 radius `delta`.
///
/// A sample that is uncertified in any region is excluded from every
/// region, so the region means are taken over the same samples.
pub fn decomposition_report<S: CoefficientSource + ?Sized>(
    law: &S,
    n: u64,
    c: f64,
    delta: f64,
    trials: u64,
    seed: u64,
    run: &RunOptions,
) -> Result<DecompositionReport> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("cutoff C must be finite and > 1, got {c}")));
    }
    let edge = 1.0 - 1.0 / c;
    if !(delta > 0.0 && delta < edge) {
        return Err(Error::Parameter(format!(
            "regions overlap: need 0 < delta < 1 - 1/C = {edge}, got delta = {delta}"
        )));
    }
    if trials == 0 {
        return Err(Error::Parameter("trials must be >= 1".into()));
    }
    let regions = [
        IntervalSpec::new(0.0, delta, false, true)?,
        IntervalSpec::open(delta, edge)?,
        IntervalSpec::closed(edge, 1.0)?,
        IntervalSpec::unit_right(),
        IntervalSpec::closed(1.0, 1.0)?,
        IntervalSpec::zero_point(),
    ];

    let samples = run_trials(trials, run.threads, |i| {
        let mut coeffs = vec![0.0; n as usize + 1];
        law.fill(&CouplingStream::new(seed, i), &mut coeffs);
        regions
            .iter()
            .map(|r| count_sample(&coeffs, r, &run.count))
            .collect::<Result<Vec<Sample>>>()
    })?;

    let mut tallies = [Tally::default(); 6];
    let mut violations = 0;
    for per_trial in samples {
        let joint = if per_trial.contains(&Sample::AllZero) {
            Some(Sample::AllZero)
        } else if per_trial.contains(&Sample::Uncertified) {
            Some(Sample::Uncertified)
        } else {
            None
        };
        match joint {
            Some(s) => tallies.iter_mut().for_each(|t| t.push(s)),
            None => {
                let k: Vec<u64> = per_trial
                    .iter()
                    .filter_map(|s| if let Sample::Count(k) = s { Some(*k) } else { None })
                    .collect();
                if k[0] + k[1] + k[2] != k[3] {
                    violations += 1;
                }
                for (t, s) in tallies.iter_mut().zip(per_trial) {
                    t.push(s);
                }
            }
        }
    }
    let [near_zero, bulk, near_one, total, at_one, zero] = tallies;
    Ok(DecompositionReport {
        near_zero: near_zero.into_result(n, regions[0])?,
        bulk: bulk.into_result(n, regions[1])?,
        near_one: near_one.into_result(n, regions[2])?,
        total: total.into_result(n, regions[3])?,
        at_one: at_one.into_result(n, regions[4])?,
        zero_multiplicity: zero.into_result(n, regions[5])?,
        conservation_violations: violations,
    })
}
