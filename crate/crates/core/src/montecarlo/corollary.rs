//! The truncated power-series estimator of `C_{xi,(0,1]}`.
//!
//! `C_{xi,(0,1]} = C_{Gau,(0,1]} - (1/2pi) log 2
//!     + lim_C [E N_{P_inf}((0, 1 - 1/C)) - (1/2pi) log C]`,
//! where `P_inf` is the random power series. Each sample of `P_inf` is
//! truncated at the degree where the expected tail sup on `[0, r]` falls
//! below [`DEFAULT_TAIL_EPS`], and recounted at twice that degree.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{count_sample, run_trials, ConstantEstimate, RunOptions, Sample, Tally};
use crate::distributions::CoefficientSource;
use crate::error::{Error, Result};
use crate::gauss::gaussian_unit_constant;
use crate::interval::IntervalSpec;
use crate::rng::CouplingStream;

/// Target bound on `sum_{k>N} r^k`.
pub const DEFAULT_TAIL_EPS: f64 = 1e-9;

/// Factor applied to the geometric tail in [`TruncatedSeries::tail_bound`].
pub const TAIL_SAFETY: f64 = 1.0;

/// A sampled prefix of the random power series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    /// `r = 1 - 1/C`.
    pub radius: f64,
    /// Degree `N` of the prefix.
    pub truncation: u64,
    /// `xi_0, ..., xi_N`.
    pub coefficients: Vec<f64>,
    /// `TAIL_SAFETY * r^(N+1) / (1 - r)`, bounding `E sup_{[0,r]} |tail|`
    /// when `E|xi_k| <= 1`.
    pub tail_bound: f64,
}

impl TruncatedSeries {
    /// Draws the prefix for cutoff `c` from one trial stream.
    pub fn sample<S: CoefficientSource + ?Sized>(law: &S, c: f64, stream: &CouplingStream) -> Result<Self> {
        let truncation = truncation_length(c)?;
        let radius = radius(c);
        let mut coefficients = vec![0.0; truncation as usize + 1];
        law.fill(stream, &mut coefficients);
        Ok(TruncatedSeries {
            radius,
            truncation,
            coefficients,
            tail_bound: TAIL_SAFETY * radius.powf(truncation as f64 + 1.0) / (1.0 - radius),
        })
    }

    /// The open interval `(0, r)` whose roots the estimator counts.
    pub fn interval(&self) -> IntervalSpec {
        IntervalSpec {
            lo: 0.0,
            hi: self.radius,
            lo_closed: false,
            hi_closed: false,
        }
    }
}

fn radius(c: f64) -> f64 {
    1.0 - 1.0 / c
}

/// `N = ceil(log(eps (1 - r)) / log r)` with `r = 1 - 1/C`, so that
/// `sum_{k>N} r^k <= eps`; at least 1.
pub fn truncation_length(c: f64) -> Result<u64> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("cutoff C must be finite and > 1, got {c}")));
    }
    let r = radius(c);
    let n = ((DEFAULT_TAIL_EPS * (1.0 - r)).ln() / r.ln()).ceil();
    Ok((n as u64).max(1))
}

/// `C_{xi,(0,1]}` from truncated power series at each cutoff in
/// `c_values`. Entry `(C, value)` of `per_n_values` is
/// `mean - (1/2pi) log C + C_{Gau,(0,1]} - (1/2pi) log 2`.
///
/// Every sample is recounted at twice its truncation; if the counts differ
/// in more than 0.1% of trials at any cutoff the run fails with
/// [`Error::TruncationInstability`].
pub fn estimate_constant_corollary<S: CoefficientSource + ?Sized>(
    law: &S,
    c_values: &[f64],
    trials: u64,
    seed: u64,
    run: &RunOptions,
) -> Result<ConstantEstimate> {
    if c_values.is_empty() {
        return Err(Error::Schedule("no cutoffs given".into()));
    }
    if c_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Schedule("cutoffs must be strictly increasing".into()));
    }
    if trials == 0 {
        return Err(Error::Parameter("trials must be >= 1".into()));
    }
    let lengths = c_values
        .iter()
        .map(|&c| truncation_length(c).map(|n| n as usize))
        .collect::<Result<Vec<_>>>()?;
    let longest = 2 * lengths.iter().copied().max().expect("nonempty");

    let samples = run_trials(trials, run.threads, |i| {
        let mut coeffs = vec![0.0; longest + 1];
        law.fill(&CouplingStream::new(seed, i), &mut coeffs);
        c_values
            .iter()
            .zip(&lengths)
            .map(|(&c, &n)| {
                let interval = IntervalSpec::open(0.0, radius(c))?;
                let short = count_sample(&coeffs[..=n], &interval, &run.count)?;
                let long = count_sample(&coeffs[..=2 * n], &interval, &run.count)?;
                let unstable = matches!((short, long), (Sample::Count(a), Sample::Count(b)) if a != b);
                Ok((short, unstable))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut tallies = vec![Tally::default(); c_values.len()];
    let mut unstable = vec![0u64; c_values.len()];
    for per_trial in samples {
        for (k, (s, u)) in per_trial.into_iter().enumerate() {
            tallies[k].push(s);
            unstable[k] += u64::from(u);
        }
    }

    let offset = gaussian_unit_constant() - 2f64.ln() / (2.0 * PI);
    let mut points = Vec::with_capacity(c_values.len());
    let mut stderrs = Vec::with_capacity(c_values.len());
    for ((&c, tally), &bad) in c_values.iter().zip(&tallies).zip(&unstable) {
        tally.check_certified()?;
        if bad as f64 > super::MAX_UNCERTIFIED_FRACTION * trials as f64 {
            return Err(Error::TruncationInstability {
                unstable: bad as usize,
                trials: trials as usize,
            });
        }
        let (mean, se) = tally.moments();
        points.push((c, mean - c.ln() / (2.0 * PI) + offset));
        stderrs.push(se);
    }
    Ok(ConstantEstimate::from_points(points, stderrs))
}
