//! Monte Carlo estimation of expected real-root counts and of the constant
//! term in their logarithmic growth.
//!
//! Trial `i` of a run with seed `s` draws its coefficients from
//! [`CouplingStream::new(s, i)`](CouplingStream). Degree-`n` samples are
//! therefore prefixes of one another, every law sees the same uniforms, and
//! a run does not depend on how trials are spread over workers. Per-trial
//! counts are reduced in trial order with integer sums, so results are
//! bit-identical for any thread count.

mod continuity;
mod corollary;
mod decomposition;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{CoefficientLaw, CoefficientSource};
use crate::error::{Error, Result};
use crate::gauss::{cauchy_gap, validate_schedule};
use crate::interval::IntervalSpec;
use crate::poly::Polynomial;
use crate::rng::CouplingStream;
use crate::rootcount::{count_roots_f64, sturm_count, CountOptions};

pub use continuity::{coupled_continuity_experiment, independent_seed, ContinuityReport, Coupling, Family};
pub use corollary::{estimate_constant_corollary, truncation_length, TruncatedSeries, DEFAULT_TAIL_EPS, TAIL_SAFETY};
pub use decomposition::{decomposition_report, DecompositionReport};

/// Largest tolerated fraction of uncertified samples.
pub const MAX_UNCERTIFIED_FRACTION: f64 = 1e-3;

/// Mean and standard error of a root count over independent samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub mean: f64,
    pub stderr: f64,
    /// Trials run, including degenerate ones.
    pub trials: u64,
    pub degree: u64,
    pub interval: IntervalSpec,
    /// All-zero or uncertified samples, excluded from `mean`.
    pub degenerate_samples: u64,
    /// The uncertified part of `degenerate_samples`.
    pub uncertified_samples: u64,
}

/// Estimate of a constant from a schedule of centered values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    /// The last centered value.
    pub value: f64,
    pub stderr: f64,
    /// `(n, centered value)` per schedule entry; for the truncated-series
    /// estimator the first entry is the cutoff `C`.
    pub per_n_values: Vec<(f64, f64)>,
    /// Standard error of each centered value.
    pub per_n_stderr: Vec<f64>,
    /// Largest absolute difference between successive centered values.
    pub cauchy_gap: f64,
}

impl ConstantEstimate {
    pub(crate) fn from_points(points: Vec<(f64, f64)>, stderrs: Vec<f64>) -> Self {
        let values: Vec<f64> = points.iter().map(|p| p.1).collect();
        ConstantEstimate {
            value: *values.last().unwrap_or(&f64::NAN),
            stderr: *stderrs.last().unwrap_or(&0.0),
            cauchy_gap: cauchy_gap(&values),
            per_n_values: points,
            per_n_stderr: stderrs,
        }
    }
}

/// Execution settings shared by the estimators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub count: CountOptions,
}

/// Outcome of counting one sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sample {
    Count(u64),
    AllZero,
    Uncertified,
}

/// Counts roots of one sample with the degenerate cases separated out.
pub(crate) fn count_sample(coeffs: &[f64], interval: &IntervalSpec, opts: &CountOptions) -> Result<Sample> {
    if coeffs.iter().all(|&c| c == 0.0) {
        return Ok(Sample::AllZero);
    }
    let c = count_roots_f64(coeffs, interval, opts)?;
    Ok(if c.certified { Sample::Count(c.count) } else { Sample::Uncertified })
}

/// Integer accumulator over samples.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Tally {
    pub used: u64,
    pub sum: u64,
    pub sum_sq: u128,
    pub all_zero: u64,
    pub uncertified: u64,
}

impl Tally {
    pub fn push(&mut self, s: Sample) {
        match s {
            Sample::Count(c) => {
                self.used += 1;
                self.sum += c;
                self.sum_sq += u128::from(c) * u128::from(c);
            }
            Sample::AllZero => self.all_zero += 1,
            Sample::Uncertified => self.uncertified += 1,
        }
    }

    pub fn trials(&self) -> u64 {
        self.used + self.all_zero + self.uncertified
    }

    /// Mean and standard error of the used samples.
    pub fn moments(&self) -> (f64, f64) {
        if self.used == 0 {
            return (f64::NAN, f64::NAN);
        }
        let k = self.used as f64;
        let mean = self.sum as f64 / k;
        if self.used < 2 {
            return (mean, 0.0);
        }
        // exact integer centered sum of squares: k S2 - S^2, over k^2 (k - 1)
        let num = i128::try_from(u128::from(self.used) * self.sum_sq).expect("fits")
            - i128::from(self.sum) * i128::from(self.sum);
        let var = num as f64 / (k * (k - 1.0));
        (mean, (var.max(0.0) / k).sqrt())
    }

    pub fn check_certified(&self) -> Result<()> {
        let trials = self.trials();
        if self.uncertified as f64 > MAX_UNCERTIFIED_FRACTION * trials as f64 {
            return Err(Error::Certification {
                uncertified: self.uncertified as usize,
                trials: trials as usize,
                limit: MAX_UNCERTIFIED_FRACTION,
            });
        }
        Ok(())
    }

    pub fn into_result(self, degree: u64, interval: IntervalSpec) -> Result<EstimateResult> {
        self.check_certified()?;
        let (mean, stderr) = self.moments();
        Ok(EstimateResult {
            mean,
            stderr,
            trials: self.trials(),
            degree,
            interval,
            degenerate_samples: self.all_zero + self.uncertified,
            uncertified_samples: self.uncertified,
        })
    }
}

/// Runs `f` on trials `0..trials`, returning the outputs in trial order.
pub(crate) fn run_trials<T, F>(trials: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let work = || (0..trials).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match threads {
        None => work(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot start {t} worker threads: {e}")))?
            .install(work),
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be >= 1".into()));
    }
    Ok(())
}

/// `E N_{P_n}(I)` by Monte Carlo over `trials` certified counts.
pub fn estimate_expected_roots<S: CoefficientSource + ?Sized>(
    law: &S,
    n: u64,
    interval: &IntervalSpec,
    trials: u64,
    seed: u64,
) -> Result<EstimateResult> {
    estimate_expected_roots_with(law, n, interval, trials, seed, &RunOptions::default())
}

/// [`estimate_expected_roots`] with explicit execution settings.
pub fn estimate_expected_roots_with<S: CoefficientSource + ?Sized>(
    law: &S,
    n: u64,
    interval: &IntervalSpec,
    trials: u64,
    seed: u64,
    run: &RunOptions,
) -> Result<EstimateResult> {
    check_trials(trials)?;
    let samples = run_trials(trials, run.threads, |i| {
        let mut coeffs = vec![0.0; n as usize + 1];
        law.fill(&CouplingStream::new(seed, i), &mut coeffs);
        count_sample(&coeffs, interval, &run.count)
    })?;
    let mut tally = Tally::default();
    for s in samples {
        tally.push(s);
    }
    tally.into_result(n, *interval)
}

/// Per-degree estimates on a schedule, sharing each trial's coefficient
/// stream across degrees.
pub fn estimate_schedule<S: CoefficientSource + ?Sized>(
    law: &S,
    interval: &IntervalSpec,
    schedule: &[u64],
    trials: u64,
    seed: u64,
    run: &RunOptions,
) -> Result<Vec<EstimateResult>> {
    check_trials(trials)?;
    let n_max = schedule.iter().copied().max().unwrap_or(0) as usize;
    let samples = run_trials(trials, run.threads, |i| {
        let mut coeffs = vec![0.0; n_max + 1];
        law.fill(&CouplingStream::new(seed, i), &mut coeffs);
        schedule
            .iter()
            .map(|&n| count_sample(&coeffs[..=n as usize], interval, &run.count))
            .collect::<Result<Vec<Sample>>>()
    })?;
    let mut tallies = vec![Tally::default(); schedule.len()];
    for per_trial in samples {
        for (t, s) in tallies.iter_mut().zip(per_trial) {
            t.push(s);
        }
    }
    tallies
        .into_iter()
        .zip(schedule)
        .map(|(t, &n)| t.into_result(n, *interval))
        .collect()
}

/// The constant `C_{xi,I}`: Monte Carlo means along the schedule minus
/// `(k/2pi) log n`, where `k` counts the one-sided neighbourhoods of `+-1`
/// inside `I` (4 for the real line, 1 for each quarter).
pub fn estimate_constant<S: CoefficientSource + ?Sized>(
    law: &S,
    interval: &IntervalSpec,
    schedule: &[u64],
    trials: u64,
    seed: u64,
) -> Result<ConstantEstimate> {
    estimate_constant_with(law, interval, schedule, trials, seed, &RunOptions::default())
}

/// [`estimate_constant`] with explicit execution settings.
pub fn estimate_constant_with<S: CoefficientSource + ?Sized>(
    law: &S,
    interval: &IntervalSpec,
    schedule: &[u64],
    trials: u64,
    seed: u64,
    run: &RunOptions,
) -> Result<ConstantEstimate> {
    validate_schedule(schedule)?;
    let estimates = estimate_schedule(law, interval, schedule, trials, seed, run)?;
    Ok(center(&estimates, interval))
}

/// Centers per-degree estimates by the logarithmic growth of the interval.
pub fn center(estimates: &[EstimateResult], interval: &IntervalSpec) -> ConstantEstimate {
    let slope = interval.log_coefficient();
    let points = estimates
        .iter()
        .map(|e| (e.degree as f64, e.mean - slope * (e.degree as f64).ln()))
        .collect();
    let stderrs = estimates.iter().map(|e| e.stderr).collect();
    ConstantEstimate::from_points(points, stderrs)
}

/// `sum_{m=1}^{n} m p^m (1 - p)`: the expected multiplicity of the root at 0
/// when each coefficient vanishes with probability `p`. `None` gives the
/// limit `p / (1 - p)`.
pub fn zero_multiplicity_expectation(p: f64, n: Option<u64>) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Parameter(format!("zero mass p must lie in [0, 1), got {p}")));
    }
    Ok(match n {
        None => p / (1.0 - p),
        Some(n) => {
            let mut sum = 0.0;
            let mut pm = 1.0;
            for m in 1..=n {
                pm *= p;
                if pm == 0.0 {
                    break;
                }
                sum += m as f64 * pm * (1.0 - p);
            }
            sum
        }
    })
}

/// Mean multiplicity at 0 over samples that are not identically zero, the
/// quantity the Monte Carlo estimators report:
/// `zero_multiplicity_expectation(p, n) / (1 - p^(n+1))`.
pub fn zero_multiplicity_conditional(p: f64, n: u64) -> Result<f64> {
    let s = zero_multiplicity_expectation(p, Some(n))?;
    Ok(s / (1.0 - p.powf(n as f64 + 1.0)))
}

/// Exact `E N_{P_n}(I)` for a discrete law by enumerating every coefficient
/// vector, with Sturm counts and exact atom masses. All-zero vectors are
/// excluded and the result conditioned on their complement, matching the
/// Monte Carlo convention.
pub fn enumerate_expected_roots(law: &CoefficientLaw, n: u64, interval: &IntervalSpec) -> Result<BigRational> {
    const MAX_CASES: f64 = 1e6;
    if !law.is_discrete() {
        return Err(Error::Parameter(format!("law `{}` is not discrete", law.name())));
    }
    let atoms = law.atoms();
    let slots = n as usize + 1;
    if (atoms.len() as f64).powi(slots as i32) > MAX_CASES {
        return Err(Error::Parameter(format!(
            "{} atoms over {slots} coefficients exceeds the enumeration limit",
            atoms.len()
        )));
    }
    let mut idx = vec![0usize; slots];
    let mut total = BigRational::zero();
    let mut nonzero_mass = BigRational::zero();
    loop {
        let coeffs: Vec<f64> = idx.iter().map(|&j| atoms[j].value).collect();
        let mass = idx.iter().fold(BigRational::one(), |m, &j| m * &atoms[j].mass);
        if coeffs.iter().any(|&c| c != 0.0) {
            let poly = Polynomial::from_f64(coeffs)?;
            let count = exact_count(&poly, interval)?;
            total += &mass * BigRational::from_integer(count.into());
            nonzero_mass += mass;
        }
        // odometer over atom indices
        let mut k = 0;
        loop {
            if k == slots {
                return if nonzero_mass.is_zero() {
                    Err(Error::Degenerate("every coefficient vector is zero".into()))
                } else {
                    Ok(total / nonzero_mass)
                };
            }
            idx[k] += 1;
            if idx[k] < atoms.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Exact count with the root at 0 counted by multiplicity.
fn exact_count(poly: &Polynomial, interval: &IntervalSpec) -> Result<u64> {
    let tau = poly.multiplicity_at_zero().tau;
    let q = poly.shift_down(tau).trimmed();
    // q(0) != 0, so the Sturm count sees only nonzero roots
    let zero = if interval.contains_zero() { tau as u64 } else { 0 };
    Ok(sturm_count(&q, interval)?.count + zero)
}

/// Converts an exact mean to binary64.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_multiplicity_limits() {
        assert_eq!(zero_multiplicity_expectation(0.0, None).unwrap(), 0.0);
        assert_eq!(zero_multiplicity_expectation(0.0, Some(10)).unwrap(), 0.0);
        assert!((zero_multiplicity_expectation(0.5, None).unwrap() - 1.0).abs() < 1e-15);
        assert!((zero_multiplicity_expectation(0.9, None).unwrap() - 9.0).abs() < 1e-12);
        assert!(zero_multiplicity_expectation(1.0, None).is_err());
        // finite sums approach the limit
        let s = zero_multiplicity_expectation(0.5, Some(200)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tally_moments_are_exact() {
        let mut t = Tally::default();
        for c in [1, 2, 3, 4] {
            t.push(Sample::Count(c));
        }
        t.push(Sample::AllZero);
        let (mean, se) = t.moments();
        assert_eq!(mean, 2.5);
        // sample variance 5/3
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(t.trials(), 5);
    }

    #[test]
    fn rademacher_degree_one_enumeration() {
        let law = CoefficientLaw::by_name("rademacher").unwrap();
        let q = enumerate_expected_roots(&law, 1, &"(0,1]".parse().unwrap()).unwrap();
        assert_eq!(q, BigRational::new(1.into(), 2.into()));
    }
}
