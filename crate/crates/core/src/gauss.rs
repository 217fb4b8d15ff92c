//! The Gaussian case in closed form.
//!
//! For standard normal coefficients the expected number of real roots of
//! `P_n` in an interval is the integral of the Edelman-Kostlan density
//!
//! ```text
//! rho_n(t) = (1/pi) sqrt( 1/(t^2 - 1)^2 - (n+1)^2 t^(2n) / (t^(2n+2) - 1)^2 )
//! ```
//!
//! Both terms blow up at `|t| = 1`. Writing `t = exp(-y)` and `m = n + 1`,
//!
//! ```text
//! rho_n(t) = sqrt(g(y)) / (2 pi t),   g(y) = csch^2(y) - m^2 csch^2(m y),
//! ```
//!
//! and with `f(z) = csch^2(z) - 1/z^2` (an entire function of `z^2`) the
//! poles cancel exactly: `g(y) = f(y) - m^2 f(m y)`. Evaluating `f` from its
//! power series near 0 keeps full binary64 accuracy up to `t = 1`, where
//! `g(0) = (m^2 - 1)/3`.
//!
//! The density is even and satisfies `rho(1/t) / t^2 = rho(t)`, so every
//! interval reduces to pieces of `[0, 1]`. On `[1/2, 1]` the quadrature runs
//! in `y`, where `rho dt = sqrt(g(y)) dy / (2 pi)` and the peak of width
//! `1/n` at `t = 1` becomes a plateau that geometric break points resolve.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::interval::IntervalSpec;
use crate::montecarlo::ConstantEstimate;
use crate::quadrature::{integrate, integrate_with_breaks, QuadratureOptions, QuadratureResult};

/// Target absolute error of [`expected_roots_gaussian`].
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Degree used to evaluate the limit constant on `(0, 1]`.
const LIMIT_DEGREE: u64 = 1 << 30;

// Taylor coefficients of csch^2(z) - 1/z^2 in powers of z^2:
// -(2k-1) 2^(2k) B_(2k) / (2k)!
const CSCH2_SERIES: [f64; 12] = [
    -1.0 / 3.0,
    1.0 / 15.0,
    -2.0 / 189.0,
    1.0 / 675.0,
    -2.0 / 10395.0,
    1382.0 / 58046625.0,
    -4.0 / 1403325.0,
    3617.0 / 10854718875.0,
    -3.826_333_907_857_528_5e-8,
    4.332_978_728_872_515e-9,
    -4.852_350_845_790_551e-10,
    5.384_692_568_559_723_4e-11,
];

/// `csch^2(z) - 1/z^2`, accurate for all `z >= 0`.
fn csch2_minus_pole(z: f64) -> f64 {
    if z < 0.5 {
        let z2 = z * z;
        CSCH2_SERIES.iter().rev().fold(0.0, |acc, &c| acc * z2 + c)
    } else {
        let s = z.sinh();
        1.0 / (s * s) - 1.0 / (z * z)
    }
}

/// `csch^2(y) - m^2 csch^2(m y)` for `y >= 0`.
fn g(y: f64, m: f64) -> f64 {
    if y < 1.0 {
        csch2_minus_pole(y) - m * m * csch2_minus_pole(m * y)
    } else {
        let s = y.sinh();
        let sm = (m * y).sinh();
        1.0 / (s * s) - m * m / (sm * sm)
    }
}

/// Density in the logarithmic variable: `rho_n(t) |dt/dy|` at `t = exp(-y)`.
fn log_density(y: f64, m: f64) -> f64 {
    g(y, m).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
}

/// The Edelman-Kostlan density of real roots of a degree-`n` Kac
/// polynomial with standard normal coefficients. The removable singularity
/// at `t = +-1` is filled in by its limit.
pub fn ek_density(t: f64, n: u64) -> f64 {
    let t = t.abs();
    if t > 1.0 {
        return ek_density(1.0 / t, n) / (t * t);
    }
    let m = n as f64 + 1.0;
    if t <= 0.5 {
        // no cancellation here: the second term is at most m^2 4^-n times
        // the first
        let u = 1.0 - t * t;
        let tm = t.powf(m);
        let w = 1.0 - tm * tm;
        let second = if t == 0.0 { 0.0 } else { m * m * (tm / t) * (tm / t) / (w * w) };
        let v = 1.0 / (u * u) - second;
        return v.max(0.0).sqrt() / std::f64::consts::PI;
    }
    let y = -(t - 1.0).ln_1p();
    g(y, m).max(0.0).sqrt() / (2.0 * std::f64::consts::PI * t)
}

/// Pieces of `[0, 1]` whose masses add up to the mass of `interval`, by the
/// even and reciprocal symmetries of the density.
fn unit_pieces(interval: &IntervalSpec) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let positive = IntervalSpec {
        lo: 0.0,
        hi: f64::INFINITY,
        lo_closed: true,
        hi_closed: false,
    };
    for half in [*interval, interval.negated()] {
        let Some(j) = half.intersect(&positive) else { continue };
        if j.lo < 1.0 {
            out.push((j.lo, j.hi.min(1.0)));
        }
        if j.hi > 1.0 {
            let lo = if j.hi.is_infinite() { 0.0 } else { 1.0 / j.hi };
            out.push((lo, 1.0 / j.lo.max(1.0)));
        }
    }
    out.retain(|(a, b)| b > a);
    out
}

/// Mass of `[a, b]` with `0 <= a < b <= 1`.
fn unit_mass(a: f64, b: f64, n: u64, tol: f64) -> QuadratureResult {
    let m = n as f64 + 1.0;
    let opts = QuadratureOptions {
        abs_tol: tol / 2.0,
        rel_tol: 0.0,
        max_subdivisions: 20_000,
    };
    let mut res = QuadratureResult::ZERO;
    if a < 0.5 {
        let hi = b.min(0.5);
        res = res.combine(integrate(|t| ek_density(t, n), a, hi, opts));
    }
    if b > 0.5 {
        let y_lo = -(b - 1.0).ln_1p();
        let y_hi = -(a.max(0.5) - 1.0).ln_1p();
        // geometric breaks from the 1/m plateau out to y = ln 2
        let mut breaks = vec![y_lo];
        let mut x = 0.25 / m;
        while x < y_hi {
            if x > y_lo {
                breaks.push(x);
            }
            x *= 2.0;
        }
        breaks.push(y_hi);
        res = res.combine(integrate_with_breaks(|y| log_density(y, m), &breaks, opts));
    }
    res
}

/// `E N_n(I)` for standard normal coefficients, by adaptive quadrature of
/// [`ek_density`] to absolute error [`DEFAULT_TOLERANCE`].
pub fn expected_roots_gaussian(n: u64, interval: &IntervalSpec) -> QuadratureResult {
    expected_roots_gaussian_tol(n, interval, DEFAULT_TOLERANCE)
}

/// [`expected_roots_gaussian`] with an explicit absolute tolerance.
pub fn expected_roots_gaussian_tol(n: u64, interval: &IntervalSpec, tol: f64) -> QuadratureResult {
    let pieces = unit_pieces(interval);
    let share = tol / pieces.len().max(1) as f64;
    pieces
        .iter()
        .fold(QuadratureResult::ZERO, |acc, &(a, b)| acc.combine(unit_mass(a, b, n, share)))
}

/// The `n -> infinity` limit of the Gaussian count on `[0, 1 - 1/C]`:
/// `(1/2pi) log((2 - 1/C) C)`.
pub fn bulk_closed_form(c: f64) -> Result<f64> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::Parameter(format!("cutoff C must be finite and > 1, got {c}")));
    }
    Ok(((2.0 - 1.0 / c) * c).ln() / (2.0 * std::f64::consts::PI))
}

/// Checks that a degree schedule is strictly increasing with at least three
/// entries.
pub fn validate_schedule(schedule: &[u64]) -> Result<()> {
    if schedule.len() < 3 {
        return Err(Error::Schedule(format!(
            "need at least 3 degrees, got {}",
            schedule.len()
        )));
    }
    if schedule[0] == 0 {
        return Err(Error::Schedule("degrees must be >= 1".into()));
    }
    if let Some(w) = schedule.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Schedule(format!(
            "degrees must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Largest absolute difference between successive values.
pub fn cauchy_gap(values: &[f64]) -> f64 {
    values.windows(2).fold(0.0, |m, w| m.max((w[1] - w[0]).abs()))
}

/// Gaussian constant of an interval: `E N_n(I)` minus its logarithmic
/// growth `(k/2pi) log n`, where `k` counts the one-sided neighbourhoods of
/// `+-1` inside `I` (4 for the real line, 1 for each quarter).
///
/// `stderr` holds the quadrature error estimate of the last entry, and
/// `per_n_stderr` those of every entry.
pub fn gaussian_constant(interval: &IntervalSpec, schedule: &[u64]) -> Result<ConstantEstimate> {
    validate_schedule(schedule)?;
    let slope = interval.log_coefficient();
    let mut points = Vec::with_capacity(schedule.len());
    let mut errors = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let q = expected_roots_gaussian(n, interval);
        points.push((n as f64, q.value - slope * (n as f64).ln()));
        errors.push(q.error_estimate);
    }
    Ok(ConstantEstimate::from_points(points, errors))
}

/// `lim_n E N_n((0, 1]) - (1/2pi) log n` for Gaussian coefficients: a
/// quarter of the whole-line constant. Computed once by quadrature at a
/// degree where the remaining `O(1/n)` drift is below 1e-9.
pub fn gaussian_unit_constant() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        let n = LIMIT_DEGREE;
        let q = expected_roots_gaussian_tol(n, &IntervalSpec::unit_right(), 1e-12);
        q.value - (n as f64).ln() / (2.0 * std::f64::consts::PI)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Kac's form of the density from the covariance sums, in binary64.
    fn kac_density(t: f64, n: u64) -> f64 {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for k in 0..=n {
            let k = k as f64;
            a += t.powf(2.0 * k);
            if k > 0.0 {
                b += k * t.powf(2.0 * k - 1.0);
                c += k * k * t.powf(2.0 * k - 2.0);
            }
        }
        (a * c - b * b).max(0.0).sqrt() / (PI * a)
    }

    #[test]
    fn density_at_origin() {
        for n in [1, 2, 7, 1000] {
            assert!((ek_density(0.0, n) - 1.0 / PI).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_kac_form_away_from_one() {
        for n in [1u64, 2, 5, 10, 40] {
            for i in 0..60 {
                let t = -2.9 + 0.1 * i as f64;
                if (t.abs() - 1.0).abs() < 0.05 {
                    continue;
                }
                let (e, k) = (ek_density(t, n), kac_density(t, n));
                assert!((e - k).abs() <= 1e-9 * k.max(1.0), "n={n} t={t}: {e} vs {k}");
            }
        }
    }

    #[test]
    fn limit_at_one() {
        for n in [1u64, 3, 100, 1 << 20] {
            let m = n as f64 + 1.0;
            let expect = ((m * m - 1.0) / 3.0).sqrt() / (2.0 * PI);
            assert!((ek_density(1.0, n) / expect - 1.0).abs() < 1e-14);
            assert!((ek_density(1.0 - 1e-12, n) / expect - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn degree_one_total_mass() {
        let q = expected_roots_gaussian(1, &IntervalSpec::whole_line());
        assert!((q.value - 1.0).abs() < 1e-9, "{q:?}");
    }

    #[test]
    fn bulk_closed_form_values() {
        assert!((bulk_closed_form(2.0).unwrap() - 3f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!(bulk_closed_form(1.0).is_err());
        assert!(bulk_closed_form(1.0 + 1e-12).unwrap().abs() < 1e-11);
    }

    #[test]
    fn schedule_validation() {
        assert!(validate_schedule(&[1, 2]).is_err());
        assert!(validate_schedule(&[4, 4, 8]).is_err());
        assert!(validate_schedule(&[2, 4, 8]).is_ok());
    }
}
