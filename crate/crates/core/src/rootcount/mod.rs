//! Certified real-root counting.
//!
//! Two counters are provided: exact Sturm sequences ([`sturm_count`]) and
//! certified bisection with precision escalation ([`bisection_count`]).
//! [`count_roots`] is the sampling entry point: it splits off the root at
//! the origin (counted with its multiplicity `tau`), counts the distinct
//! nonzero roots of the deflated polynomial on `I` intersected with
//! `[-1, 1]`, and maps the rest of `I` into `[-1, 1]` through the reciprocal
//! polynomial.

pub mod bigfloat;
pub mod bisection;
pub mod jensen;
pub mod sturm;
pub mod transform;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalSpec;
use crate::poly::{Polynomial, ZeroMultiplicity};
use bisection::{count_pieces, Endpoint, Piece, Prepared};
use sturm::SturmChain;

pub use bisection::{CAP_BITS, FLOAT_BITS, START_BITS};
pub use jensen::{jensen_bound, jensen_bound_poly, Enclosure};
pub use transform::{transform_negate, transform_reciprocal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    SturmExact,
    BisectionCertified,
}

impl std::fmt::Display for CountMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CountMethod::SturmExact => "sturm-exact",
            CountMethod::BisectionCertified => "bisection-certified",
        })
    }
}

/// A root count with its certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedCount {
    pub count: u64,
    pub method: CountMethod,
    pub certified: bool,
    pub precision_bits_used: u32,
    /// A repeated root was found and the square-free part was counted.
    pub squarefree_reduced: bool,
}

/// Knobs for [`count_roots`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOptions {
    /// First bisection tier; [`FLOAT_BITS`] starts in binary64.
    pub start_bits: u32,
    pub cap_bits: u32,
    /// Exact polynomials up to this degree fall back to Sturm when bisection
    /// cannot certify.
    pub sturm_fallback_degree: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            start_bits: FLOAT_BITS,
            cap_bits: CAP_BITS,
            sturm_fallback_degree: 256,
        }
    }
}

/// The order of the root at the origin.
pub fn multiplicity_at_zero(poly: &Polynomial) -> ZeroMultiplicity {
    poly.multiplicity_at_zero()
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite endpoint")
}

/// Distinct real roots of an exact polynomial in the interval.
pub fn sturm_count(poly: &Polynomial, interval: &IntervalSpec) -> Result<CertifiedCount> {
    Ok(sturm_counts(poly, std::slice::from_ref(interval))?[0])
}

/// [`sturm_count`] for several intervals, building the chain once.
pub fn sturm_counts(poly: &Polynomial, intervals: &[IntervalSpec]) -> Result<Vec<CertifiedCount>> {
    if poly.is_zero() {
        return Err(Error::Degenerate("Sturm count of the zero polynomial".into()));
    }
    let chain = SturmChain::new(&poly.to_integer_coefficients());
    Ok(intervals
        .iter()
        .map(|iv| CertifiedCount {
            count: sturm_on_chain(&chain, iv),
            method: CountMethod::SturmExact,
            certified: true,
            precision_bits_used: 0,
            squarefree_reduced: chain.reduced,
        })
        .collect())
}

fn sturm_on_ints(ints: &[BigInt], interval: &IntervalSpec) -> (u64, bool) {
    let chain = SturmChain::new(&ints.to_vec());
    (sturm_on_chain(&chain, interval), chain.reduced)
}

fn sturm_on_chain(chain: &SturmChain, interval: &IntervalSpec) -> u64 {
    let base = chain.base();
    let sign = |x: &BigRational| crate::poly::sign_of_integer_poly_at(base, x);
    if interval.is_point() {
        return u64::from(sign(&rational(interval.lo)) == 0);
    }
    let a = interval.lo.is_finite().then(|| rational(interval.lo));
    let b = interval.hi.is_finite().then(|| rational(interval.hi));
    let mut count = chain.count_half_open(a.as_ref(), b.as_ref()) as i64;
    if let Some(a) = &a {
        if interval.lo_closed && sign(a) == 0 {
            count += 1;
        }
    }
    if let Some(b) = &b {
        if !interval.hi_closed && sign(b) == 0 {
            count -= 1;
        }
    }
    count.max(0) as u64
}

/// Pieces of `[-1, 1]` for the polynomial itself and for its reciprocal.
fn decompose(interval: &IntervalSpec) -> (Option<Piece>, Vec<Piece>) {
    let unit = IntervalSpec {
        lo: -1.0,
        hi: 1.0,
        lo_closed: true,
        hi_closed: true,
    };
    let inner = interval.intersect(&unit).map(|i| Piece {
        lo: Endpoint::from_f64(i.lo),
        hi: Endpoint::from_f64(i.hi),
        lo_closed: i.lo_closed,
        hi_closed: i.hi_closed,
    });
    let recip = |x: f64| -> Endpoint {
        if x.is_infinite() {
            Endpoint::from_f64(0.0)
        } else {
            Endpoint::from_rational(&rational(x).recip())
        }
    };
    let mut outer = Vec::new();
    let right = IntervalSpec {
        lo: 1.0,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };
    if let Some(j) = interval.intersect(&right) {
        // x in (lo, hi)  <=>  1/x in (1/hi, 1/lo)
        outer.push(Piece {
            lo: recip(j.hi),
            hi: recip(j.lo),
            lo_closed: j.hi_closed,
            hi_closed: j.lo_closed,
        });
    }
    let left = IntervalSpec {
        lo: f64::NEG_INFINITY,
        hi: -1.0,
        lo_closed: false,
        hi_closed: false,
    };
    if let Some(j) = interval.intersect(&left) {
        outer.push(Piece {
            lo: recip(j.hi),
            hi: recip(j.lo),
            lo_closed: j.hi_closed,
            hi_closed: j.lo_closed,
        });
    }
    (inner, outer)
}

/// Certified bisection count of distinct real roots on a bounded interval,
/// starting at `precision_bits` ([`FLOAT_BITS`] for the binary64 tier) and
/// doubling up to [`CAP_BITS`].
///
/// No special treatment is given to the origin, so a multiple root there
/// leaves the count uncertified.
pub fn bisection_count(poly: &Polynomial, interval: &IntervalSpec, precision_bits: u32) -> Result<CertifiedCount> {
    bisection_count_capped(poly, interval, precision_bits, CAP_BITS)
}

/// [`bisection_count`] with an explicit cap.
pub fn bisection_count_capped(
    poly: &Polynomial,
    interval: &IntervalSpec,
    precision_bits: u32,
    cap_bits: u32,
) -> Result<CertifiedCount> {
    if !interval.is_bounded() {
        return Err(Error::Unbounded(interval.to_string()));
    }
    if poly.is_zero() {
        return Err(Error::Degenerate("bisection count of the zero polynomial".into()));
    }
    let (inner, outer) = decompose(interval);
    let prep = Prepared::from_polynomial(poly);
    let mut res = count_pieces(&prep, inner.as_slice(), precision_bits, cap_bits);
    if !outer.is_empty() {
        let rev = Prepared::from_polynomial(&poly.trimmed().reverse_slots());
        let r = count_pieces(&rev, &outer, precision_bits, cap_bits);
        res.count += r.count;
        res.certified &= r.certified;
        res.bits_used = res.bits_used.max(r.bits_used);
    }
    Ok(CertifiedCount {
        count: res.count,
        method: CountMethod::BisectionCertified,
        certified: res.certified,
        precision_bits_used: res.bits_used,
        squarefree_reduced: false,
    })
}

/// Root count with the origin counted by multiplicity: distinct nonzero
/// real roots in `I`, plus `tau` when `0` lies in `I`.
pub fn count_roots(poly: &Polynomial, interval: &IntervalSpec, opts: &CountOptions) -> Result<CertifiedCount> {
    if poly.is_f64_exact() {
        return count_roots_f64(&poly.f64_coefficients(), interval, opts);
    }
    let z = poly.multiplicity_at_zero();
    if z.degenerate {
        return Err(Error::Degenerate("root count of the zero polynomial".into()));
    }
    let q = poly.shift_down(z.tau).trimmed();
    let ints = q.to_integer_coefficients();
    let (inner, outer) = decompose(interval);
    let mut res = count_pieces(&Prepared::from_ints(ints.clone()), inner.as_slice(), opts.start_bits, opts.cap_bits);
    if !outer.is_empty() {
        let rev: Vec<BigInt> = ints.iter().rev().cloned().collect();
        let r = count_pieces(&Prepared::from_ints(rev), &outer, opts.start_bits, opts.cap_bits);
        res.count += r.count;
        res.certified &= r.certified;
        res.bits_used = res.bits_used.max(r.bits_used);
    }
    finish(res, &ints, z.tau, interval, opts)
}

/// [`count_roots`] on binary64 coefficients, lowest degree first. This is
/// the sampling hot path.
pub fn count_roots_f64(coeffs: &[f64], interval: &IntervalSpec, opts: &CountOptions) -> Result<CertifiedCount> {
    let Some(tau) = coeffs.iter().position(|&c| c != 0.0) else {
        return Err(Error::Degenerate("root count of the zero polynomial".into()));
    };
    let last = coeffs.iter().rposition(|&c| c != 0.0).expect("nonzero");
    let q = &coeffs[tau..=last];
    if interval.is_point() {
        let x = interval.lo;
        let hit = if x == 0.0 {
            tau as u64
        } else {
            let s = crate::poly::sign_of_integer_poly_at(
                &Polynomial::from_f64(q.to_vec())?.to_integer_coefficients(),
                &rational(x),
            );
            u64::from(s == 0)
        };
        return Ok(CertifiedCount {
            count: hit,
            method: CountMethod::SturmExact,
            certified: true,
            precision_bits_used: 0,
            squarefree_reduced: false,
        });
    }
    let (inner, outer) = decompose(interval);
    let mut res = count_pieces(&Prepared::from_f64(q), inner.as_slice(), opts.start_bits, opts.cap_bits);
    if !outer.is_empty() {
        let rev: Vec<f64> = q.iter().rev().copied().collect();
        let r = count_pieces(&Prepared::from_f64(&rev), &outer, opts.start_bits, opts.cap_bits);
        res.count += r.count;
        res.certified &= r.certified;
        res.bits_used = res.bits_used.max(r.bits_used);
    }
    if res.certified {
        return Ok(with_zero(res.count, res.bits_used, tau, interval));
    }
    let ints = Polynomial::from_f64(q.to_vec())?.to_integer_coefficients();
    finish(res, &ints, tau, interval, opts)
}

fn with_zero(count: u64, bits: u32, tau: usize, interval: &IntervalSpec) -> CertifiedCount {
    let zero = if interval.contains_zero() { tau as u64 } else { 0 };
    CertifiedCount {
        count: count + zero,
        method: CountMethod::BisectionCertified,
        certified: true,
        precision_bits_used: bits,
        squarefree_reduced: false,
    }
}

fn finish(
    res: bisection::TierResult,
    q_ints: &[BigInt],
    tau: usize,
    interval: &IntervalSpec,
    opts: &CountOptions,
) -> Result<CertifiedCount> {
    if res.certified {
        return Ok(with_zero(res.count, res.bits_used, tau, interval));
    }
    let zero = if interval.contains_zero() { tau as u64 } else { 0 };
    if q_ints.len() <= opts.sturm_fallback_degree + 1 {
        let (count, reduced) = sturm_on_ints(q_ints, interval);
        return Ok(CertifiedCount {
            count: count + zero,
            method: CountMethod::SturmExact,
            certified: true,
            precision_bits_used: res.bits_used,
            squarefree_reduced: reduced,
        });
    }
    Ok(CertifiedCount {
        count: res.count + zero,
        method: CountMethod::BisectionCertified,
        certified: false,
        precision_bits_used: res.bits_used,
        squarefree_reduced: false,
    })
}
