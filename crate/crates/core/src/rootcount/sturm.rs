//! Exact Sturm sequences over the integers.
//!
//! Remainders follow the subresultant sequence, so every chain element is an
//! integer polynomial of bounded size, with signs corrected to match the
//! classical rational Sturm chain.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::sign_of_integer_poly_at;

/// Integer polynomial, lowest degree first, without trailing zeros.
pub type IntPoly = Vec<BigInt>;

pub fn trim(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn degree(p: &IntPoly) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn derivative(p: &IntPoly) -> IntPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect(),
    )
}

fn content(p: &IntPoly) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Divides by the positive content.
pub fn primitive(p: IntPoly) -> IntPoly {
    let g = content(&p);
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

/// Pseudo-division: returns `(q, r, s)` with `lc(b)^s a = q b + r` and
/// `deg r < deg b`.
fn pseudo_divide(a: &IntPoly, b: &IntPoly) -> (IntPoly, IntPoly, u32) {
    let db = degree(b).expect("nonzero divisor");
    let lc = b[db].clone();
    let mut r = a.clone();
    let mut q: IntPoly = vec![BigInt::zero(); a.len().saturating_sub(db).max(1)];
    let mut steps = 0;
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let shift = dr - db;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= &lc;
        }
        for c in q.iter_mut() {
            *c *= &lc;
        }
        q[shift] += &lr;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &lr * bc;
        }
        r = trim(r);
        steps += 1;
    }
    (trim(q), r, steps)
}

/// Exact quotient `a / b` up to a nonzero integer factor, when `b | a` over
/// the rationals.
fn exact_quotient(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let (q, r, _) = pseudo_divide(a, b);
    debug_assert!(r.is_empty(), "divisor does not divide");
    primitive(q)
}

/// Sturm chain of a nonzero polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
    /// True when the input had repeated roots and its square-free part was
    /// used instead.
    pub reduced: bool,
}

impl SturmChain {
    /// Builds the chain of the square-free part of `p`.
    pub fn new(p: &IntPoly) -> Self {
        let p = primitive(trim(p.clone()));
        assert!(!p.is_empty(), "zero polynomial has no Sturm chain");
        let raw = remainder_chain(p.clone());
        let gcd = raw.last().cloned().unwrap_or_else(|| vec![BigInt::one()]);
        if degree(&gcd).unwrap_or(0) == 0 {
            return SturmChain { chain: raw, reduced: false };
        }
        let sqfree = exact_quotient(&p, &gcd);
        SturmChain {
            chain: remainder_chain(sqfree),
            reduced: true,
        }
    }

    /// The square-free polynomial the chain starts with.
    pub fn base(&self) -> &IntPoly {
        &self.chain[0]
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    fn variations<I: Iterator<Item = i32>>(signs: I) -> usize {
        let mut last = 0;
        let mut v = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// Sign variations at a rational point.
    pub fn variations_at(&self, x: &BigRational) -> usize {
        Self::variations(self.chain.iter().map(|p| sign_of_integer_poly_at(p, x)))
    }

    /// Sign variations at `+inf` (`positive`) or `-inf`.
    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let d = p.len() - 1;
            let s = if p[d].is_positive() { 1 } else { -1 };
            if positive || d % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Distinct roots in `(a, b]`; `None` stands for the infinite endpoint
    /// on that side.
    pub fn count_half_open(&self, a: Option<&BigRational>, b: Option<&BigRational>) -> usize {
        let va = match a {
            Some(x) => self.variations_at(x),
            None => self.variations_at_infinity(false),
        };
        let vb = match b {
            Some(x) => self.variations_at(x),
            None => self.variations_at_infinity(true),
        };
        va.saturating_sub(vb)
    }
}

/// `lc(b)^(deg a - deg b + 1) a mod b`.
fn prem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = degree(b).expect("nonzero divisor");
    let lc = &b[db];
    let mut r = a.clone();
    let mut steps = 0;
    let total = (a.len() - db) as u32;
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let shift = dr - db;
        let lr = r.pop().expect("nonempty");
        for c in r.iter_mut() {
            *c *= lc;
        }
        for (i, bc) in b[..db].iter().enumerate() {
            r[i + shift] -= &lr * bc;
        }
        r = trim(r);
        steps += 1;
    }
    if steps < total && !r.is_empty() {
        let f = lc.pow(total - steps);
        for c in r.iter_mut() {
            *c *= &f;
        }
    }
    r
}

/// Sturm chain by the subresultant remainder sequence. Each subresultant is
/// a nonzero multiple of the classical Sturm element; the sign of that
/// multiple is tracked and applied.
fn remainder_chain(p: IntPoly) -> Vec<IntPoly> {
    let dp = derivative(&p);
    let mut chain = vec![p.clone()];
    if dp.is_empty() {
        return chain;
    }
    let mut a = p;
    let mut b = primitive(dp);
    chain.push(b.clone());
    let (mut sa, mut sb) = (1i32, 1i32);
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            break;
        }
        let beta = &g * h.pow(delta);
        let lcb = b.last().expect("nonzero").clone();
        let lc_sign = if lcb.is_negative() && (delta + 1) % 2 == 1 { -1 } else { 1 };
        let beta_sign = if beta.is_negative() { -1 } else { 1 };
        let sr = -lc_sign * sa * beta_sign;
        let r: IntPoly = r.into_iter().map(|c| c / &beta).collect();
        chain.push(if sr > 0 { r.clone() } else { r.iter().map(|c| -c).collect() });
        g = lcb;
        h = if delta == 1 { g.clone() } else { g.pow(delta) / h.pow(delta - 1) };
        a = std::mem::replace(&mut b, r);
        sa = sb;
        sb = sr;
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPoly {
        c.iter().map(|&v| BigInt::from(v)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn counts_simple_roots() {
        // x^2 - 1
        let s = SturmChain::new(&ip(&[-1, 0, 1]));
        assert!(!s.reduced);
        assert_eq!(s.count_half_open(None, None), 2);
        assert_eq!(s.count_half_open(Some(&q(0, 1)), Some(&q(2, 1))), 1);
        assert_eq!(s.count_half_open(Some(&q(-1, 1)), Some(&q(1, 1))), 1);
    }

    #[test]
    fn square_free_reduction() {
        // (2x - 1)^2 (x + 2) = 4x^3 + 4x^2 - 7x + 2
        let s = SturmChain::new(&ip(&[2, -7, 4, 4]));
        assert!(s.reduced);
        assert_eq!(s.count_half_open(None, None), 2);
        assert_eq!(s.count_half_open(Some(&q(0, 1)), Some(&q(1, 1))), 1);
    }

    #[test]
    fn pseudo_division_identity() {
        let a = ip(&[1, 2, 3, 4]);
        let b = ip(&[1, 0, 2]);
        let (qq, r, s) = pseudo_divide(&a, &b);
        // lc(b)^s a = q b + r
        let lc = BigInt::from(2).pow(s);
        let lhs: IntPoly = a.iter().map(|c| c * &lc).collect();
        let mut rhs = vec![BigInt::zero(); 4];
        for (i, qc) in qq.iter().enumerate() {
            for (j, bc) in b.iter().enumerate() {
                rhs[i + j] += qc * bc;
            }
        }
        for (i, rc) in r.iter().enumerate() {
            rhs[i] += rc;
        }
        assert_eq!(trim(lhs), trim(rhs));
    }

    #[test]
    fn negative_leading_coefficients() {
        // -(x - 1)(x - 2)(x - 3) = -x^3 + 6x^2 - 11x + 6
        let s = SturmChain::new(&ip(&[6, -11, 6, -1]));
        assert_eq!(s.count_half_open(None, None), 3);
        assert_eq!(s.count_half_open(Some(&q(3, 2)), Some(&q(3, 1))), 2);
    }
}
