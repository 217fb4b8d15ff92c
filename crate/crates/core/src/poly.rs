//! Polynomials in exact-rational or binary64 representation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Exact,
    Floating,
}

/// Coefficient storage, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Exact(Vec<BigRational>),
    Floating(Vec<f64>),
}

/// `sum_k a_k x^k` over a fixed number of coefficient slots.
///
/// The slot count is kept even when the top coefficients vanish, because
/// the reciprocal transform reverses the full slot vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Coefficients,
}

/// Order of the root at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroMultiplicity {
    /// Index of the first nonzero coefficient, or `slots - 1` when every
    /// coefficient vanishes.
    pub tau: usize,
    /// Set for the all-zero polynomial.
    pub degenerate: bool,
}

/// Splits a finite double into `m 2^e` with `m` odd or zero.
pub fn f64_to_dyadic(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if exp_field == 0 {
        (frac as i64, -1074)
    } else {
        ((frac | (1u64 << 52)) as i64, exp_field - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    (sign * m, e)
}

impl Polynomial {
    pub fn from_rationals(coeffs: Vec<BigRational>) -> Self {
        Self {
            coeffs: Coefficients::Exact(coeffs),
        }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_rationals(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// Floating coefficients; non-finite values are rejected.
    pub fn from_f64(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Parameter(format!("non-finite coefficient {bad}")));
        }
        Ok(Self {
            coeffs: Coefficients::Floating(coeffs),
        })
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn representation(&self) -> Representation {
        match self.coeffs {
            Coefficients::Exact(_) => Representation::Exact,
            Coefficients::Floating(_) => Representation::Floating,
        }
    }

    /// Number of coefficient slots (`n + 1` for a degree-`n` model).
    pub fn slots(&self) -> usize {
        match &self.coeffs {
            Coefficients::Exact(v) => v.len(),
            Coefficients::Floating(v) => v.len(),
        }
    }

    fn is_zero_at(&self, k: usize) -> bool {
        match &self.coeffs {
            Coefficients::Exact(v) => v[k].is_zero(),
            Coefficients::Floating(v) => v[k] == 0.0,
        }
    }

    /// Index of the last nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        (0..self.slots()).rev().find(|&k| !self.is_zero_at(k))
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// The order `tau` of the root at 0.
    pub fn multiplicity_at_zero(&self) -> ZeroMultiplicity {
        match (0..self.slots()).find(|&k| !self.is_zero_at(k)) {
            Some(tau) => ZeroMultiplicity { tau, degenerate: false },
            None => ZeroMultiplicity {
                tau: self.slots().saturating_sub(1),
                degenerate: true,
            },
        }
    }

    /// Exact copy; floating coefficients become the binary rationals they
    /// denote.
    pub fn to_exact(&self) -> Polynomial {
        Polynomial::from_rationals(self.exact_coefficients())
    }

    pub fn exact_coefficients(&self) -> Vec<BigRational> {
        match &self.coeffs {
            Coefficients::Exact(v) => v.clone(),
            Coefficients::Floating(v) => v
                .iter()
                .map(|&c| BigRational::from_float(c).expect("finite coefficient"))
                .collect(),
        }
    }

    /// Coefficients rounded to nearest binary64.
    pub fn f64_coefficients(&self) -> Vec<f64> {
        match &self.coeffs {
            Coefficients::Exact(v) => v.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
            Coefficients::Floating(v) => v.clone(),
        }
    }

    /// True when every coefficient is exactly a binary64 value.
    pub fn is_f64_exact(&self) -> bool {
        match &self.coeffs {
            Coefficients::Floating(_) => true,
            Coefficients::Exact(v) => v.iter().all(|c| {
                c.to_f64()
                    .and_then(BigRational::from_float)
                    .is_some_and(|back| back == *c)
            }),
        }
    }

    /// Integer coefficients of a positive multiple of the polynomial.
    pub fn to_integer_coefficients(&self) -> Vec<BigInt> {
        match &self.coeffs {
            Coefficients::Exact(v) => {
                let lcm = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
                v.iter().map(|c| c.numer() * (&lcm / c.denom())).collect()
            }
            Coefficients::Floating(v) => {
                let parts: Vec<(i64, i32)> = v.iter().map(|&c| f64_to_dyadic(c)).collect();
                let emin = parts.iter().filter(|p| p.0 != 0).map(|p| p.1).min().unwrap_or(0);
                parts
                    .iter()
                    .map(|&(m, e)| BigInt::from(m) << (e - emin) as usize)
                    .collect()
            }
        }
    }

    /// `P(-x)`: coefficient `i` times `(-1)^i`.
    pub fn negate_argument(&self) -> Polynomial {
        let coeffs = match &self.coeffs {
            Coefficients::Exact(v) => Coefficients::Exact(
                v.iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                    .collect(),
            ),
            Coefficients::Floating(v) => Coefficients::Floating(
                v.iter()
                    .enumerate()
                    .map(|(i, &c)| if i % 2 == 1 { -c } else { c })
                    .collect(),
            ),
        };
        Polynomial { coeffs }
    }

    /// `x^(slots-1) P(1/x)`: the slot vector reversed.
    pub fn reverse_slots(&self) -> Polynomial {
        let coeffs = match &self.coeffs {
            Coefficients::Exact(v) => Coefficients::Exact(v.iter().rev().cloned().collect()),
            Coefficients::Floating(v) => Coefficients::Floating(v.iter().rev().copied().collect()),
        };
        Polynomial { coeffs }
    }

    /// Drops the lowest `k` slots, i.e. divides by `x^k`. The caller must
    /// know those coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Polynomial {
        let coeffs = match &self.coeffs {
            Coefficients::Exact(v) => Coefficients::Exact(v[k.min(v.len())..].to_vec()),
            Coefficients::Floating(v) => Coefficients::Floating(v[k.min(v.len())..].to_vec()),
        };
        Polynomial { coeffs }
    }

    /// Removes vanishing top slots.
    pub fn trimmed(&self) -> Polynomial {
        let len = self.degree().map_or(0, |d| d + 1);
        let coeffs = match &self.coeffs {
            Coefficients::Exact(v) => Coefficients::Exact(v[..len].to_vec()),
            Coefficients::Floating(v) => Coefficients::Floating(v[..len].to_vec()),
        };
        Polynomial { coeffs }
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let coeffs = self.exact_coefficients();
        coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Exact sign at a rational point.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let ints = self.to_integer_coefficients();
        sign_of_integer_poly_at(&ints, x)
    }

    /// Horner evaluation in binary64 (no error control).
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.f64_coefficients().iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Sign of `sum c_k x^k` at the rational `x = p/q`, via the homogenized
/// integer form `sum c_k p^k q^(d-k)` with `q > 0`.
pub fn sign_of_integer_poly_at(coeffs: &[BigInt], x: &BigRational) -> i32 {
    let p = x.numer();
    let q = x.denom();
    let mut acc = BigInt::zero();
    let mut qpow = BigInt::one();
    for c in coeffs.iter().rev() {
        acc = acc * p + c * &qpow;
        qpow *= q;
    }
    // acc = q^(len-1) * P(p/q) up to the positive factor; only sign matters
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn degree_and_zero_multiplicity() {
        let p = Polynomial::from_integers(&[0, 0, 1, 1]);
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.multiplicity_at_zero(), ZeroMultiplicity { tau: 2, degenerate: false });
        let q = Polynomial::from_integers(&[1, 0, 0]);
        assert_eq!(q.degree(), Some(0));
        assert_eq!(q.multiplicity_at_zero().tau, 0);
        let z = Polynomial::from_f64(vec![0.0; 6]).unwrap();
        assert_eq!(z.degree(), None);
        assert_eq!(z.multiplicity_at_zero(), ZeroMultiplicity { tau: 5, degenerate: true });
    }

    #[test]
    fn dyadic_split() {
        assert_eq!(f64_to_dyadic(0.75), (3, -2));
        assert_eq!(f64_to_dyadic(-8.0), (-1, 3));
        assert_eq!(f64_to_dyadic(f64::MIN_POSITIVE / 4.0), (1, -1024));
        let x = 0.1f64;
        let (m, e) = f64_to_dyadic(x);
        assert_eq!(m as f64 * 2f64.powi(e), x);
    }

    #[test]
    fn integer_image_is_positive_multiple() {
        let p = Polynomial::from_rationals(vec![rat(1, 2), rat(-1, 3), rat(2, 1)]);
        let ints = p.to_integer_coefficients();
        assert_eq!(ints, vec![BigInt::from(3), BigInt::from(-2), BigInt::from(12)]);
        let f = Polynomial::from_f64(vec![0.5, -0.25, 3.0]).unwrap();
        assert_eq!(
            f.to_integer_coefficients(),
            vec![BigInt::from(2), BigInt::from(-1), BigInt::from(12)]
        );
    }

    #[test]
    fn exact_sign_evaluation() {
        // (2x - 1)(x + 2) = 2x^2 + 3x - 2
        let p = Polynomial::from_integers(&[-2, 3, 2]);
        assert_eq!(p.sign_at(&rat(1, 2)), 0);
        assert_eq!(p.sign_at(&rat(1, 3)), -1);
        assert_eq!(p.sign_at(&rat(1, 1)), 1);
        assert_eq!(p.sign_at(&rat(-2, 1)), 0);
        assert_eq!(p.eval_exact(&rat(1, 1)), rat(3, 1));
    }

    #[test]
    fn transforms_on_coefficients() {
        let p = Polynomial::from_integers(&[1, 1, 1]);
        assert_eq!(p.negate_argument(), Polynomial::from_integers(&[1, -1, 1]));
        let q = Polynomial::from_integers(&[-2, 1]);
        assert_eq!(q.reverse_slots(), Polynomial::from_integers(&[1, -2]));
    }
}
