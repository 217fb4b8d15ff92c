//! Multi-precision ball arithmetic for the escalation tiers of bisection.
//!
//! A [`Ball`] is a dyadic midpoint `m 2^e` rounded to a working precision
//! together with a radius that bounds every rounding error committed so
//! far. Radii are [`Mag`] values: upper bounds with an unbounded exponent
//! range, so nothing underflows at thousands of bits.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::poly::f64_to_dyadic;

/// Exact binary rational `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        let (m, e) = f64_to_dyadic(x);
        Self {
            mant: BigInt::from(m),
            exp: i64::from(e),
        }
    }

    pub fn from_int(v: BigInt) -> Self {
        Self { mant: v, exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::NoSign => 0,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Dyadic { mant: a + b, exp: e }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    /// `self * 2^k`.
    pub fn scale(&self, k: i64) -> Dyadic {
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Midpoint of `self` and `other`, exactly.
    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        self.add(other).scale(-1)
    }

    /// Rounds to at most `prec` significant bits and returns a bound on the
    /// rounding error.
    pub fn round(&mut self, prec: u32) -> Mag {
        let bits = self.mant.bits();
        if bits <= u64::from(prec) {
            return Mag::ZERO;
        }
        let shift = bits - u64::from(prec);
        self.mant = &self.mant >> shift;
        self.exp += shift as i64;
        Mag::pow2(self.exp)
    }

    /// Upper bound on `|self|`.
    pub fn mag_upper(&self) -> Mag {
        self.mag_bound(true)
    }

    /// Lower bound on `|self|`.
    pub fn mag_lower(&self) -> Mag {
        self.mag_bound(false)
    }

    fn mag_bound(&self, upper: bool) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        let a = self.mant.abs();
        let bits = a.bits();
        if bits <= 53 {
            return Mag::from_f64(a.to_f64().unwrap_or(0.0), self.exp);
        }
        let shift = bits - 53;
        let top = (&a >> shift).to_f64().unwrap_or(0.0);
        let top = if upper { top + 1.0 } else { top };
        Mag::from_f64(top, self.exp + shift as i64)
    }

    /// Nearest-ish binary64 value (for diagnostics and tier hand-off).
    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            ((&self.mant >> s).to_f64().unwrap_or(0.0), self.exp + s as i64)
        } else {
            (self.mant.to_f64().unwrap_or(0.0), self.exp)
        };
        m * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    pub fn to_rational(&self) -> num_rational::BigRational {
        use num_rational::BigRational;
        let one = BigInt::from(1);
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), one << (-self.exp) as usize)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.sub(other).signum().cmp(&0))
    }
}

/// Nonnegative upper bound `m 2^e` with `m` in `[1, 2)` (or zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mag {
    m: f64,
    e: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { m: 0.0, e: 0 };

    pub fn pow2(e: i64) -> Mag {
        Mag { m: 1.0, e }
    }

    /// `x 2^e` for a nonnegative finite `x`, normalized exactly.
    pub fn from_f64(x: f64, e: i64) -> Mag {
        debug_assert!(x >= 0.0 && x.is_finite());
        if x == 0.0 {
            return Mag::ZERO;
        }
        let bits = x.to_bits();
        let field = ((bits >> 52) & 0x7ff) as i64;
        if field == 0 {
            // subnormal: scale up exactly first
            return Mag::from_f64(x * 2f64.powi(64), e - 64);
        }
        let k = field - 1023;
        let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
        Mag { m, e: e + k }
    }

    /// Upper bound for a nonnegative double.
    pub fn from_f64_up(x: f64) -> Mag {
        Mag::from_f64(x, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    pub fn add(self, other: Mag) -> Mag {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.e >= other.e { (self, other) } else { (other, self) };
        let d = big.e - small.e;
        let s = if d > 60 {
            // below half an ulp of `big.m`: absorbed by rounding up
            f64::EPSILON
        } else {
            small.m * 2f64.powi(-(d as i32))
        };
        Mag::from_f64((big.m + s).next_up(), big.e)
    }

    pub fn mul(self, other: Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        Mag::from_f64((self.m * other.m).next_up(), self.e + other.e)
    }

    pub fn mul_f64(self, x: f64) -> Mag {
        self.mul(Mag::from_f64_up(x))
    }

    pub fn powi(self, k: u32) -> Mag {
        let mut acc = Mag::from_f64(1.0, 0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `log2` of the bound, `-inf` for zero.
    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.m.log2() + self.e as f64
        }
    }

    /// Value as a double, saturating.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.m * 2f64.powi(self.e.clamp(-1100, 1100) as i32)
        }
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            _ => Some(self.e.cmp(&other.e).then(self.m.total_cmp(&other.m))),
        }
    }
}

/// Midpoint-radius enclosure of a real number.
#[derive(Clone, Debug)]
pub struct Ball {
    pub mid: Dyadic,
    pub rad: Mag,
}

impl Ball {
    pub fn zero() -> Self {
        Ball {
            mid: Dyadic::zero(),
            rad: Mag::ZERO,
        }
    }

    /// Sign of every point of the ball, or 0 when it contains zero.
    pub fn sign(&self) -> i32 {
        if self.mid.mag_lower() > self.rad {
            self.mid.signum()
        } else {
            0
        }
    }

    /// `self * x + a` for an exact point `x` and exact addend `a`, rounded
    /// to `prec` bits.
    pub fn mul_add(&self, x: &Dyadic, x_abs: Mag, a: &Dyadic, prec: u32) -> Ball {
        let mut mid = self.mid.mul(x).add(a);
        let err = mid.round(prec);
        Ball {
            mid,
            rad: self.rad.mul(x_abs).add(err),
        }
    }

    /// `self * x + other` with a ball addend.
    pub fn mul_add_ball(&self, x: &Dyadic, x_abs: Mag, other: &Ball, prec: u32) -> Ball {
        let mut b = self.mul_add(x, x_abs, &other.mid, prec);
        b.rad = b.rad.add(other.rad);
        b
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid.mag_upper().add(self.rad)
    }
}

/// Taylor coefficients `p^(j)(x)/j!`, `j = 0..4`, of an integer polynomial at
/// an exact point, in `prec`-bit ball arithmetic.
pub fn taylor4(coeffs: &[BigInt], x: &Dyadic, prec: u32) -> [Ball; 4] {
    let x_abs = x.mag_upper();
    let mut c = [Ball::zero(), Ball::zero(), Ball::zero(), Ball::zero()];
    for a in coeffs.iter().rev() {
        c[3] = c[3].mul_add_ball(x, x_abs, &c[2], prec);
        c[2] = c[2].mul_add_ball(x, x_abs, &c[1], prec);
        c[1] = c[1].mul_add_ball(x, x_abs, &c[0], prec);
        c[0] = c[0].mul_add(x, x_abs, &Dyadic::from_int(a.clone()), prec);
    }
    c
}

/// Value of an integer polynomial at an exact point, in ball arithmetic.
pub fn eval_ball(coeffs: &[BigInt], x: &Dyadic, prec: u32) -> Ball {
    let x_abs = x.mag_upper();
    let mut c = Ball::zero();
    for a in coeffs.iter().rev() {
        c = c.mul_add(x, x_abs, &Dyadic::from_int(a.clone()), prec);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mag_arithmetic_bounds() {
        let a = Mag::from_f64_up(3.0);
        let b = Mag::from_f64_up(0.25);
        assert!(a.add(b).to_f64() >= 3.25);
        assert!(a.mul(b).to_f64() >= 0.75);
        let tiny = Mag::pow2(-5000);
        assert!(tiny > Mag::ZERO);
        assert!(tiny.powi(4).log2() >= -20000.0 - 1e-9);
        assert!(a.add(tiny) > a);
        assert!(Mag::pow2(3) > Mag::from_f64_up(7.9));
    }

    #[test]
    fn dyadic_rounding_error_is_bounded() {
        let mut d = Dyadic::from_int(BigInt::from(0b1011_0111u32));
        let exact = d.to_rational();
        let err = d.round(3);
        let diff = (exact - d.to_rational()).abs();
        assert!(diff.to_f64().unwrap() <= err.to_f64());
        assert!(d.mant.bits() <= 3);
    }

    #[test]
    fn ball_evaluation_encloses_exact_value() {
        // (x - 1/3)(x + 2) scaled: 3x^2 + 5x - 2
        let coeffs: Vec<BigInt> = [-2, 5, 3].iter().map(|&c| BigInt::from(c)).collect();
        let x = Dyadic::from_f64(0.1);
        for prec in [8, 53, 128] {
            let b = eval_ball(&coeffs, &x, prec);
            let xr = x.to_rational();
            let exact = &xr * &xr * num_rational::BigRational::from_integer(3.into())
                + &xr * num_rational::BigRational::from_integer(5.into())
                - num_rational::BigRational::from_integer(2.into());
            let diff = (exact - b.mid.to_rational()).abs().to_f64().unwrap();
            assert!(diff <= b.rad.to_f64(), "prec {prec}: {diff} > {}", b.rad.to_f64());
        }
        let t = taylor4(&coeffs, &Dyadic::from_f64(0.5), 64);
        // p'(1/2) = 6 * 1/2 + 5 = 8, p''/2 = 3
        assert_eq!(t[1].mid.to_f64(), 8.0);
        assert_eq!(t[2].mid.to_f64(), 3.0);
        assert_eq!(t[3].mid.to_f64(), 0.0);
    }
}
