//! Jensen's bound on the number of zeros in a disk.
//!
//! For `f` analytic on a neighbourhood of `B(z, R)` with `f(z) != 0`,
//! `N_f(B(z, r)) <= log(sup_{B(z,R)} |f| / |f(z)|) / log(R / r)`.
//! The supremum is bounded from enclosures of `|f|` on a grid of the circle
//! `|w - z| = R` plus a Lipschitz padding for the arcs between grid points.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Enclosure `[lo, hi]` of a modulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

/// Default number of grid points on the outer circle.
pub const DEFAULT_GRID: usize = 4096;

/// Upper bound on the number of zeros of `f` in `B(z, r)`.
///
/// `modulus(w)` must enclose `|f(w)|`, and `lipschitz` must bound `|f'|`
/// on the circle `|w - z| = big_r`.
pub fn jensen_bound<F>(modulus: F, lipschitz: f64, z: Complex64, r: f64, big_r: f64, grid: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Enclosure,
{
    if !(r > 0.0 && r < big_r && big_r.is_finite()) {
        return Err(Error::Parameter(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    if grid < 3 {
        return Err(Error::Parameter("circle grid needs at least 3 points".into()));
    }
    let center = modulus(z);
    if !(center.lo > 0.0) {
        return Err(Error::JensenCenterZero);
    }
    let mut sup = 0.0f64;
    for j in 0..grid {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / grid as f64;
        let w = z + Complex64::from_polar(big_r, theta);
        sup = sup.max(modulus(w).hi);
    }
    // every circle point is within half a chord step (<= pi R / grid) of the grid
    let pad = lipschitz * std::f64::consts::PI * big_r / grid as f64;
    let sup = (sup + pad) * (1.0 + 1e-12);
    let ratio = (sup / center.lo).max(1.0);
    Ok(ratio.ln() / (big_r / r).ln())
}

/// Enclosure of `|p(w)|` by complex Horner evaluation with a rounding bound.
pub fn poly_modulus(coeffs: &[f64], w: Complex64) -> Enclosure {
    let mut v = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let aw = w.norm();
    for &c in coeffs.iter().rev() {
        v = v * w + c;
        abs_sum = abs_sum * aw + c.abs();
    }
    let n = coeffs.len() as f64;
    // complex multiply-add costs a handful of roundings per step
    let u = f64::EPSILON;
    let err = (8.0 * (n + 2.0) * u) * abs_sum * (1.0 + 1e-6);
    let m = v.norm();
    Enclosure {
        lo: ((m - err) * (1.0 - 4.0 * u)).max(0.0),
        hi: (m + err) * (1.0 + 4.0 * u),
    }
}

/// Jensen bound for a polynomial, with the Lipschitz constant
/// `sum k |a_k| (|z| + R)^(k-1)`.
pub fn jensen_bound_poly(poly: &Polynomial, z: Complex64, r: f64, big_r: f64) -> Result<f64> {
    let coeffs = poly.f64_coefficients();
    if !poly.is_f64_exact() {
        return Err(Error::Parameter("Jensen bound needs binary64 coefficients".into()));
    }
    let rho = z.norm() + big_r;
    let lipschitz = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c.abs() * rho.powi(k as i32 - 1))
        .sum::<f64>()
        * (1.0 + 1e-9);
    jensen_bound(|w| poly_modulus(&coeffs, w), lipschitz, z, r, big_r, DEFAULT_GRID)
}
