//! Argument negation and reciprocal transforms.
//!
//! Together they map every real root of `P` into `[0, 1]`: roots on
//! `[-b, -a]` become roots of `P(-x)` on `[a, b]`, and nonzero roots `x`
//! become roots `1/x` of the slot-reversed polynomial `x^n P(1/x)`.

use crate::poly::Polynomial;

/// `P(-x)`: coefficient `i` multiplied by `(-1)^i`.
pub fn transform_negate(poly: &Polynomial) -> Polynomial {
    poly.negate_argument()
}

/// `x^n P(1/x)` with `n + 1` the slot count: the coefficient vector reversed.
pub fn transform_reciprocal(poly: &Polynomial) -> Polynomial {
    poly.reverse_slots()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negate_is_an_involution() {
        let p = Polynomial::from_integers(&[-1, 1, 3, 0, 2]);
        assert_eq!(transform_negate(&transform_negate(&p)), p);
        // x - 1 becomes -x - 1, with root -1
        assert_eq!(transform_negate(&Polynomial::from_integers(&[-1, 1])), Polynomial::from_integers(&[-1, -1]));
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(
            transform_reciprocal(&Polynomial::from_integers(&[-2, 1])),
            Polynomial::from_integers(&[1, -2])
        );
        let pal = Polynomial::from_integers(&[1, 3, 1]);
        assert_eq!(transform_reciprocal(&pal), pal);
        let p = Polynomial::from_integers(&[2, 0, -1, 5]);
        assert_eq!(transform_reciprocal(&transform_reciprocal(&p)), p);
    }
}
