//! Counter-based uniform streams.
//!
//! Every uniform variate is addressed by `(seed, trial, coefficient index)`:
//! the seed keys a ChaCha8 block function, the trial selects the stream and
//! the coefficient index selects the word position. Draws therefore do not
//! depend on how trials are scheduled across workers, and the `k`-th uniform
//! of a trial is the same no matter which law it is pushed through.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Uniform stream for one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CouplingStream {
    pub seed: u64,
    /// Trial index; selects the ChaCha stream.
    pub index: u64,
}

impl CouplingStream {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    /// Iterator over `U_0, U_1, ...` for this trial.
    pub fn uniforms(&self) -> Uniforms {
        self.uniforms_from(0)
    }

    /// Iterator starting at coefficient index `start`.
    pub fn uniforms_from(&self, start: u64) -> Uniforms {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        // one u64 per uniform = two 32-bit words
        rng.set_word_pos(u128::from(start) * 2);
        Uniforms { rng }
    }

    /// The `k`-th uniform of this trial, by random access.
    pub fn uniform_at(&self, k: u64) -> f64 {
        self.uniforms_from(k).next_uniform()
    }

    /// Fills `out` with `U_0, ..., U_{len-1}`.
    pub fn fill_uniforms(&self, out: &mut [f64]) {
        let mut it = self.uniforms();
        for u in out.iter_mut() {
            *u = it.next_uniform();
        }
    }
}

/// Endless sequence of uniforms in the open interval (0, 1).
pub struct Uniforms {
    rng: ChaCha8Rng,
}

impl Uniforms {
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        bits_to_open_unit(self.rng.next_u64())
    }
}

impl Iterator for Uniforms {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(self.next_uniform())
    }
}

/// Maps 52 random bits to `(j + 1/2) 2^-52`, which is exact in binary64 and
/// never equals 0 or 1.
#[inline]
pub fn bits_to_open_unit(bits: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    // the shifted value fits in i64, whose conversion is a single instruction
    ((bits >> 12) as i64 as f64 + 0.5) * SCALE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let s = CouplingStream::new(42, 7);
        let seq: Vec<f64> = s.uniforms().take(100).collect();
        for (k, u) in seq.iter().enumerate() {
            assert_eq!(*u, s.uniform_at(k as u64));
        }
    }

    #[test]
    fn streams_differ_by_trial_and_seed() {
        let a: Vec<f64> = CouplingStream::new(1, 0).uniforms().take(8).collect();
        let b: Vec<f64> = CouplingStream::new(1, 1).uniforms().take(8).collect();
        let c: Vec<f64> = CouplingStream::new(2, 0).uniforms().take(8).collect();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn open_unit_bounds() {
        assert!(bits_to_open_unit(0) > 0.0);
        assert!(bits_to_open_unit(u64::MAX) < 1.0);
        assert_eq!(bits_to_open_unit(1u64 << 63), 0.5 + 0.5 / (1u64 << 52) as f64);
    }

    #[test]
    fn uniform_mean_is_one_half() {
        let n = 200_000;
        let s: f64 = CouplingStream::new(9, 3).uniforms().take(n).sum();
        let mean = s / n as f64;
        // sd of the mean is sqrt(1/12 / n)
        assert!((mean - 0.5).abs() < 5.0 * (1.0 / 12.0 / n as f64).sqrt());
    }
}
