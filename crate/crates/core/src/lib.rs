//! Real-root statistics of random Kac polynomials.
//!
//! A Kac polynomial is `P_n(x) = sum_{k=0}^n xi_k x^k` with independent
//! coefficients drawn from a mean-zero, unit-variance law. This crate
//! provides:
//!
//! - [`distributions`]: coefficient laws, quantile sampling and the
//!   counter-based uniform stream that couples draws across laws;
//! - [`rootcount`]: certified real-root counting (exact Sturm sequences and
//!   interval bisection with precision escalation), the Jensen zero bound
//!   and the negation/reciprocal transforms;
//! - [`gauss`]: the Gaussian Kac-Rice (Edelman-Kostlan) density, adaptive
//!   quadrature of expected root counts and the Gaussian constants;
//! - [`montecarlo`]: Monte Carlo estimators of expected counts and of the
//!   non-universal constant, including the truncated power-series estimator
//!   and coupled continuity experiments.

pub mod distributions;
pub mod error;
pub mod gauss;
pub mod interval;
pub mod montecarlo;
pub mod poly;
pub mod quadrature;
pub mod rng;
pub mod rootcount;

pub use distributions::{CoefficientLaw, LawKind};
pub use error::{Error, Result};
pub use interval::IntervalSpec;
pub use poly::Polynomial;
pub use rng::CouplingStream;
pub use rootcount::{CertifiedCount, CountMethod};
