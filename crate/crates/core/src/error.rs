use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("moment invariant violated for law `{law}`: {moment} = {value:e} (expected {expected})")]
    Moment {
        law: String,
        moment: &'static str,
        value: f64,
        expected: String,
    },

    #[error("invalid distribution config: {0}")]
    Config(String),

    #[error("invalid interval `{input}`: {reason}")]
    IntervalParse { input: String, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unbounded interval {0}; map it to a bounded one with the reciprocal transform first")]
    Unbounded(String),

    #[error("Jensen bound unavailable: enclosure of |f(z)| contains zero")]
    JensenCenterZero,

    #[error("certification failure: {uncertified} of {trials} samples uncertified (limit {limit})")]
    Certification {
        uncertified: usize,
        trials: usize,
        limit: f64,
    },

    #[error("truncation instability: {unstable} of {trials} samples changed count when the series length was doubled")]
    TruncationInstability { unstable: usize, trials: usize },

    #[error("invalid schedule: {0}")]
    Schedule(String),
}
