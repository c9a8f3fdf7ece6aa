//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension too small: need N >= 2m+3, got N={n}, m={m}")]
    DimensionTooSmall { n: u32, m: u32 },

    #[error("flatness order l={l} outside admissible window ({lo}, {hi}]")]
    FlatnessOutOfRange { l: f64, lo: f64, hi: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("kernel index {index} out of range 1..={max}")]
    BadIndex { index: usize, max: usize },

    #[error("index {index} out of range {min}..={max}")]
    IndexOutOfRange {
        index: usize,
        min: usize,
        max: usize,
    },

    #[error("grid too coarse: {nodes} interior nodes, need at least {min}")]
    GridTooCoarse { nodes: usize, min: usize },

    #[error("quadrature failed: estimated error {err} above target {target}")]
    QuadratureFailure { err: f64, target: f64 },

    #[error("degenerate height h={h}: cross-ring asymptotic law undefined")]
    DegenerateHeight { h: f64 },

    #[error("moment |y1|^{power} not integrable against the bubble")]
    NonIntegrable { power: f64 },

    #[error("degenerate exponent: l = N-2m makes {what} undefined")]
    DegenerateExponent { what: &'static str },

    #[error("flat curvature profile (c0 = 0): {what} undefined")]
    DegenerateFlat { what: &'static str },

    #[error("sampler degenerate: stderr {stderr} exceeds {limit} of |estimate| {estimate}")]
    SamplerDegenerate {
        stderr: f64,
        estimate: f64,
        limit: f64,
    },

    #[error("insufficient scan range: {got} values of k, need at least {min}")]
    InsufficientRange { got: usize, min: usize },

    #[error("empty evaluation grid")]
    EmptyGrid,

    #[error("bad flow start: {reason}")]
    BadStart { reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
