use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {what} needs {required}, budget is {budget}")]
    Resource {
        what: String,
        required: u64,
        budget: u64,
    },

    #[error("polyline self-intersects: edge {first} crosses edge {second}")]
    SelfIntersection { first: usize, second: usize },

    #[error("polyline is not closed")]
    OpenPolyline,

    #[error("grid interior is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("evaluation point {s} is at a pole (|P(s)| = {modulus:e})")]
    AtPole { s: Complex64, modulus: f64 },

    #[error("Mellin integral diverges: Re(s) = {re} must exceed {abscissa}")]
    Divergent { re: f64, abscissa: f64 },

    #[error("sampling too coarse: {per_decade:.1} samples per decade, need {required}")]
    Resolution { per_decade: f64, required: usize },

    #[error("t = {requested:e} is outside the covered range [{min:e}, {max:e}]")]
    Coverage { requested: f64, min: f64, max: f64 },

    #[error("conjugate gradient did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("pole {omega} is not simple (multiplicity {multiplicity})")]
    NonSimplePole { omega: Complex64, multiplicity: usize },

    #[error("pole {omega} has no conjugate partner in the truncated set")]
    UnmatchedConjugate { omega: Complex64 },

    #[error("analytic continuation unavailable: Re(s) = {re} is not right of {abscissa} + margin")]
    Continuation { re: f64, abscissa: f64 },

    #[error("word expansion needs {words:e} words, limit is {limit:e}")]
    DepthExceeded { words: f64, limit: f64 },

    #[error("fit window too short: {0}")]
    Window(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
