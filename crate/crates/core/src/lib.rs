//! Complex dimensions of self-similar fractals and the heat content of
//! generalized von Koch snowflake domains.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`geometry`]: similitudes, generalized von Koch prefractals, rasterization;
//! * [`zeta`]: scaling zeta functions, similarity dimensions, pole location;
//! * [`mellin`]: truncated Mellin transforms and scaling functional equations;
//! * [`heat`]: finite-difference and Monte Carlo heat content;
//! * [`tube`]: tube functions and Minkowski-dimension fits;
//! * [`expansion`]: heat zeta functions, residues and explicit formulae.

pub mod error;
pub mod expansion;
pub mod geometry;
pub mod heat;
pub mod mellin;
pub mod series;
pub mod tube;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use series::TimeSeries;
