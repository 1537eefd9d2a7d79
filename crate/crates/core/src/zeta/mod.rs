//! Scaling zeta functions `ζ_Φ(s) = 1/P(s)` with `P(s) = 1 − Σ m_k r_k^s`,
//! similarity dimensions, lattice classification and pole location.

mod admissibility;
mod lattice;
mod poles;
mod profile;

pub use admissibility::{admissibility_report, screen_bound, AdmissibilityReport, Criterion, ScreenBound};
pub use lattice::{classify_lattice, LatticeClassification, LatticeKind, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL};
pub use poles::{
    argument_principle_count, argument_principle_poles, complex_dimensions, residue_check, ComplexDimensionSet, Pole, PoleMethod,
    SearchBox, Window,
};
pub use profile::{
    derivative, dirichlet_poly, lower_dim_bound, moran_dimension, scaling_zeta, RatioProfile, POLE_TOL,
};
