//! Heat zeta functions, residues at complex dimensions, truncated explicit
//! formulae and log-periodic fits of measured heat content.

mod fit;
mod formula;
mod heat_zeta;

pub use fit::{logperiodic_fit, ExpansionFit, Harmonic};
pub use formula::{
    antiderivative, explicit_formula_complex, explicit_formula_eval, explicit_formula_series, pochhammer, REALITY_TOL,
};
pub use heat_zeta::{
    heat_coefficients, heat_residue, heat_residue_contour, heat_zeta_direct, heat_zeta_eval, CoefficientSource,
    HeatCoefficient, HeatZeta, CONTOUR_NODES, CONTOUR_RADIUS,
};

/// Default symmetric truncation: three lattice periods `2π/ln(1/λ)` in `Im ω`.
pub fn default_truncation(lambda0: f64) -> f64 {
    3.0 * std::f64::consts::TAU / (1.0 / lambda0).ln()
}
