use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poles::lattice_pole_lines;
use super::{classify_lattice, dirichlet_poly, lower_dim_bound, RatioProfile, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Sampled evidence that `ζ_Φ` is bounded on the vertical line `Re s = σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenBound {
    pub sigma: f64,
    pub t_max: f64,
    pub sup_zeta: f64,
    pub min_p: f64,
}

/// Samples `ζ_Φ(σ + iτ)` at `n_samples` equispaced `τ ∈ [−T, T]`. For lattice
/// systems `σ` must stay `10⁻⁶` away from every pole line.
pub fn screen_bound(profile: &RatioProfile, sigma: f64, t_max: f64, n_samples: usize) -> Result<ScreenBound> {
    if n_samples < 2 || !(t_max > 0.0) {
        return Err(Error::InvalidParameter("need T > 0 and at least two samples".into()));
    }
    let class = classify_lattice(profile, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL);
    if class.is_lattice() {
        if let Some(line) = lattice_pole_lines(profile, &class)?
            .into_iter()
            .find(|re| (re - sigma).abs() < 1e-6)
        {
            return Err(Error::Precondition(format!(
                "σ = {sigma} lies on the pole line Re s = {line}"
            )));
        }
    }
    let mut min_p = f64::INFINITY;
    for i in 0..n_samples {
        let tau = -t_max + 2.0 * t_max * i as f64 / (n_samples - 1) as f64;
        min_p = min_p.min(dirichlet_poly(profile, Complex64::new(sigma, tau)).norm());
    }
    Ok(ScreenBound {
        sigma,
        t_max,
        sup_zeta: 1.0 / min_p,
        min_p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    LowerDim,
    Lattice,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub sigma0: f64,
    pub criterion: Criterion,
    pub admissible_screen: Option<f64>,
    /// Lower similarity-dimension bound `D_ℓ` (a bound, not the infimum of pole real parts).
    pub lower_dim_bound: f64,
    pub notes: String,
}

/// Decides which sufficient condition makes a remainder with growth
/// `O(t^{−σ0})` admissible. The lattice test runs first; otherwise the
/// strict inequality `σ0 < D_ℓ` is required.
pub fn admissibility_report(profile: &RatioProfile, sigma0: f64) -> Result<AdmissibilityReport> {
    let dl = lower_dim_bound(profile);
    let class = classify_lattice(profile, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL);
    if class.is_lattice() {
        let lines = lattice_pole_lines(profile, &class)?;
        let gap = lines
            .iter()
            .map(|re| re - sigma0)
            .filter(|d| *d > 1e-12)
            .fold(f64::INFINITY, f64::min);
        let eps = if gap.is_finite() { gap / 2.0 } else { 0.5 };
        let mut notes = format!(
            "lattice with generator {:.12} and exponents {:?}; {} pole lines",
            class.generator.unwrap_or(f64::NAN),
            class.exponents,
            lines.len()
        );
        if sigma0 < dl {
            notes.push_str(&format!("; σ0 < D_ℓ = {dl:.6} also holds"));
        }
        return Ok(AdmissibilityReport {
            sigma0,
            criterion: Criterion::Lattice,
            admissible_screen: Some(sigma0 + eps),
            lower_dim_bound: dl,
            notes,
        });
    }
    if sigma0 < dl {
        return Ok(AdmissibilityReport {
            sigma0,
            criterion: Criterion::LowerDim,
            admissible_screen: Some(sigma0 + (dl - sigma0) / 2.0),
            lower_dim_bound: dl,
            notes: format!("σ0 < D_ℓ = {dl:.12}"),
        });
    }
    Ok(AdmissibilityReport {
        sigma0,
        criterion: Criterion::None,
        admissible_screen: None,
        lower_dim_bound: dl,
        notes: format!(
            "nonlattice up to denominator {} and σ0 ≥ D_ℓ = {dl:.3e}",
            class.max_denominator_checked
        ),
    })
}
