use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{sfe_zeta_assemble, truncated_mellin, xi_entire, MellinSource, MellinValue, SampledFunction, CONTINUATION_MARGIN};
use crate::series::TimeSeries;
use crate::zeta::{derivative, dirichlet_poly, moran_dimension, ComplexDimensionSet, RatioProfile};
use crate::Complex64;

/// Relative pole proximity `|P/P′|` below which `ζ_Φ(2s)` is refused.
const POLE_GUARD: f64 = 1e-9;

/// Radius and node count of the contour cross-check.
pub const CONTOUR_RADIUS: f64 = 1e-3;
pub const CONTOUR_NODES: usize = 256;

/// `ζ̂(s; δ) = M^δ[t^{−1}E](s)` for a planar domain, with the data needed for
/// its factorization `ζ_Φ(2s)(ξ̂(s; δ) + ζ_R(s; δ))`.
pub struct HeatZeta {
    pub profile: RatioProfile,
    /// Normalized heat content `t^{−1}E(t)`.
    pub normalized: Box<dyn MellinSource>,
    /// Normalized remainder `t^{−1}R(t)`.
    pub remainder: Box<dyn MellinSource>,
    pub delta: f64,
}

impl HeatZeta {
    pub fn new(
        profile: RatioProfile,
        normalized: Box<dyn MellinSource>,
        remainder: Box<dyn MellinSource>,
        delta: f64,
    ) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!("δ must be positive, got {delta}")));
        }
        Ok(Self {
            profile,
            normalized,
            remainder,
            delta,
        })
    }

    /// From sampled heat content and remainder series (`E` and `R`, not yet
    /// divided by `t`). `sigma_r` is the growth order of `t^{−1}R`.
    pub fn from_series(profile: RatioProfile, energy: &TimeSeries, remainder: &TimeSeries, delta: f64, sigma_r: f64) -> Result<Self> {
        let d = moran_dimension(&profile);
        let g = SampledFunction::from_series(&energy.map_values(|t, e| e / t), d / 2.0)?.with_description("E(t)/t");
        let r = SampledFunction::from_series(&remainder.map_values(|t, r| r / t), sigma_r)?.with_description("R(t)/t");
        Self::new(profile, Box::new(g), Box::new(r), delta)
    }

    /// Growth order of `t^{−1}R`.
    pub fn sigma_r(&self) -> f64 {
        self.remainder.sigma0()
    }
}

/// Factorized evaluation `ζ_Φ(2s)(ξ̂(s) + ζ_R(s))`.
pub fn heat_zeta_eval(hz: &HeatZeta, s: Complex64) -> Result<MellinValue> {
    let two_s = 2.0 * s;
    let p = dirichlet_poly(&hz.profile, two_s);
    let dp = derivative(&hz.profile, two_s);
    if p.norm() <= POLE_GUARD * dp.norm().max(1.0) {
        return Err(Error::AtPole {
            s: two_s,
            modulus: p.norm(),
        });
    }
    sfe_zeta_assemble(&hz.profile, 2.0, hz.normalized.as_ref(), hz.remainder.as_ref(), hz.delta, s)
}

/// Direct transform `M^δ[t^{−1}E](s)`, valid to the right of the abscissa.
pub fn heat_zeta_direct(hz: &HeatZeta, s: Complex64) -> Result<MellinValue> {
    truncated_mellin(hz.normalized.as_ref(), 0.0, hz.delta, s)
}

/// Source of a heat-content coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientSource {
    Analytic,
    Fitted,
}

/// Coefficient `r_ω` of `t^{(N−ω)/2}` in the heat-content expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "CoefficientRecord", from = "CoefficientRecord")]
pub struct HeatCoefficient {
    pub omega: Complex64,
    pub value: Complex64,
    pub multiplicity: usize,
    pub source: CoefficientSource,
}

#[derive(Serialize, Deserialize)]
struct CoefficientRecord {
    re: f64,
    im: f64,
    res_re: f64,
    res_im: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    mult: usize,
    source: CoefficientSource,
}

fn one() -> usize {
    1
}

fn is_one(m: &usize) -> bool {
    *m == 1
}

impl From<HeatCoefficient> for CoefficientRecord {
    fn from(c: HeatCoefficient) -> Self {
        Self {
            re: c.omega.re,
            im: c.omega.im,
            res_re: c.value.re,
            res_im: c.value.im,
            mult: c.multiplicity,
            source: c.source,
        }
    }
}

impl From<CoefficientRecord> for HeatCoefficient {
    fn from(r: CoefficientRecord) -> Self {
        Self {
            omega: Complex64::new(r.re, r.im),
            value: Complex64::new(r.res_re, r.res_im),
            multiplicity: r.mult,
            source: r.source,
        }
    }
}

/// Coefficient of `t^{(2−ω)/2}` at a simple pole `ω` of `ζ_Φ`:
/// `r_ω = Res(ζ̂; ω/2) = (ξ̂(ω/2) + ζ_R(ω/2)) / (2 P′(ω))`.
pub fn heat_residue(hz: &HeatZeta, omega: Complex64) -> Result<Complex64> {
    let half = omega / 2.0;
    if half.re <= hz.sigma_r() + CONTINUATION_MARGIN {
        return Err(Error::Continuation {
            re: half.re,
            abscissa: hz.sigma_r(),
        });
    }
    let dp = derivative(&hz.profile, omega);
    if dp.norm() < 1e-8 {
        return Err(Error::NonSimplePole { omega, multiplicity: 2 });
    }
    let xi = xi_entire(&hz.profile, 2.0, hz.normalized.as_ref(), hz.delta, half)?;
    let zr = truncated_mellin(hz.remainder.as_ref(), 0.0, hz.delta, half)?;
    Ok((xi.value + zr.value) / (2.0 * dp))
}

/// `(1/2πi)∮ ζ̂(u) du` on a circle about `ω/2` (trapezoidal rule).
pub fn heat_residue_contour(hz: &HeatZeta, omega: Complex64, radius: f64, nodes: usize) -> Result<Complex64> {
    let center = omega / 2.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let e = Complex64::from_polar(1.0, TAU * j as f64 / nodes as f64);
        acc += heat_zeta_eval(hz, center + radius * e)?.value * radius * e;
    }
    Ok(acc / nodes as f64)
}

/// Analytic coefficients for every pole of `dims` whose half lies right of
/// the remainder abscissa.
pub fn heat_coefficients(hz: &HeatZeta, dims: &ComplexDimensionSet) -> Result<Vec<HeatCoefficient>> {
    dims.poles
        .iter()
        .filter(|p| p.omega.re / 2.0 > hz.sigma_r() + CONTINUATION_MARGIN)
        .map(|p| {
            if p.multiplicity > 1 {
                return Err(Error::NonSimplePole {
                    omega: p.omega,
                    multiplicity: p.multiplicity,
                });
            }
            Ok(HeatCoefficient {
                omega: p.omega,
                value: heat_residue(hz, p.omega)?,
                multiplicity: 1,
                source: CoefficientSource::Analytic,
            })
        })
        .collect()
}
