use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SelfSimilarSystem;

/// `|P(s)|` below this counts as sitting on a pole of `ζ_Φ`.
pub const POLE_TOL: f64 = 1e-14;

/// Distinct scaling ratios `r_1 > … > r_M` with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct RatioProfile {
    ratios: Vec<f64>,
    multiplicities: Vec<u32>,
    logs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    ratios: Vec<f64>,
    multiplicities: Vec<u32>,
}

impl TryFrom<ProfileRepr> for RatioProfile {
    type Error = Error;
    fn try_from(r: ProfileRepr) -> Result<Self> {
        if r.ratios.len() != r.multiplicities.len() {
            return Err(Error::Parse("ratios and multiplicities differ in length".into()));
        }
        Self::new(r.ratios.into_iter().zip(r.multiplicities).collect())
    }
}

impl From<RatioProfile> for ProfileRepr {
    fn from(p: RatioProfile) -> Self {
        Self {
            ratios: p.ratios,
            multiplicities: p.multiplicities,
        }
    }
}

impl RatioProfile {
    /// Accepts `(ratio, multiplicity)` pairs in any order; equal ratios are merged.
    pub fn new(mut pairs: Vec<(f64, u32)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("profile needs at least one ratio".into()));
        }
        for &(r, m) in &pairs {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidParameter(format!("ratio {r} not in (0, 1)")));
            }
            if m == 0 {
                return Err(Error::InvalidParameter("multiplicities must be ≥ 1".into()));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut ratios: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<u32> = Vec::new();
        for (r, m) in pairs {
            match ratios.last() {
                Some(&last) if (last - r).abs() <= 1e-12 * last => {
                    *multiplicities.last_mut().unwrap() += m;
                }
                _ => {
                    ratios.push(r);
                    multiplicities.push(m);
                }
            }
        }
        let logs = ratios.iter().map(|r| r.ln()).collect();
        Ok(Self {
            ratios,
            multiplicities,
            logs,
        })
    }

    pub fn from_system(system: &SelfSimilarSystem) -> Result<Self> {
        Self::new(system.distinct_ratios())
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, u32)> + '_ {
        self.ratios.iter().copied().zip(self.multiplicities.iter().copied())
    }

    pub(crate) fn log_ratios(&self) -> &[f64] {
        &self.logs
    }

    /// `Σ m_k r_k^σ` on the real line.
    pub fn power_sum(&self, sigma: f64) -> f64 {
        self.logs
            .iter()
            .zip(&self.multiplicities)
            .map(|(l, &m)| m as f64 * (sigma * l).exp())
            .sum()
    }

    /// Magnitude of the terms of `P` at `s`; the floating-point error of
    /// [`dirichlet_poly`] scales with this.
    pub(crate) fn scale_at(&self, s: Complex64) -> f64 {
        1.0 + self.power_sum(s.re)
    }
}

/// `P(s) = 1 − Σ m_k r_k^s`.
pub fn dirichlet_poly(profile: &RatioProfile, s: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (l, &m) in profile.logs.iter().zip(&profile.multiplicities) {
        acc -= m as f64 * (s * l).exp();
    }
    acc
}

/// `P′(s) = Σ m_k r_k^s ln(1/r_k)`.
pub fn derivative(profile: &RatioProfile, s: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (l, &m) in profile.logs.iter().zip(&profile.multiplicities) {
        acc -= m as f64 * l * (s * l).exp();
    }
    acc
}

pub fn scaling_zeta(profile: &RatioProfile, s: Complex64) -> Result<Complex64> {
    let p = dirichlet_poly(profile, s);
    if p.norm() < POLE_TOL {
        return Err(Error::AtPole {
            s,
            modulus: p.norm(),
        });
    }
    Ok(p.inv())
}

/// Bisection for the root of an increasing function on a bracket that is
/// grown geometrically from `[lo, hi]`.
fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    while f(lo) > 0.0 {
        let w = hi - lo;
        hi = lo;
        lo -= 2.0 * w;
    }
    while f(hi) < 0.0 {
        let w = hi - lo;
        lo = hi;
        hi += 2.0 * w;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Unique real `D` with `Σ m_k r_k^D = 1`.
pub fn moran_dimension(profile: &RatioProfile) -> f64 {
    // D ↦ 1 − Σ m_k r_k^D is increasing; the root lies in [0, ∞).
    bisect_increasing(|d| 1.0 - profile.power_sum(d), 0.0, 1.0)
}

/// Lower similarity-dimension bound `D_ℓ`: the real root of
/// `1 + Σ_{k<M} m_k r_k^t = m_M r_M^t`, written in increasing form.
pub fn lower_dim_bound(profile: &RatioProfile) -> f64 {
    let m = profile.len() - 1;
    let (lm, mm) = (profile.logs[m], profile.multiplicities[m] as f64);
    let p = |t: f64| {
        let mut acc = (-t * lm).exp() / mm;
        for k in 0..m {
            acc += profile.multiplicities[k] as f64 / mm * (t * (profile.logs[k] - lm)).exp();
        }
        acc - 1.0
    };
    bisect_increasing(p, -1.0, 1.0)
}
