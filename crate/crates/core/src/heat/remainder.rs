use serde::{Deserialize, Serialize};

use super::HeatRun;
use crate::error::{Error, Result};
use crate::series::{fit_line, MonotoneLogInterp, TimeSeries};
use crate::zeta::RatioProfile;

/// `R(t) = E(t) − Σ m_k λ_k² E(t/λ_k²)` on every sample time whose scaled
/// copies stay inside the run's time range.
pub fn decomposition_remainder(profile: &RatioProfile, run: &HeatRun) -> Result<TimeSeries> {
    remainder_of(profile, &run.energy)
}

/// [`decomposition_remainder`] for a bare heat-content series.
pub fn remainder_of(profile: &RatioProfile, energy: &TimeSeries) -> Result<TimeSeries> {
    let interp = MonotoneLogInterp::new(energy);
    let r_min = profile
        .ratios()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let t_hi = energy.t_max() * r_min * r_min * (1.0 + 1e-12);
    let pairs: Vec<(f64, f64)> = energy
        .iter()
        .filter(|&(t, _)| t <= t_hi)
        .map(|(t, e)| {
            let copies: f64 = profile
                .pairs()
                .map(|(r, m)| m as f64 * r * r * interp.eval(t / (r * r)))
                .sum();
            (t, e - copies)
        })
        .collect();
    if pairs.is_empty() {
        return Err(Error::Coverage {
            requested: energy.t_min(),
            min: energy.t_min(),
            max: t_hi,
        });
    }
    let (t, v) = pairs.into_iter().unzip();
    TimeSeries::new(t, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub sign_changes: bool,
    /// Residual of the log-log line is log-periodic rather than noise-free.
    pub oscillating: bool,
    pub t_lo: f64,
    pub t_hi: f64,
}

/// Log-log fit of `|R|` over `[t_lo, t_hi]`, or over the whole series.
pub fn remainder_order_fit(r: &TimeSeries, window: Option<(f64, f64)>) -> Result<RemainderFit> {
    let (lo, hi) = window.unwrap_or((r.t_min(), r.t_max()));
    let w = r.window(lo, hi);
    if w.len() < 3 || w.t_max() / w.t_min() < 100.0 * (1.0 - 1e-9) {
        return Err(Error::Window(format!(
            "remainder fit needs ≥ 2 decades, got [{:e}, {:e}]",
            w.t_min(),
            w.t_max()
        )));
    }
    let nonzero: Vec<(f64, f64)> = w.iter().filter(|&(_, v)| v != 0.0).collect();
    if nonzero.len() < 3 {
        return Err(Error::Window("remainder vanishes on the fit window".into()));
    }
    let sign_changes = nonzero.windows(2).any(|p| p[0].1.signum() != p[1].1.signum());
    let x: Vec<f64> = nonzero.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = nonzero.iter().map(|p| p.1.abs().ln()).collect();
    let fit = fit_line(&x, &y)?;
    let rms = (x
        .iter()
        .zip(&y)
        .map(|(x, y)| (y - fit.slope * x - fit.intercept).powi(2))
        .sum::<f64>()
        / x.len() as f64)
        .sqrt();
    Ok(RemainderFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        sign_changes,
        oscillating: rms > 1e-3,
        t_lo: w.t_min(),
        t_hi: w.t_max(),
    })
}
