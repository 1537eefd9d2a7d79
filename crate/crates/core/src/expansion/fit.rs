use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::Complex64;

use super::{explicit_formula_series, CoefficientSource, HeatCoefficient};

/// One harmonic `c·cos(2πj·ln t/p + φ)` of a log-periodic fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub j: usize,
    pub amplitude: f64,
    pub phase: f64,
}

/// Truncated expansion of a heat content: coefficients at (possibly fitted)
/// poles, with the residual of the reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    #[serde(rename = "N")]
    pub n: u32,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Largest `|Im ω|` kept.
    #[serde(rename = "T")]
    pub truncation: f64,
    pub poles: Vec<HeatCoefficient>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_csv_path: Option<PathBuf>,
    /// Multiplicative period `p` in `ln t` and the Fourier description of
    /// the fit (present for log-periodic fits).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub harmonics: Vec<Harmonic>,
    pub c0: f64,
    pub r2: f64,
    /// Residual sum of squares with all harmonics and with the constant only.
    pub rss: f64,
    pub rss_constant: f64,
    #[serde(skip)]
    pub residual: Option<TimeSeries>,
}

impl ExpansionFit {
    /// Writes the residual CSV (`t,residual`) and records its path.
    pub fn write_residual(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let r = self
            .residual
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("fit carries no residual series".into()))?;
        r.write_csv(&path, "residual")?;
        self.residual_csv_path = Some(path.as_ref().to_path_buf());
        Ok(())
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Reconstruction of `data` (the `k`-th antiderivative of `E`) by the
    /// truncated explicit formula with the given coefficients.
    pub fn from_coefficients(
        n: u32,
        k: usize,
        delta: Option<f64>,
        truncation: f64,
        poles: Vec<HeatCoefficient>,
        data: &TimeSeries,
    ) -> Result<Self> {
        let model = explicit_formula_series(&poles, k, n, data.t(), truncation)?;
        let resid: Vec<f64> = data.v().iter().zip(model.v()).map(|(d, f)| d - f).collect();
        let mean = data.v().iter().sum::<f64>() / data.len().max(1) as f64;
        let rss_constant: f64 = data.v().iter().map(|v| (v - mean).powi(2)).sum();
        let rss: f64 = resid.iter().map(|r| r * r).sum();
        let c0 = poles
            .iter()
            .filter(|p| p.omega.im == 0.0)
            .map(|p| p.value.re)
            .next()
            .unwrap_or(0.0);
        Ok(Self {
            n,
            k,
            delta,
            truncation,
            poles: poles.into_iter().filter(|p| p.omega.im.abs() <= truncation).collect(),
            residual_csv_path: None,
            period: None,
            harmonics: Vec::new(),
            c0,
            r2: if rss_constant > 0.0 { 1.0 - rss / rss_constant } else { 1.0 },
            rss,
            rss_constant,
            residual: Some(TimeSeries::new(data.t().to_vec(), resid)?),
        })
    }

    /// Largest `|residual| / |data|` over the samples of `data`.
    pub fn max_relative_residual(&self, data: &TimeSeries) -> f64 {
        self.residual.as_ref().map_or(f64::NAN, |r| {
            r.v().iter().zip(data.v()).map(|(r, d)| (r / d).abs()).fold(0.0, f64::max)
        })
    }

    /// F statistic of the harmonic model against the constant-only model.
    pub fn f_statistic(&self, n_samples: usize) -> f64 {
        let extra = 2 * self.harmonics.len();
        let dof = n_samples.saturating_sub(1 + extra);
        if extra == 0 || dof == 0 || self.rss <= 0.0 {
            return f64::INFINITY;
        }
        ((self.rss_constant - self.rss) / extra as f64) / (self.rss / dof as f64)
    }
}

/// Fits `E(t) ≈ t^{(2−D)/2}(c_0 + Σ_{j≤n} c_j cos(2πj·ln t/p + φ_j))` by
/// linear least squares over `window` (the whole series by default).
///
/// With `p = ln(1/λ²)` the harmonic `j` corresponds to the conjugate poles
/// `D ± 4πij/p` with coefficient `r = (c_j/2)e^{−iφ_j}`; `c_0` is the
/// coefficient at `D`. These are reported as fitted poles.
pub fn logperiodic_fit(
    e: &TimeSeries,
    dim: f64,
    period: f64,
    n_harmonics: usize,
    window: Option<(f64, f64)>,
) -> Result<ExpansionFit> {
    if !(period > 0.0) {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    let data = match window {
        Some((lo, hi)) => e.window(lo, hi),
        None => e.clone(),
    };
    let m = data.len();
    let cols = 1 + 2 * n_harmonics;
    // Samples rarely land on the window ends; allow a grid step at each end.
    let span = (data.t_max() / data.t_min()).ln();
    let step = if m > 1 { span / (m - 1) as f64 } else { 0.0 };
    if m < 2 || span + 2.0 * step < 2.0 * period * (1.0 - 1e-9) {
        return Err(Error::Window(format!(
            "log-periodic fit needs two periods (ln-span {:.3}) of data",
            2.0 * period
        )));
    }
    if m < cols + 2 {
        return Err(Error::Window(format!("{m} samples cannot fit {n_harmonics} harmonics")));
    }
    let lead = (2.0 - dim) / 2.0;
    let w = TAU / period;
    let x: Vec<f64> = data.t().iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = data.iter().map(|(t, v)| v * t.powf(-lead)).collect();
    let a = nalgebra::DMatrix::from_fn(m, cols, |i, c| {
        if c == 0 {
            return 1.0;
        }
        let j = (c + 1) / 2;
        let arg = w * j as f64 * x[i];
        if c % 2 == 1 {
            arg.cos()
        } else {
            arg.sin()
        }
    });
    let b = nalgebra::DVector::from_column_slice(&y);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-13)
        .map_err(|err| Error::Window(format!("log-periodic least squares failed: {err}")))?;
    let my = y.iter().sum::<f64>() / m as f64;
    let rss_constant: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let resid = &b - &a * &coef;
    let rss: f64 = resid.iter().map(|r| r * r).sum();

    let c0 = coef[0];
    let mut poles = vec![HeatCoefficient {
        omega: Complex64::new(dim, 0.0),
        value: Complex64::new(c0, 0.0),
        multiplicity: 1,
        source: CoefficientSource::Fitted,
    }];
    let mut harmonics = Vec::with_capacity(n_harmonics);
    for j in 1..=n_harmonics {
        let (ca, sa) = (coef[2 * j - 1], coef[2 * j]);
        // ca·cos + sa·sin = c·cos(x + φ)
        let (amp, phase) = (ca.hypot(sa), (-sa).atan2(ca));
        harmonics.push(Harmonic { j, amplitude: amp, phase });
        let r = Complex64::from_polar(amp / 2.0, -phase);
        let omega = Complex64::new(dim, 2.0 * w * j as f64);
        for (o, v) in [(omega, r), (omega.conj(), r.conj())] {
            poles.push(HeatCoefficient {
                omega: o,
                value: v,
                multiplicity: 1,
                source: CoefficientSource::Fitted,
            });
        }
    }
    let truncation = 2.0 * w * n_harmonics as f64;
    let model = explicit_formula_series(&poles, 0, 2, data.t(), f64::INFINITY)?;
    let residual = TimeSeries::new(
        data.t().to_vec(),
        data.v().iter().zip(model.v()).map(|(d, f)| d - f).collect(),
    )?;
    Ok(ExpansionFit {
        n: 2,
        k: 0,
        delta: None,
        truncation,
        poles,
        residual_csv_path: None,
        period: Some(period),
        harmonics,
        c0,
        r2: if rss_constant > 0.0 { 1.0 - rss / rss_constant } else { 1.0 },
        rss,
        rss_constant,
        residual: Some(residual),
    })
}
