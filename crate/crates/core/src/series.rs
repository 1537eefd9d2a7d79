//! Sampled scalar functions of time and small fitting helpers shared by the
//! heat, tube and expansion modules.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sampled scalar function `t ↦ v(t)` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    t: Vec<f64>,
    v: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() {
            return Err(Error::InvalidParameter(format!(
                "time series length mismatch: {} times, {} values",
                t.len(),
                v.len()
            )));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(Self { t, v })
    }

    pub fn from_fn(t: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v = t.iter().map(|&x| f(x)).collect();
        Self::new(t, v)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn t_max(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.v.iter().copied())
    }

    /// Restrict to samples with `lo <= t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> TimeSeries {
        let (t, v) = self
            .iter()
            .filter(|&(t, _)| t >= lo && t <= hi)
            .unzip();
        TimeSeries { t, v }
    }

    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> TimeSeries {
        TimeSeries {
            t: self.t.clone(),
            v: self.iter().map(|(t, v)| f(t, v)).collect(),
        }
    }

    /// Piecewise-linear interpolation in `log t`. Errors outside the grid.
    pub fn interp_log(&self, t: f64) -> Result<f64> {
        let n = self.t.len();
        if n == 0 || t < self.t[0] * (1.0 - 1e-12) || t > self.t[n - 1] * (1.0 + 1e-12) {
            return Err(Error::Coverage {
                requested: t,
                min: self.t.first().copied().unwrap_or(f64::NAN),
                max: self.t.last().copied().unwrap_or(f64::NAN),
            });
        }
        let t = t.clamp(self.t[0], self.t[n - 1]);
        let i = self.t.partition_point(|&x| x <= t).clamp(1, n - 1);
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        let w = (t / t0).ln() / (t1 / t0).ln();
        Ok(self.v[i - 1] + w * (self.v[i] - self.v[i - 1]))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, value_header: &str) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv_to(&mut out, value_header)?;
        out.flush()?;
        Ok(())
    }

    /// Rows are written with round-trip (`{:e}` shortest) formatting.
    pub fn write_csv_to(&self, out: &mut impl Write, value_header: &str) -> Result<()> {
        writeln!(out, "t,{value_header}")?;
        for (t, v) in self.iter() {
            writeln!(out, "{t:e},{v:e}")?;
        }
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv_from(std::io::BufReader::new(file))
    }

    pub fn read_csv_from(input: impl BufRead) -> Result<Self> {
        let mut t = Vec::new();
        let mut v = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || lineno == 0 && line.starts_with('t') {
                continue;
            }
            let mut cols = line.split(',');
            let parse = |c: Option<&str>| -> Result<f64> {
                c.and_then(|s| s.trim().parse().ok()).ok_or_else(|| {
                    Error::Parse(format!("line {}: expected two numbers", lineno + 1))
                })
            };
            t.push(parse(cols.next())?);
            v.push(parse(cols.next())?);
        }
        Self::new(t, v)
    }
}

/// `per_decade` log-spaced points covering `[lo, hi]`, both ends included.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && per_decade > 0);
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
        .collect()
}

/// Ordinary least-squares line `y = slope·x + intercept` with coefficient of
/// determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::Window(format!("need at least 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return Err(Error::Window("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - slope * xi - intercept).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LineFit {
        slope,
        intercept,
        r2,
    })
}

/// Least-squares fit of `log|v|` against `log t` over samples in `[lo, hi]`.
pub fn loglog_fit(series: &TimeSeries, lo: f64, hi: f64) -> Result<LineFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = series
        .iter()
        .filter(|&(t, v)| t >= lo && t <= hi && v != 0.0)
        .map(|(t, v)| (t.ln(), v.abs().ln()))
        .unzip();
    fit_line(&x, &y)
}

/// Log-log fit over the sliding window of `decades` decades inside
/// `[lo, hi]` with the highest `r²`. Windows start at every sample.
pub fn best_window_fit(series: &TimeSeries, lo: f64, hi: f64, decades: f64) -> Result<(LineFit, f64, f64)> {
    let span = 10f64.powf(decades);
    let mut best: Option<(LineFit, f64, f64)> = None;
    for &a in series.t().iter().filter(|&&t| t >= lo * (1.0 - 1e-12)) {
        let b = a * span;
        if b > hi * (1.0 + 1e-12) || b > series.t_max() * (1.0 + 1e-12) {
            break;
        }
        let fit = loglog_fit(series, a, b * (1.0 + 1e-12))?;
        if best.as_ref().map_or(true, |(f, _, _)| fit.r2 > f.r2) {
            best = Some((fit, a, b));
        }
    }
    best.ok_or_else(|| Error::Window(format!("no {decades}-decade window fits inside [{lo:e}, {hi:e}]")))
}

/// Line plus one harmonic, `y = a + b·x + c·cos(2πx/P) + d·sin(2πx/P)`,
/// compared against the plain line on the same samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFit {
    pub period: f64,
    pub slope: f64,
    pub intercept: f64,
    pub cos: f64,
    pub sin: f64,
    /// `√(c² + d²)`.
    pub amplitude: f64,
    pub r2: f64,
    /// Residual variance of the line alone and of line plus harmonic.
    pub line_variance: f64,
    pub harmonic_variance: f64,
}

impl HarmonicFit {
    /// Fractional reduction of residual variance due to the harmonic.
    pub fn variance_reduction(&self) -> f64 {
        if self.line_variance > 0.0 {
            1.0 - self.harmonic_variance / self.line_variance
        } else {
            0.0
        }
    }
}

pub fn fit_harmonic(x: &[f64], y: &[f64], period: f64) -> Result<HarmonicFit> {
    let n = x.len();
    if n < 5 || y.len() != n {
        return Err(Error::Window(format!("harmonic fit needs at least 5 points, got {n}")));
    }
    if !(period > 0.0) {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    let line = fit_line(x, y)?;
    let w = 2.0 * std::f64::consts::PI / period;
    let a = nalgebra::DMatrix::from_fn(n, 4, |i, k| match k {
        0 => 1.0,
        1 => x[i],
        2 => (w * x[i]).cos(),
        _ => (w * x[i]).sin(),
    });
    let b = nalgebra::DVector::from_column_slice(y);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::Window(format!("harmonic least squares failed: {e}")))?;
    let resid = &b - &a * &coef;
    let sse: f64 = resid.iter().map(|r| r * r).sum();
    let line_sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - line.slope * xi - line.intercept).powi(2))
        .sum();
    let my = y.iter().sum::<f64>() / n as f64;
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    Ok(HarmonicFit {
        period,
        slope: coef[1],
        intercept: coef[0],
        cos: coef[2],
        sin: coef[3],
        amplitude: coef[2].hypot(coef[3]),
        r2: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
        line_variance: line_sse / n as f64,
        harmonic_variance: sse / n as f64,
    })
}

/// Monotone (Fritsch–Carlson) cubic Hermite interpolant in `log t`. Does not
/// overshoot monotone data; evaluation outside the grid extrapolates the end
/// cubic.
#[derive(Debug, Clone)]
pub struct MonotoneLogInterp {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneLogInterp {
    /// Needs at least two samples at positive times.
    pub fn new(series: &TimeSeries) -> Self {
        let x: Vec<f64> = series.t().iter().map(|t| t.ln()).collect();
        let y = series.v().to_vec();
        let m = fritsch_carlson(&x, &y);
        Self { x, y, m }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = t.ln();
        let n = self.x.len();
        let i = match self.x.partition_point(|&xi| xi <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (x - self.x[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
            u * (1.0 - u) * (1.0 - u),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }
}

/// Shape-preserving three-point end tangent.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

/// Monotone cubic Hermite tangents.
fn fritsch_carlson(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    if n == 2 {
        return vec![d[0]; 2];
    }
    let mut m = vec![0.0; n];
    m[0] = end_slope(x[1] - x[0], x[2] - x[1], d[0], d[1]);
    m[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], d[n - 2], d[n - 3]);
    for i in 1..n - 1 {
        m[i] = if d[i - 1] * d[i] <= 0.0 {
            0.0
        } else {
            0.5 * (d[i - 1] + d[i])
        };
    }
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / d[i];
        let b = m[i + 1] / d[i];
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * d[i];
            m[i + 1] = tau * b * d[i];
        }
    }
    m
}
