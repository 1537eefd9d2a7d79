use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{MonotoneLogInterp, TimeSeries};

/// Minimum sample density accepted for Mellin quadrature.
pub const MIN_PER_DECADE: usize = 64;

/// A function of `t > 0` for Mellin transforms, together with its asserted
/// small-`t` growth `f(t) = O(t^{−σ0})`.
pub trait MellinSource: Sync {
    /// Value at `t`, including any fitted tail below the sampled range.
    fn value(&self, t: f64) -> Result<f64>;

    fn sigma0(&self) -> f64;

    /// Lower end of the directly integrated range and the tail constant `c`
    /// with `f(t) ≈ c·t^{−σ0}` below it. `None` for closed forms.
    fn tail(&self) -> Option<(f64, f64)>;

    /// Largest `t` at which the function may be evaluated.
    fn t_max(&self) -> f64 {
        f64::INFINITY
    }

    /// Interpolation knots inside `(lo, hi)`, used as quadrature panel breaks.
    fn knots(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// A closed-form function.
pub struct ClosedForm<F> {
    f: F,
    sigma0: f64,
}

impl<F: Fn(f64) -> f64 + Sync> ClosedForm<F> {
    pub fn new(f: F, sigma0: f64) -> Self {
        Self { f, sigma0 }
    }
}

impl<F: Fn(f64) -> f64 + Sync> MellinSource for ClosedForm<F> {
    fn value(&self, t: f64) -> Result<f64> {
        Ok((self.f)(t))
    }

    fn sigma0(&self) -> f64 {
        self.sigma0
    }

    fn tail(&self) -> Option<(f64, f64)> {
        None
    }
}

/// `t ↦ f(t/λ²)`, sharing the knots and tail of `f`.
pub struct Rescaled<'a, S: ?Sized> {
    inner: &'a S,
    factor: f64,
}

impl<'a, S: MellinSource + ?Sized> Rescaled<'a, S> {
    /// `factor` is `λ²`.
    pub fn new(inner: &'a S, factor: f64) -> Self {
        Self { inner, factor }
    }
}

impl<S: MellinSource + ?Sized> MellinSource for Rescaled<'_, S> {
    fn value(&self, t: f64) -> Result<f64> {
        self.inner.value(t / self.factor)
    }

    fn sigma0(&self) -> f64 {
        self.inner.sigma0()
    }

    fn tail(&self) -> Option<(f64, f64)> {
        let s0 = self.inner.sigma0();
        self.inner
            .tail()
            .map(|(t0, c)| (t0 * self.factor, c * self.factor.powf(s0)))
    }

    fn t_max(&self) -> f64 {
        self.inner.t_max() * self.factor
    }

    fn knots(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.inner
            .knots(lo / self.factor, hi / self.factor)
            .into_iter()
            .map(|t| t * self.factor)
            .collect()
    }
}

/// Log-spaced samples interpolated by a monotone (Fritsch–Carlson) cubic in
/// `log t`, with a power-law tail `c·t^{−σ0}` fitted over the first decade.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    t: Vec<f64>,
    v: Vec<f64>,
    interp: MonotoneLogInterp,
    sigma0: f64,
    tail_c: f64,
    description: String,
}

/// JSON sidecar for [`SampledFunction`] CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledMeta {
    pub sigma0: f64,
    pub t_max: f64,
    pub description: String,
}

impl SampledFunction {
    pub fn new(t: Vec<f64>, v: Vec<f64>, sigma0: f64) -> Result<Self> {
        let series = TimeSeries::new(t, v)?;
        Self::from_series(&series, sigma0)
    }

    pub fn from_series(series: &TimeSeries, sigma0: f64) -> Result<Self> {
        let (t, v) = (series.t().to_vec(), series.v().to_vec());
        if t.len() < 4 || t[0] <= 0.0 {
            return Err(Error::InvalidParameter(
                "sampled function needs ≥ 4 samples at positive times".into(),
            ));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("sample values must be finite".into()));
        }
        let decades = (t[t.len() - 1] / t[0]).log10();
        let per_decade = (t.len() - 1) as f64 / decades;
        if per_decade < MIN_PER_DECADE as f64 - 1e-6 {
            return Err(Error::Resolution {
                per_decade,
                required: MIN_PER_DECADE,
            });
        }
        let interp = MonotoneLogInterp::new(series);
        // Tail constant: least squares of v ≈ c·t^{−σ0} over the first decade.
        let (mut num, mut den) = (0.0, 0.0);
        for (&ti, &vi) in t.iter().zip(&v).take_while(|(&ti, _)| ti <= 10.0 * t[0] * (1.0 + 1e-12)) {
            let w = ti.powf(-sigma0);
            num += vi * w;
            den += w * w;
        }
        Ok(Self {
            t,
            v,
            interp,
            sigma0,
            tail_c: num / den,
            description: String::new(),
        })
    }

    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.description = d.into();
        self
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn meta(&self) -> SampledMeta {
        SampledMeta {
            sigma0: self.sigma0,
            t_max: self.t[self.t.len() - 1],
            description: self.description.clone(),
        }
    }

    /// CSV with header `t,value` plus `<path>.json` sidecar.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "t,value")?;
        for (t, v) in self.t.iter().zip(&self.v) {
            writeln!(out, "{t:e},{v:e}")?;
        }
        out.flush()?;
        std::fs::write(sidecar(path), serde_json::to_string_pretty(&self.meta())?)?;
        Ok(())
    }

    /// Reads a CSV; `σ0` and the description come from the sidecar when
    /// present, otherwise `sigma0` must be given.
    pub fn read(path: impl AsRef<Path>, sigma0: Option<f64>) -> Result<Self> {
        let path = path.as_ref();
        let series = TimeSeries::read_csv(path)?;
        let meta: Option<SampledMeta> = match std::fs::read_to_string(sidecar(path)) {
            Ok(s) => Some(serde_json::from_str(&s)?),
            Err(_) => None,
        };
        let s0 = sigma0
            .or(meta.as_ref().map(|m| m.sigma0))
            .ok_or_else(|| Error::InvalidParameter(format!("no σ0 given for {}", path.display())))?;
        let f = Self::from_series(&series, s0)?;
        Ok(match meta {
            Some(m) => f.with_description(m.description),
            None => f,
        })
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

impl MellinSource for SampledFunction {
    fn value(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.t[0], self.t[self.t.len() - 1]);
        if t < lo {
            Ok(self.tail_c * t.powf(-self.sigma0))
        } else if t <= hi * (1.0 + 1e-12) {
            Ok(self.interp.eval(t.min(hi)))
        } else {
            Err(Error::Coverage {
                requested: t,
                min: 0.0,
                max: hi,
            })
        }
    }

    fn sigma0(&self) -> f64 {
        self.sigma0
    }

    fn tail(&self) -> Option<(f64, f64)> {
        Some((self.t[0], self.tail_c))
    }

    fn t_max(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    fn knots(&self, lo: f64, hi: f64) -> Vec<f64> {
        let a = self.t.partition_point(|&t| t <= lo);
        let b = self.t.partition_point(|&t| t < hi);
        self.t[a..b].to_vec()
    }
}
