//! Relative tube functions `V(t) = |{x ∈ Ω : d(x, ∂Ω) ≤ t}|` on rasterized
//! domains, Minkowski-dimension fits and tube zeta functions.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridDomain, GridMeta, Point};
use crate::mellin::{truncated_mellin, MellinValue, SampledFunction};
use crate::series::{fit_harmonic, fit_line, HarmonicFit, TimeSeries};
use crate::Complex64;

/// Distance from every interior cell center to the boundary; `NaN` outside.
#[derive(Debug, Clone)]
pub struct DistanceField {
    nx: usize,
    ny: usize,
    h: f64,
    d: Vec<f64>,
}

impl DistanceField {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.d[j * self.nx + i];
        (!v.is_nan()).then_some(v)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Distances of interior cells in row-major order.
    pub fn interior(&self) -> impl Iterator<Item = f64> + '_ {
        self.d.iter().copied().filter(|v| !v.is_nan())
    }

    /// Largest distance, the inradius of the rasterized domain.
    pub fn max(&self) -> f64 {
        self.interior().fold(0.0, f64::max)
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(a + ab * t)
}

/// Boundary segments: the polygon edges when the grid carries its polygon,
/// otherwise the cell faces between interior and exterior cells.
fn boundary_segments(grid: &GridDomain) -> Vec<(Point, Point)> {
    if let Some(poly) = grid.polygon() {
        return poly.edges().collect();
    }
    let (nx, ny, h, o) = (grid.nx(), grid.ny(), grid.h(), grid.origin());
    let corner = |i: usize, j: usize| Point::new(o.x + h * i as f64, o.y + h * j as f64);
    let inside = |i: isize, j: isize| {
        i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny && grid.is_interior(i as usize, j as usize)
    };
    let mut segs = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if !grid.is_interior(i, j) {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            if !inside(ii - 1, jj) {
                segs.push((corner(i, j), corner(i, j + 1)));
            }
            if !inside(ii + 1, jj) {
                segs.push((corner(i + 1, j), corner(i + 1, j + 1)));
            }
            if !inside(ii, jj - 1) {
                segs.push((corner(i, j), corner(i + 1, j)));
            }
            if !inside(ii, jj + 1) {
                segs.push((corner(i, j + 1), corner(i + 1, j + 1)));
            }
        }
    }
    segs
}

/// Euclidean distance from cell centers to the boundary segments.
///
/// Cells near each segment are seeded with exact distances; nearest-segment
/// labels are then propagated by a forward and a backward raster sweep over
/// the 8-neighbourhood, each cell re-evaluating the exact distance to its
/// neighbours' segments.
pub fn distance_transform(grid: &GridDomain) -> DistanceField {
    let (nx, ny, h, o) = (grid.nx(), grid.ny(), grid.h(), grid.origin());
    let segs = boundary_segments(grid);
    let center = |i: usize, j: usize| Point::new(o.x + h * (i as f64 + 0.5), o.y + h * (j as f64 + 0.5));
    let mut dist = vec![f64::INFINITY; nx * ny];
    let mut label = vec![u32::MAX; nx * ny];

    let cell_of = |x: f64, lo: f64, n: usize| (((x - lo) / h).floor().max(0.0) as usize).min(n - 1);
    for (k, &(a, b)) in segs.iter().enumerate() {
        let pad = 1.5 * h;
        let (i0, i1) = (cell_of(a.x.min(b.x) - pad, o.x, nx), cell_of(a.x.max(b.x) + pad, o.x, nx));
        let (j0, j1) = (cell_of(a.y.min(b.y) - pad, o.y, ny), cell_of(a.y.max(b.y) + pad, o.y, ny));
        for j in j0..=j1 {
            for i in i0..=i1 {
                let d = segment_distance(center(i, j), a, b);
                let c = j * nx + i;
                if d < dist[c] {
                    dist[c] = d;
                    label[c] = k as u32;
                }
            }
        }
    }

    let relax = |i: usize, j: usize, di: isize, dj: isize, dist: &mut [f64], label: &mut [u32]| {
        let (a, b) = (i as isize + di, j as isize + dj);
        if a < 0 || b < 0 || a >= nx as isize || b >= ny as isize {
            return;
        }
        let l = label[b as usize * nx + a as usize];
        let c = j * nx + i;
        if l == u32::MAX || l == label[c] {
            return;
        }
        let (p, q) = segs[l as usize];
        let d = segment_distance(center(i, j), p, q);
        if d < dist[c] {
            dist[c] = d;
            label[c] = l;
        }
    };
    for j in 0..ny {
        for i in 0..nx {
            for (di, dj) in [(-1, 0), (-1, -1), (0, -1), (1, -1)] {
                relax(i, j, di, dj, &mut dist, &mut label);
            }
        }
        for i in (0..nx).rev() {
            relax(i, j, 1, 0, &mut dist, &mut label);
        }
    }
    for j in (0..ny).rev() {
        for i in (0..nx).rev() {
            for (di, dj) in [(1, 0), (1, 1), (0, 1), (-1, 1)] {
                relax(i, j, di, dj, &mut dist, &mut label);
            }
        }
        for i in 0..nx {
            relax(i, j, -1, 0, &mut dist, &mut label);
        }
    }

    for (k, d) in dist.iter_mut().enumerate() {
        if !grid.interior_mask()[k] {
            *d = f64::NAN;
        }
    }
    DistanceField { nx, ny, h, d: dist }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeManifest {
    pub grid: GridMeta,
    pub inradius: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeRun {
    pub grid: GridMeta,
    pub volume: TimeSeries,
    /// Largest interior distance.
    pub inradius: f64,
}

impl TubeRun {
    pub fn h(&self) -> f64 {
        self.grid.h
    }

    /// Writes `t,V` CSV and `<csv>.json` manifest.
    pub fn write(&self, csv: impl AsRef<Path>) -> Result<()> {
        let csv = csv.as_ref();
        self.volume.write_csv(csv, "V")?;
        let mut p = csv.as_os_str().to_owned();
        p.push(".json");
        let manifest = TubeManifest {
            grid: self.grid.clone(),
            inradius: self.inradius,
            method: "segment distance transform".into(),
        };
        let mut f = std::fs::File::create(p)?;
        f.write_all(serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        Ok(())
    }
}

/// `V(t) = h² · #{interior cells with distance ≤ t}`.
pub fn tube_function(grid: &GridDomain, t_values: &[f64]) -> Result<TubeRun> {
    tube_function_from(grid, &distance_transform(grid), t_values)
}

/// [`tube_function`] reusing a precomputed distance field.
pub fn tube_function_from(grid: &GridDomain, field: &DistanceField, t_values: &[f64]) -> Result<TubeRun> {
    if t_values.windows(2).any(|w| w[1] <= w[0]) || t_values.iter().any(|t| *t < 0.0) {
        return Err(Error::InvalidParameter("tube parameters must be nonnegative and increasing".into()));
    }
    let mut d: Vec<f64> = field.interior().collect();
    d.sort_by(f64::total_cmp);
    let cell = grid.h() * grid.h();
    let v = t_values
        .iter()
        .map(|&t| d.partition_point(|&x| x <= t) as f64 * cell)
        .collect();
    Ok(TubeRun {
        grid: grid.meta(),
        volume: TimeSeries::new(t_values.to_vec(), v)?,
        inradius: d.last().copied().unwrap_or(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiFit {
    pub dim: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    /// Single-harmonic fit at the supplied multiplicative period.
    pub harmonic: Option<HarmonicFit>,
}

/// Slope `m` of `log V` against `log t` and `dim = N − m`.
///
/// The default window is `[4h, inradius/10]`. A window must span two decades,
/// or two multiplicative periods `period` (a log-scale length) when given.
pub fn minkowski_fit(run: &TubeRun, n: usize, window: Option<(f64, f64)>, period: Option<f64>) -> Result<MinkowskiFit> {
    let (lo, hi) = window.unwrap_or((4.0 * run.h(), run.inradius / 10.0));
    let lo = lo.max(2.0 * run.h());
    let (x, y): (Vec<f64>, Vec<f64>) = run
        .volume
        .iter()
        .filter(|&(t, v)| t >= lo && t <= hi && v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .unzip();
    // Samples rarely land on the window ends; allow a grid step at each end.
    let span = match (x.first(), x.last()) {
        (Some(a), Some(b)) if x.len() > 1 => (b - a) * (1.0 + 2.0 / (x.len() - 1) as f64),
        _ => 0.0,
    };
    let needed = match period {
        Some(p) => (2.0 * p).min(100f64.ln()),
        None => 100f64.ln(),
    };
    if span < needed * (1.0 - 1e-9) {
        return Err(Error::Window(format!(
            "fit window [{lo:e}, {hi:e}] spans {:.3} in log t, need {needed:.3}",
            span
        )));
    }
    let line = fit_line(&x, &y)?;
    let harmonic = match period {
        Some(p) => Some(fit_harmonic(&x, &y, p)?),
        None => None,
    };
    Ok(MinkowskiFit {
        dim: n as f64 - line.slope,
        slope: line.slope,
        intercept: line.intercept,
        r2: line.r2,
        t_lo: x[0].exp(),
        t_hi: x[x.len() - 1].exp(),
        harmonic,
    })
}

/// `ζ̃(s; δ) = ∫_0^δ t^{s−1} t^{−2} V(t) dt` from the sampled tube function,
/// with `t^{−2}V(t) ≈ c·t^{−dim}` below the sampled range.
pub fn tube_zeta_eval(run: &TubeRun, dim: f64, delta: f64, s: Complex64) -> Result<MellinValue> {
    if s.re <= dim {
        return Err(Error::Divergent { re: s.re, abscissa: dim });
    }
    let positive = run.volume.window(0.0, f64::INFINITY);
    let (t, v): (Vec<f64>, Vec<f64>) = positive.iter().filter(|&(t, v)| t > 0.0 && v > 0.0).map(|(t, v)| (t, v / (t * t))).unzip();
    if t.is_empty() {
        // V ≡ 0.
        return Ok(MellinValue {
            s,
            value: Complex64::new(0.0, 0.0),
            quadrature_error: 0.0,
        });
    }
    let f = SampledFunction::new(t, v, dim)?.with_description("t^-2 V(t)");
    truncated_mellin(&f, 0.0, delta, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentComparison {
    pub tube_slope: f64,
    pub heat_slope: f64,
    /// `tube_slope / heat_slope`, 2 when both follow the same dimension.
    pub ratio: f64,
    /// Dimension implied by each fit, `N − tube_slope` and `N − 2·heat_slope`.
    pub tube_dim: f64,
    pub heat_dim: f64,
    pub tolerance: f64,
    pub consistent: bool,
}

/// Checks `(N − tube_dim)/2 = heat_slope` within `tolerance`.
pub fn compare_exponents(n: usize, tube_dim: f64, heat_slope: f64, tolerance: f64) -> ExponentComparison {
    let nf = n as f64;
    let tube_slope = nf - tube_dim;
    ExponentComparison {
        tube_slope,
        heat_slope,
        ratio: tube_slope / heat_slope,
        tube_dim,
        heat_dim: nf - 2.0 * heat_slope,
        tolerance,
        consistent: (tube_slope / 2.0 - heat_slope).abs() <= tolerance,
    }
}
