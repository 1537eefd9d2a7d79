use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridDomain, Point, Polyline};

/// Paths simulated per RNG stream.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub seed: u64,
    /// Brownian-bridge crossing correction between steps.
    pub bridge: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            bridge: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub absorbed: usize,
    pub seed: u64,
}

/// Where paths start and what absorbs them.
#[derive(Debug, Clone, Copy)]
pub enum McDomain<'a> {
    Polygon(&'a Polyline),
    /// Raster domain; absorption when a path leaves the interior cells.
    Grid(&'a GridDomain),
}

impl<'a> From<&'a Polyline> for McDomain<'a> {
    fn from(p: &'a Polyline) -> Self {
        McDomain::Polygon(p)
    }
}

impl<'a> From<&'a GridDomain> for McDomain<'a> {
    fn from(g: &'a GridDomain) -> Self {
        match g.polygon() {
            Some(p) => McDomain::Polygon(p),
            None => McDomain::Grid(g),
        }
    }
}

impl McDomain<'_> {
    fn area(&self) -> f64 {
        match self {
            McDomain::Polygon(p) => p.area(),
            McDomain::Grid(g) => g.area(),
        }
    }

    fn bbox(&self) -> (Point, Point) {
        match self {
            McDomain::Polygon(p) => p.bbox(),
            McDomain::Grid(g) => {
                let o = g.origin();
                let h = g.h();
                (o, Point::new(o.x + h * g.nx() as f64, o.y + h * g.ny() as f64))
            }
        }
    }

    fn contains(&self, p: Point) -> bool {
        match self {
            McDomain::Polygon(poly) => poly.contains(p),
            McDomain::Grid(g) => {
                let o = g.origin();
                let (fi, fj) = ((p.x - o.x) / g.h(), (p.y - o.y) / g.h());
                if fi < 0.0 || fj < 0.0 {
                    return false;
                }
                let (i, j) = (fi as usize, fj as usize);
                i < g.nx() && j < g.ny() && g.is_interior(i, j)
            }
        }
    }

    fn distance(&self, p: Point) -> f64 {
        match self {
            McDomain::Polygon(poly) => poly.distance_to(p),
            // Only the polygon carries exact geometry; use half a cell.
            McDomain::Grid(g) => 0.5 * g.h(),
        }
    }
}

/// Monte Carlo estimate of `E(t) = ∫_Ω P_x(τ ≤ t) dx`, where `τ` is the exit
/// time of Brownian motion with generator `CΔ`.
pub fn mc_heat_content<'a>(
    domain: impl Into<McDomain<'a>>,
    c: f64,
    t: f64,
    n_paths: usize,
    dt: f64,
    opts: McOptions,
) -> Result<McEstimate> {
    let domain = domain.into();
    if !(c > 0.0) || t < 0.0 || n_paths == 0 {
        return Err(Error::InvalidParameter(format!(
            "need C > 0, t ≥ 0 and at least one path (C = {c}, t = {t}, n = {n_paths})"
        )));
    }
    if t == 0.0 {
        return Ok(McEstimate {
            t,
            estimate: 0.0,
            stderr: 0.0,
            n_paths,
            absorbed: 0,
            seed: opts.seed,
        });
    }
    if !(dt > 0.0) || dt > t / 100.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("step {dt} must lie in (0, t/100]")));
    }
    let steps = (t / dt).ceil() as usize;
    let dt = t / steps as f64;
    let sd = (2.0 * c * dt).sqrt();
    let (lo, hi) = domain.bbox();

    let chunks = n_paths.div_ceil(CHUNK);
    let absorbed: usize = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let count = CHUNK.min(n_paths - k * CHUNK);
            let mut hits = 0;
            for _ in 0..count {
                let mut x = loop {
                    let p = Point::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
                    if domain.contains(p) {
                        break p;
                    }
                };
                for _ in 0..steps {
                    let dx: f64 = rng.sample(StandardNormal);
                    let dy: f64 = rng.sample(StandardNormal);
                    let next = Point::new(x.x + sd * dx, x.y + sd * dy);
                    if !domain.contains(next) {
                        hits += 1;
                        break;
                    }
                    if opts.bridge {
                        let (d1, d2) = (domain.distance(x), domain.distance(next));
                        if rng.random::<f64>() < (-d1 * d2 / (c * dt)).exp() {
                            hits += 1;
                            break;
                        }
                    }
                    x = next;
                }
            }
            hits
        })
        .sum();

    let p = absorbed as f64 / n_paths as f64;
    let area = domain.area();
    Ok(McEstimate {
        t,
        estimate: area * p,
        stderr: area * (p * (1.0 - p) / n_paths as f64).sqrt(),
        n_paths,
        absorbed,
        seed: opts.seed,
    })
}
