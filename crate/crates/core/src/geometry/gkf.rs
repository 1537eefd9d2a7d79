//! Generalized von Koch curves and snowflakes.
//!
//! An `(n, r)` curve replaces the middle `r`-portion of the unit segment by
//! `n − 1` edges of a regular `n`-gon of side `r`; the two outer pieces have
//! ratio `ℓ = (1 − r)/2`. Curves bulge to the left of the direction of travel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Point, Polyline, SelfSimilarSystem, Similitude};
use crate::error::{Error, Result};

/// Upper bound on prefractal vertex counts before refusing to build.
pub const MAX_PREFRACTAL_VERTICES: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GkfParams {
    pub n: usize,
    pub r: f64,
}

impl GkfParams {
    /// Ratio of the two outer pieces.
    pub fn ell(&self) -> f64 {
        (1.0 - self.r) / 2.0
    }
}

/// Builds `Φ_{n,r}`. Maps are stored in chain order
/// `φ_L, ψ_1, …, ψ_{n−1}, φ_R`, so that consecutive images of the unit
/// segment join end to end from `(0,0)` to `(1,0)`.
pub fn gkf_system(n: usize, r: f64) -> Result<SelfSimilarSystem> {
    if !(r > 0.0 && r <= 1.0 / 3.0) {
        return Err(Error::InvalidParameter(format!(
            "r must lie in (0, 1/3], got {r}"
        )));
    }
    gkf_system_unrestricted(n, r)
}

/// Same maps as [`gkf_system`] for any `r ∈ (0, 1)`. Used to explore ratios
/// past the admissible range, where snowflakes typically self-intersect.
pub fn gkf_system_unrestricted(n: usize, r: f64) -> Result<SelfSimilarSystem> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be ≥ 3, got {n}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!("r must lie in (0, 1), got {r}")));
    }
    let ell = (1.0 - r) / 2.0;
    let central = 2.0 * PI / n as f64;
    let interior = PI - central;

    let mut maps = Vec::with_capacity(n + 1);
    maps.push(Similitude::new(ell, 0.0, false, Point::ORIGIN)?);
    let mut anchor = Point::new(ell, 0.0);
    for k in 1..n {
        let psi = Similitude::new(r, interior - (k - 1) as f64 * central, false, anchor)?;
        anchor = psi.apply(Point::new(1.0, 0.0));
        maps.push(psi);
    }
    maps.push(Similitude::new(ell, 0.0, false, Point::new(ell + r, 0.0))?);
    Ok(SelfSimilarSystem::planar(maps)?.with_gkf(GkfParams { n, r }))
}

/// Sufficient ratio bound for an `(n, r)` curve to be free of self-intersections.
pub fn self_avoidance_bound(n: usize) -> f64 {
    let a = PI / n as f64;
    if n % 2 == 0 {
        a.sin().powi(2) / (a.cos().powi(2) + 1.0)
    } else {
        1.0 - a.cos()
    }
}

/// Depth-`depth` prefractal of the attractor of a planar system whose maps
/// chain the unit segment. Has `(#maps)^depth + 1` vertices.
pub fn prefractal_curve(system: &SelfSimilarSystem, depth: u32) -> Result<Polyline> {
    let maps = system.similitudes().ok_or_else(|| {
        Error::InvalidParameter("prefractal curves need planar maps".into())
    })?;
    let k = maps.len() as u64;
    let vertices = k
        .checked_pow(depth)
        .and_then(|v| v.checked_add(1))
        .unwrap_or(u64::MAX);
    if vertices > MAX_PREFRACTAL_VERTICES {
        return Err(Error::Resource {
            what: format!("prefractal curve at depth {depth}"),
            required: vertices,
            budget: MAX_PREFRACTAL_VERTICES,
        });
    }
    let mut curve = vec![Point::ORIGIN, Point::new(1.0, 0.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(curve.len() * maps.len());
        for (i, m) in maps.iter().enumerate() {
            let skip = usize::from(i > 0);
            next.extend(curve.iter().skip(skip).map(|&p| m.apply(p)));
        }
        curve = next;
    }
    let last = curve.len() - 1;
    curve[0] = Point::ORIGIN;
    curve[last] = Point::new(1.0, 0.0);
    Polyline::new(curve, false)
}

/// A closed snowflake boundary together with any self-avoidance warning.
#[derive(Debug, Clone)]
pub struct Snowflake {
    pub boundary: Polyline,
    pub params: GkfParams,
    pub depth: u32,
    pub warning: Option<String>,
}

/// `n` copies of the prefractal curve on the edges of a regular `n`-gon of
/// side 1, bumps pointing outward, traversed counterclockwise.
pub fn snowflake(system: &SelfSimilarSystem, depth: u32) -> Result<Snowflake> {
    let params = system.gkf_params().ok_or_else(|| {
        Error::InvalidParameter("snowflake needs a system built by gkf_system".into())
    })?;
    let n = params.n;
    let bound = self_avoidance_bound(n);
    let warning = (params.r >= bound).then(|| {
        format!(
            "r = {} violates the self-avoidance bound {bound:.6} for n = {n}",
            params.r
        )
    });

    let curve = prefractal_curve(system, depth)?;
    let central = 2.0 * PI / n as f64;
    let corners: Vec<Point> = {
        let mut v = vec![Point::ORIGIN];
        let mut p = Point::ORIGIN;
        for k in 0..n - 1 {
            p = p + Point::new(1.0, 0.0).rotate(k as f64 * central);
            v.push(p);
        }
        v
    };

    let mut vertices = Vec::with_capacity(n * (curve.vertices().len() - 1));
    for k in 0..n {
        let a = corners[k];
        let b = corners[(k + 1) % n];
        // Lay the curve from b to a (its left is outside), then walk it back.
        let dir = a - b;
        let perp = Point::new(-dir.y, dir.x);
        let mut piece: Vec<Point> = curve
            .vertices()
            .iter()
            .map(|p| b + dir * p.x + perp * p.y)
            .collect();
        piece.reverse();
        piece[0] = a;
        piece.pop();
        vertices.extend(piece);
    }
    let boundary = Polyline::new(vertices, true)?;
    if let Some(hit) = boundary.find_crossing() {
        return Err(Error::SelfIntersection {
            first: hit.first,
            second: hit.second,
        });
    }
    Ok(Snowflake {
        boundary,
        params,
        depth,
        warning,
    })
}

/// Decomposition of the region under one curve into scaled copies plus the
/// residual polygon left uncovered by them.
#[derive(Debug, Clone)]
pub struct OsculatingResidual {
    /// Region between the base segment and the depth-`d` curve (counterclockwise).
    pub region: Polyline,
    pub residual: Vec<Polyline>,
    pub region_area: f64,
    /// `Σ λ_φ² · area(region at depth d − 1)`.
    pub copies_area: f64,
    pub residual_area: f64,
    /// `1 − Σ λ_φ²`, the residual share of the limiting region.
    pub limit_residual_fraction: f64,
}

pub fn osculating_residual(system: &SelfSimilarSystem, depth: u32) -> Result<OsculatingResidual> {
    let params = system.gkf_params().ok_or_else(|| {
        Error::InvalidParameter("osculating residual needs a system built by gkf_system".into())
    })?;
    let maps = system.similitudes().expect("gkf systems are planar");
    let sum_sq: f64 = maps.iter().map(|m| m.ratio() * m.ratio()).sum();
    let region_at = |d: u32| -> Result<Polyline> {
        Ok(prefractal_curve(system, d)?.reversed().closed_copy())
    };
    let region = region_at(depth)?;
    let region_area = region.area();
    if depth == 0 {
        return Ok(OsculatingResidual {
            residual: vec![region.clone()],
            region,
            region_area,
            copies_area: 0.0,
            residual_area: region_area,
            limit_residual_fraction: 1.0 - sum_sq,
        });
    }
    let copies_area = sum_sq * region_at(depth - 1)?.area();

    // Bump polygon: base gap [ℓ, ℓ+r] plus the n − 1 attached edges.
    let ell = params.ell();
    let mut gon = vec![Point::new(ell, 0.0)];
    for psi in &maps[1..params.n] {
        gon.push(psi.apply(Point::new(1.0, 0.0)));
    }
    let last = gon.len() - 1;
    gon[last] = Point::new(ell + params.r, 0.0);
    gon.reverse();
    let gon = Polyline::new(gon, true)?;
    let residual_area = gon.area();
    Ok(OsculatingResidual {
        region,
        residual: vec![gon],
        region_area,
        copies_area,
        residual_area,
        limit_residual_fraction: 1.0 - sum_sq,
    })
}

impl Polyline {
    fn closed_copy(&self) -> Polyline {
        Polyline::new(self.vertices().to_vec(), true).expect("open curve endpoints differ")
    }
}
