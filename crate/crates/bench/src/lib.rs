//! Shared fixtures for the benchmarks.

use fhl_core::geometry::{gkf_system, rasterize, snowflake, GridDomain, Point, Polyline};

pub fn unit_square() -> Polyline {
    let v = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    Polyline::new(v.iter().map(|&(x, y)| Point::new(x, y)).collect(), true).unwrap()
}

/// Rasterized Koch snowflake.
pub fn koch_grid(depth: u32, resolution: usize) -> GridDomain {
    let sys = gkf_system(3, 1.0 / 3.0).unwrap();
    rasterize(&snowflake(&sys, depth).unwrap().boundary, resolution).unwrap()
}
