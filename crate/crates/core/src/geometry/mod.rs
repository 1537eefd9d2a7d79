//! Planar self-similar systems, generalized von Koch prefractals and their
//! rasterization onto regular grids.

mod gkf;
mod polyline;
mod raster;
mod similitude;

pub use gkf::{
    gkf_system, gkf_system_unrestricted, osculating_residual, prefractal_curve, self_avoidance_bound, snowflake,
    GkfParams, OsculatingResidual, Snowflake, MAX_PREFRACTAL_VERTICES,
};
pub use polyline::{Polyline, SegmentCrossing};
pub use raster::{rasterize, GridDomain, GridMeta};
pub use similitude::{Point, SelfSimilarSystem, Similitude, SystemMaps};
