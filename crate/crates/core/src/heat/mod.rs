//! Heat content `E(t) = ∫_Ω u(x, t) dx` for `u_t = CΔu` on `Ω`, `u = 0` at
//! `t = 0` and `u = 1` on `∂Ω`.

mod fd;
mod mc;
mod remainder;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::GridMeta;
use crate::series::TimeSeries;

pub use fd::{fd_heat_solve, fd_heat_solve_with, FdOptions};
pub use mc::{mc_heat_content, McDomain, McEstimate, McOptions};
pub use remainder::{decomposition_remainder, remainder_of, remainder_order_fit, RemainderFit};

/// Output density of the default time grid (samples per decade).
pub const DEFAULT_PER_DECADE: usize = 64;

/// Solver settings and statistics recorded with a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeInfo {
    pub scheme: String,
    pub steps: usize,
    pub dt_ratio: f64,
    pub cg_tol: f64,
    pub cg_iterations: usize,
    pub max_cg_iterations_per_step: usize,
    /// Largest excursion of `u` outside `[0, 1]` over the run.
    pub max_principle_violation: f64,
}

/// Geometry provenance, when the grid came from a snowflake.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub n: Option<usize>,
    pub r: Option<f64>,
    pub depth: Option<u32>,
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatManifest {
    #[serde(flatten)]
    pub provenance: Provenance,
    #[serde(rename = "C")]
    pub c: f64,
    pub grid: GridMeta,
    pub scheme: SchemeInfo,
    pub seed: Option<u64>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatRun {
    pub grid: GridMeta,
    pub c: f64,
    pub energy: TimeSeries,
    pub scheme: SchemeInfo,
    pub provenance: Provenance,
    pub wall_time: f64,
}

impl HeatRun {
    pub fn manifest(&self) -> HeatManifest {
        HeatManifest {
            provenance: self.provenance,
            c: self.c,
            grid: self.grid.clone(),
            scheme: self.scheme.clone(),
            seed: None,
            wall_time: self.wall_time,
        }
    }

    /// Writes `t,E` CSV and `<csv>.json` manifest.
    pub fn write(&self, csv: impl AsRef<Path>) -> Result<()> {
        let csv = csv.as_ref();
        self.energy.write_csv(csv, "E")?;
        let mut p = csv.as_os_str().to_owned();
        p.push(".json");
        let mut f = std::fs::File::create(p)?;
        f.write_all(serde_json::to_string_pretty(&self.manifest())?.as_bytes())?;
        Ok(())
    }
}
