use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "fhl", version, about = "Complex dimensions and heat content of generalized von Koch snowflakes")]
pub struct Cli {
    /// `key = value` file supplying any flag; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for all outputs.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Poles of the scaling zeta function in a window.
    #[command(args_override_self = true)]
    Dims(DimsArgs),
    /// Lattice type, dimension bounds and admissibility.
    #[command(args_override_self = true)]
    Classify(ClassifyArgs),
    /// Build a snowflake prefractal and write its boundary.
    #[command(args_override_self = true)]
    Gkf(GkfArgs),
    /// Finite-difference heat content.
    #[command(args_override_self = true)]
    Heat(HeatArgs),
    /// Monte Carlo heat content.
    #[command(args_override_self = true)]
    Mc(McArgs),
    /// Tube function and Minkowski-dimension fit.
    #[command(args_override_self = true)]
    Tube(TubeArgs),
    /// Residues and explicit-formula reconstruction of a heat run.
    #[command(args_override_self = true)]
    Fit(FitArgs),
    /// Tube versus heat exponent comparison.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
    /// Quick built-in checks.
    #[command(args_override_self = true)]
    Selftest(SelftestArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dims(_) => "dims",
            Command::Classify(_) => "classify",
            Command::Gkf(_) => "gkf",
            Command::Heat(_) => "heat",
            Command::Mc(_) => "mc",
            Command::Tube(_) => "tube",
            Command::Fit(_) => "fit",
            Command::Compare(_) => "compare",
            Command::Selftest(_) => "selftest",
        }
    }
}

/// A scaling-ratio profile, from a snowflake or an explicit list.
#[derive(Debug, Args, Serialize, Clone)]
pub struct ProfileArgs {
    /// Generalized von Koch parameters `n r`.
    #[arg(long, num_args = 2, value_names = ["N", "R"], conflicts_with = "ratios")]
    pub gkf: Option<Vec<f64>>,
    /// Ratio list `r:m,r:m,…`.
    #[arg(long)]
    pub ratios: Option<String>,
}

/// A planar domain.
#[derive(Debug, Args, Serialize, Clone)]
pub struct GeomArgs {
    #[arg(long, num_args = 2, value_names = ["N", "R"], conflicts_with_all = ["square", "grid"])]
    pub gkf: Option<Vec<f64>>,
    /// Unit square.
    #[arg(long, conflicts_with = "grid")]
    pub square: bool,
    /// Previously exported grid (path stem).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// Cells per unit length.
    #[arg(long, default_value_t = 512)]
    pub res: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DimsArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Half-height of the window.
    #[arg(long = "T", default_value_t = 20.0)]
    pub t_max: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_max: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Growth order of the remainder.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma0: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GkfArgs {
    #[arg(long, num_args = 2, value_names = ["N", "R"], required = true)]
    pub gkf: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// Also rasterize and export the grid at this resolution.
    #[arg(long)]
    pub res: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct HeatArgs {
    #[command(flatten)]
    pub geom: GeomArgs,
    /// Diffusivity.
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = fhl_core::heat::DEFAULT_PER_DECADE)]
    pub per_decade: usize,
    /// Time step as a fraction of `t`.
    #[arg(long, default_value_t = 0.02)]
    pub dt_ratio: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub cg_tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    #[command(flatten)]
    pub geom: GeomArgs,
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-2,1e-1")]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Step; defaults to `t/200`.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Brownian-bridge crossing correction.
    #[arg(long)]
    pub bridge: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct TubeArgs {
    #[command(flatten)]
    pub geom: GeomArgs,
    /// Smallest distance; defaults to `2h`.
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub t_max: f64,
    /// Samples per decade; per factor `1/r_min` on snowflakes.
    #[arg(long, default_value_t = 32)]
    pub per_decade: usize,
    /// Fit window `lo,hi`; defaults to `[ℓ, ℓ/r_min²]` on snowflakes, ℓ the smallest segment.
    #[arg(long, value_delimiter = ',')]
    pub window: Option<Vec<f64>>,
    /// Multiplicative period in `ln t`; defaults to `ln(1/λ)` for lattice snowflakes.
    #[arg(long)]
    pub period: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Heat content CSV (`t,E`).
    #[arg(long)]
    pub heat: PathBuf,
    /// Complex dimensions JSON from `dims`.
    #[arg(long)]
    pub dims: Option<PathBuf>,
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Antiderivative order.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Largest `|Im ω|` kept; defaults to three lattice periods.
    #[arg(long = "T")]
    pub truncation: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Growth order of `R(t)/t`; 0 for snowflake domains.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_r: Option<f64>,
    /// Smallest time at which the measured remainder is used; below it `R` is
    /// closed by its `O(t^{1−σ_R})` tail. Defaults to the larger of the
    /// prefractal scale ℓ² and `100h²/C` when the heat sidecar is present.
    #[arg(long)]
    pub r_floor: Option<f64>,
    /// Least-squares coefficients instead of residues.
    #[arg(long)]
    pub fit_coefficients: bool,
    /// Harmonics used with `--fit-coefficients`.
    #[arg(long, default_value_t = 3)]
    pub harmonics: usize,
    /// Cross-check every residue by contour integration.
    #[arg(long)]
    pub contour: bool,
    /// Residual window `lo,hi`.
    #[arg(long, value_delimiter = ',')]
    pub window: Option<Vec<f64>>,
    /// Largest acceptable relative residual in the window.
    #[arg(long, default_value_t = 0.05)]
    pub max_residual: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// Tube CSV from `tube`.
    #[arg(long, required_unless_present = "tube_dim")]
    pub tube: Option<PathBuf>,
    #[arg(long)]
    pub tube_dim: Option<f64>,
    /// Tube fit window `lo,hi`.
    #[arg(long, value_delimiter = ',')]
    pub tube_window: Option<Vec<f64>>,
    /// Multiplicative period of the tube oscillation in `ln t`.
    #[arg(long)]
    pub period: Option<f64>,
    /// Heat CSV from `heat`.
    #[arg(long, required_unless_present = "heat_slope")]
    pub heat: Option<PathBuf>,
    #[arg(long)]
    pub heat_slope: Option<f64>,
    /// Range searched for the cleanest one-decade heat window.
    #[arg(long, value_delimiter = ',')]
    pub heat_window: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    /// Ambient dimension.
    #[arg(long = "N", default_value_t = 2)]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SelftestArgs {}
