use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use fhl_core::expansion::{
    antiderivative, default_truncation, explicit_formula_series, heat_coefficients, heat_residue_contour,
    logperiodic_fit, ExpansionFit, HeatZeta, CONTOUR_NODES, CONTOUR_RADIUS,
};
use fhl_core::geometry::{
    gkf_system_unrestricted, rasterize, self_avoidance_bound, snowflake, GridDomain, Point, Polyline,
};
use fhl_core::heat::{
    fd_heat_solve_with, mc_heat_content, remainder_of, FdOptions, HeatManifest, McEstimate,
    McOptions,
};
use fhl_core::mellin::{truncated_mellin, ClosedForm};
use fhl_core::series::{best_window_fit, log_grid};
use fhl_core::tube::{compare_exponents, minkowski_fit, tube_function, TubeManifest, TubeRun};
use fhl_core::zeta::{
    admissibility_report, classify_lattice, complex_dimensions, lower_dim_bound, moran_dimension, residue_check,
    ComplexDimensionSet, Criterion, RatioProfile, Window, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL,
};
use fhl_core::{Complex64, Error, TimeSeries};
use serde::Serialize;

use crate::args::*;
use crate::svg::{Chart, Scale, Series};
use crate::{CliError, Outcome, EXIT_OK, EXIT_QUALITY};

type Res<T> = std::result::Result<T, CliError>;

pub fn dispatch(cli: &Cli) -> Res<Outcome> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Dims(a) => dims(a, out),
        Command::Classify(a) => classify(a, out),
        Command::Gkf(a) => gkf(a, out),
        Command::Heat(a) => heat(a, out),
        Command::Mc(a) => mc(a, out),
        Command::Tube(a) => tube(a, out),
        Command::Fit(a) => fit(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Selftest(_) => selftest(out),
    }
}

fn gkf_pair(v: &[f64]) -> Res<(usize, f64)> {
    let n = v[0];
    if n.fract() != 0.0 || n < 3.0 {
        return Err(CliError::Usage(format!("--gkf expects an integer n ≥ 3, got {n}")));
    }
    Ok((n as usize, v[1]))
}

fn profile_of(p: &ProfileArgs) -> Res<RatioProfile> {
    if let Some(v) = &p.gkf {
        let (n, r) = gkf_pair(v)?;
        return Ok(RatioProfile::from_system(&gkf_system_unrestricted(n, r)?)?);
    }
    let list = p
        .ratios
        .as_deref()
        .ok_or_else(|| CliError::Usage("give --gkf N R or --ratios r:m,…".into()))?;
    let mut pairs = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (r, m) = item.split_once(':').unwrap_or((item, "1"));
        let r: f64 = r.trim().parse().map_err(|_| CliError::Usage(format!("bad ratio '{item}'")))?;
        let m: u32 = m.trim().parse().map_err(|_| CliError::Usage(format!("bad multiplicity '{item}'")))?;
        pairs.push((r, m));
    }
    Ok(RatioProfile::new(pairs)?)
}

fn unit_square() -> Polyline {
    let v = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    Polyline::new(v.iter().map(|&(x, y)| Point::new(x, y)).collect(), true).expect("square is a valid polygon")
}

struct Domain {
    grid: GridDomain,
    gkf: Option<(usize, f64)>,
    depth: Option<u32>,
}

fn build_domain(g: &GeomArgs) -> Res<Domain> {
    if let Some(stem) = &g.grid {
        return Ok(Domain {
            grid: GridDomain::import(stem)?,
            gkf: None,
            depth: None,
        });
    }
    if g.square {
        return Ok(Domain {
            grid: rasterize(&unit_square(), g.res)?,
            gkf: None,
            depth: None,
        });
    }
    let v = g
        .gkf
        .as_ref()
        .ok_or_else(|| CliError::Usage("give --gkf N R, --square or --grid STEM".into()))?;
    let (n, r) = gkf_pair(v)?;
    let bound = self_avoidance_bound(n);
    if r >= bound {
        eprintln!("warning: r = {r} violates the self-avoidance bound {bound:.6} for n = {n}");
    }
    let sys = gkf_system_unrestricted(n, r)?;
    let flake = snowflake(&sys, g.depth)?;
    eprintln!("snowflake ({n}, {r}) depth {}: {} vertices", g.depth, flake.boundary.vertices().len());
    Ok(Domain {
        grid: rasterize(&flake.boundary, g.res)?,
        gkf: Some((n, r)),
        depth: Some(g.depth),
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Res<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

fn points(s: &TimeSeries) -> Vec<(f64, f64)> {
    s.iter().collect()
}

fn window_pair(v: &Option<Vec<f64>>) -> Res<Option<(f64, f64)>> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[lo, hi]) if lo < hi => Ok(Some((lo, hi))),
        Some(w) => Err(CliError::Usage(format!("a window is `lo,hi` with lo < hi, got {w:?}"))),
    }
}

/// `(λ, ln(1/λ))` for lattice profiles.
fn lattice_generator(profile: &RatioProfile) -> Option<f64> {
    let c = classify_lattice(profile, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL);
    if c.is_lattice() {
        c.generator
    } else {
        None
    }
}

fn dims(a: &DimsArgs, out: &Path) -> Res<Outcome> {
    let profile = profile_of(&a.profile)?;
    let d = moran_dimension(&profile);
    let dl = lower_dim_bound(&profile);
    let window = Window::new(a.sigma_min.unwrap_or(dl - 1.0), a.sigma_max.unwrap_or(d + 1.0), a.t_max)?;
    let class = classify_lattice(&profile, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL);
    let set = complex_dimensions(&profile, window, &class)?;
    println!("D = {d:.12}  D_l = {dl:.12}  {:?}", class.kind);
    println!("{} poles ({:?}) in [{}, {}] × ±{}", set.count(), set.method, window.sigma_min, window.sigma_max, window.t_max);
    for p in &set.poles {
        println!("  {:+.10} {:+.10}i  mult {}", p.omega.re, p.omega.im, p.multiplicity);
    }
    let (json, csv, svg) = (out.join("dims.json"), out.join("dims.csv"), out.join("dims.svg"));
    set.write_json(&json)?;
    set.write_csv(&csv)?;
    Chart {
        title: format!("complex dimensions (D = {d:.6})"),
        x_label: "Re ω".into(),
        y_label: "Im ω".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        series: vec![Series::dots("poles", set.poles.iter().map(|p| (p.omega.re, p.omega.im)).collect())],
    }
    .write(&svg)?;
    let status = if set.undecided.is_empty() {
        EXIT_OK
    } else {
        eprintln!("warning: {} boxes could not be decided", set.undecided.len());
        EXIT_QUALITY
    };
    Ok(Outcome {
        outputs: vec![json, csv, svg],
        status,
        ..Outcome::default()
    })
}

fn classify(a: &ClassifyArgs, out: &Path) -> Res<Outcome> {
    #[derive(Serialize)]
    struct Report {
        ratios: Vec<(f64, u32)>,
        dimension: f64,
        lower_dim_bound: f64,
        lattice: fhl_core::zeta::LatticeClassification,
        admissibility: fhl_core::zeta::AdmissibilityReport,
    }
    let profile = profile_of(&a.profile)?;
    let report = Report {
        ratios: profile.pairs().collect(),
        dimension: moran_dimension(&profile),
        lower_dim_bound: lower_dim_bound(&profile),
        lattice: classify_lattice(&profile, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL),
        admissibility: admissibility_report(&profile, a.sigma0)?,
    };
    println!(
        "D = {:.12}  D_l = {:.12}  {:?}  criterion {:?}",
        report.dimension, report.lower_dim_bound, report.lattice.kind, report.admissibility.criterion
    );
    println!("{}", report.admissibility.notes);
    let path = out.join("classify.json");
    write_json(&path, &report)?;
    Ok(Outcome {
        outputs: vec![path],
        status: if report.admissibility.criterion == Criterion::None { EXIT_QUALITY } else { EXIT_OK },
        ..Outcome::default()
    })
}

fn gkf(a: &GkfArgs, out: &Path) -> Res<Outcome> {
    #[derive(Serialize)]
    struct Info {
        n: usize,
        r: f64,
        ell: f64,
        depth: u32,
        dimension: f64,
        self_avoidance_bound: f64,
        warning: Option<String>,
        vertices: usize,
        perimeter: f64,
        area: f64,
    }
    let (n, r) = gkf_pair(&a.gkf)?;
    let bound = self_avoidance_bound(n);
    if r >= bound {
        eprintln!("warning: r = {r} violates the self-avoidance bound {bound:.6} for n = {n}");
    }
    let sys = gkf_system_unrestricted(n, r)?;
    let flake = snowflake(&sys, a.depth)?;
    let b = &flake.boundary;
    let info = Info {
        n,
        r,
        ell: (1.0 - r) / 2.0,
        depth: a.depth,
        dimension: moran_dimension(&RatioProfile::from_system(&sys)?),
        self_avoidance_bound: bound,
        warning: flake.warning.clone(),
        vertices: b.vertices().len(),
        perimeter: b.perimeter(),
        area: b.area(),
    };
    let (csv, json, svg) = (out.join("gkf.csv"), out.join("gkf.json"), out.join("gkf.svg"));
    b.write_csv(&csv)?;
    write_json(&json, &info)?;
    let mut outline: Vec<(f64, f64)> = b.vertices().iter().map(|p| (p.x, p.y)).collect();
    outline.push(outline[0]);
    Chart {
        title: format!("GKF({n}, {r}) depth {}", a.depth),
        x_label: "x".into(),
        y_label: "y".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        series: vec![Series::line("boundary", outline)],
    }
    .write(&svg)?;
    let mut outputs = vec![csv, json, svg];
    if let Some(res) = a.res {
        let grid = rasterize(b, res)?;
        let stem = out.join("gkf_grid");
        grid.export(&stem)?;
        println!("grid: {} interior cells, h = {:e}", grid.cell_count(), grid.h());
        outputs.push(stem.with_extension("pgm"));
        outputs.push(stem.with_extension("json"));
    }
    println!("{} vertices, area {:.12}, D = {:.12}", info.vertices, info.area, info.dimension);
    Ok(Outcome {
        outputs,
        ..Outcome::default()
    })
}

fn heat(a: &HeatArgs, out: &Path) -> Res<Outcome> {
    let dom = build_domain(&a.geom)?;
    let g = &dom.grid;
    eprintln!("grid: {} cells, h = {:e}", g.cell_count(), g.h());
    let ts = log_grid(a.t_min, a.t_max, a.per_decade);
    let opts = FdOptions {
        dt_ratio: a.dt_ratio,
        cg_tol: a.cg_tol,
        ..FdOptions::default()
    };
    let started = std::time::Instant::now();
    let mut next_report = a.t_min;
    let mut run = fd_heat_solve_with(g, a.c, &ts, opts, |t, e| {
        if t >= next_report {
            eprintln!("t = {t:.3e}  E = {e:.6e}  ({:.1} s)", started.elapsed().as_secs_f64());
            next_report = t * 10.0 * (1.0 - 1e-9);
        }
    })?;
    if let Some((n, r)) = dom.gkf {
        run.provenance.n = Some(n);
        run.provenance.r = Some(r);
    }
    run.provenance.depth = dom.depth;
    let (csv, svg) = (out.join("heat.csv"), out.join("heat.svg"));
    run.write(&csv)?;
    Chart {
        title: "heat content".into(),
        x_label: "t".into(),
        y_label: "E(t)".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Log,
        series: vec![Series::line("E", points(&run.energy))],
    }
    .write(&svg)?;
    let s = &run.scheme;
    println!(
        "{} steps, {} CG iterations (max {} per step), {:.1} s",
        s.steps, s.cg_iterations, s.max_cg_iterations_per_step, run.wall_time
    );
    let status = if s.max_principle_violation > 1e-8 {
        eprintln!("warning: maximum principle violated by {:e}", s.max_principle_violation);
        EXIT_QUALITY
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        inputs: a.geom.grid.iter().map(|s| s.with_extension("pgm")).collect(),
        outputs: vec![csv.clone(), sidecar(&csv), svg],
        status,
        ..Outcome::default()
    })
}

fn mc(a: &McArgs, out: &Path) -> Res<Outcome> {
    let dom = build_domain(&a.geom)?;
    let opts = McOptions {
        seed: a.seed,
        bridge: a.bridge,
    };
    let mut rows: Vec<McEstimate> = Vec::new();
    for &t in &a.t {
        let dt = a.dt.unwrap_or(t / 200.0);
        let e = mc_heat_content(&dom.grid, a.c, t, a.paths, dt, opts)?;
        println!("t = {t:e}  E = {:.6e} ± {:.2e}  ({} paths)", e.estimate, e.stderr, e.n_paths);
        rows.push(e);
    }
    let (csv, json) = (out.join("mc.csv"), out.join("mc.json"));
    let mut text = String::from("t,estimate,stderr,n_paths,absorbed\n");
    for e in &rows {
        text.push_str(&format!("{:e},{:e},{:e},{},{}\n", e.t, e.estimate, e.stderr, e.n_paths, e.absorbed));
    }
    std::fs::write(&csv, text)?;
    write_json(&json, &rows)?;
    Ok(Outcome {
        outputs: vec![csv, json],
        seed: Some(a.seed),
        ..Outcome::default()
    })
}

fn tube(a: &TubeArgs, out: &Path) -> Res<Outcome> {
    let dom = build_domain(&a.geom)?;
    let g = &dom.grid;
    let profile = match dom.gkf {
        Some((n, r)) => Some(RatioProfile::from_system(&gkf_system_unrestricted(n, r)?)?),
        None => None,
    };
    let t_min = a.t_min.unwrap_or(2.0 * g.h());
    // A depth-d prefractal is only self-similar between its smallest segment ℓ and ℓ/r_min².
    let prefractal = match (&profile, dom.depth, &a.window) {
        (Some(p), Some(depth), None) => {
            let r_min = p.ratios().iter().copied().fold(f64::INFINITY, f64::min);
            Some((r_min.powi(depth as i32), 1.0 / r_min))
        }
        _ => None,
    };
    let (ts, window) = match prefractal {
        Some((ell, q)) => {
            let step = q.ln() / a.per_decade as f64;
            let j0 = ((t_min / ell).ln() / step).ceil() as i64;
            let j1 = ((a.t_max / ell).ln() / step).floor() as i64;
            let ts: Vec<f64> = (j0..=j1).map(|j| ell * (j as f64 * step).exp()).collect();
            eprintln!("fitting the prefractal range [{ell:e}, {:e}]", ell * q * q);
            (ts, Some((ell * (1.0 - 1e-9), ell * q * q * (1.0 + 1e-9))))
        }
        None => (log_grid(t_min, a.t_max, a.per_decade), window_pair(&a.window)?),
    };
    let run = tube_function(g, &ts)?;
    let period = a
        .period
        .or_else(|| lattice_generator(profile.as_ref()?).map(|l| (1.0 / l).ln()));
    let (csv, json, svg) = (out.join("tube.csv"), out.join("tube_fit.json"), out.join("tube.svg"));
    run.write(&csv)?;
    Chart {
        title: "tube function".into(),
        x_label: "t".into(),
        y_label: "V(t)".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Log,
        series: vec![Series::line("V", points(&run.volume))],
    }
    .write(&svg)?;
    let mut outputs = vec![csv.clone(), sidecar(&csv), svg];
    let status = match minkowski_fit(&run, 2, window, period) {
        Ok(fit) => {
            println!("Minkowski dimension {:.6} (slope {:.6}, r² {:.6}) on [{:e}, {:e}]", fit.dim, fit.slope, fit.r2, fit.t_lo, fit.t_hi);
            if let Some(h) = &fit.harmonic {
                println!("harmonic at period {:.6}: amplitude {:.3e}", h.period, h.amplitude);
            }
            write_json(&json, &fit)?;
            outputs.push(json);
            EXIT_OK
        }
        Err(e @ Error::Window(_)) => {
            eprintln!("warning: {e}");
            EXIT_QUALITY
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome {
        outputs,
        status,
        ..Outcome::default()
    })
}

fn fit(a: &FitArgs, out: &Path) -> Res<Outcome> {
    let e = TimeSeries::read_csv(&a.heat)?;
    let profile = profile_of(&a.profile)?;
    let d = moran_dimension(&profile);
    let lead = (2.0 - d) / 2.0;
    let lambda = lattice_generator(&profile);
    let truncation = a
        .truncation
        .or(lambda.map(default_truncation))
        .unwrap_or(f64::INFINITY);
    let r_min = profile.ratios().iter().copied().fold(f64::INFINITY, f64::min);
    let mut delta = a.delta.unwrap_or(e.t_max() * r_min * r_min);
    let mut inputs = vec![a.heat.clone()];
    let floor = a.r_floor.or_else(|| {
        let m: HeatManifest = serde_json::from_str(&std::fs::read_to_string(sidecar(&a.heat)).ok()?).ok()?;
        let raster = 100.0 * m.grid.h * m.grid.h / m.c;
        let ell = m.provenance.depth.map_or(0.0, |d| r_min.powi(2 * d as i32));
        Some(raster.max(ell))
    });

    let mut fitted: Option<ExpansionFit> = None;
    let poles = if a.fit_coefficients {
        let l = lambda.ok_or_else(|| CliError::Usage("--fit-coefficients needs a lattice profile".into()))?;
        let period = 2.0 * (1.0 / l).ln();
        // Two periods from the prefractal scale up, when known.
        let window = window_pair(&a.window)?.or(floor.map(|f| (f, f * (2.0 * period).exp() * (1.0 + 1e-9))));
        let f = logperiodic_fit(&e, d, period, a.harmonics, window)?;
        if let Some(w) = window {
            delta = a.delta.unwrap_or(w.1);
        }
        let poles = f.poles.clone();
        fitted = Some(f);
        poles
    } else {
        let dims_path = a
            .dims
            .as_ref()
            .ok_or_else(|| CliError::Usage("--dims is required unless --fit-coefficients is given".into()))?;
        inputs.push(dims_path.clone());
        let dims = ComplexDimensionSet::read_json(dims_path)?;
        let r = remainder_of(&profile, &e)?;
        let r = match floor {
            Some(f) => {
                eprintln!("remainder used on t ≥ {f:e}");
                let w = r.window(f, r.t_max());
                if w.len() < 4 {
                    return Err(Error::Window(format!(
                        "remainder floor {f:e} leaves no data below {:e}; lower --r-floor or extend the heat run",
                        r.t_max()
                    ))
                    .into());
                }
                w
            }
            None => r,
        };
        // R(t) = O(t) on snowflake domains. The measured remainder is self-similar
        // over too short a range to fit its order.
        let sigma_r = a.sigma_r.unwrap_or(0.0);
        delta = a.delta.unwrap_or(r.t_max());
        eprintln!("δ = {delta:e}, σ_R = {sigma_r:.4}");
        let hz = HeatZeta::from_series(profile.clone(), &e, &r, delta, sigma_r)?;
        let coeffs = heat_coefficients(&hz, &dims)?;
        for c in &coeffs {
            print!("ω = {:+.8}{:+.8}i  r = {:+.6e}{:+.6e}i", c.omega.re, c.omega.im, c.value.re, c.value.im);
            if a.contour {
                let z = heat_residue_contour(&hz, c.omega, CONTOUR_RADIUS, CONTOUR_NODES)?;
                print!("  contour rel. diff {:.2e}", (z - c.value).norm() / c.value.norm().max(1e-300));
            }
            println!();
        }
        coeffs
    };

    let data = if a.k == 0 { e.clone() } else { antiderivative(&e, a.k, lead)? };
    // The expansion describes the prefractal between its smallest scale and δ.
    let (lo, hi) = window_pair(&a.window)?.unwrap_or_else(|| match floor {
        Some(f) if f < delta => (f, delta),
        _ => (data.t_min(), data.t_max()),
    });
    let windowed = data.window(lo, hi);
    if windowed.len() < 2 {
        return Err(Error::Window(format!("no samples in [{lo:e}, {hi:e}]")).into());
    }
    let mut result = ExpansionFit::from_coefficients(2, a.k, Some(delta), truncation, poles, &windowed)?;
    if let Some(f) = fitted {
        result.period = f.period;
        result.harmonics = f.harmonics;
    }
    let worst = result.max_relative_residual(&windowed);
    println!("{} poles, max relative residual {worst:.3e} on [{:e}, {:e}]", result.poles.len(), windowed.t_min(), windowed.t_max());

    let (json, csv, svg) = (out.join("fit.json"), out.join("fit_residual.csv"), out.join("fit.svg"));
    result.write_residual(&csv)?;
    result.write_json(&json)?;
    let model = explicit_formula_series(&result.poles, a.k, 2, windowed.t(), truncation)?;
    Chart {
        title: format!("measured vs reconstructed (k = {})", a.k),
        x_label: "t".into(),
        y_label: if a.k == 0 { "E(t)".into() } else { format!("E^[{}](t)", a.k) },
        x_scale: Scale::Log,
        y_scale: Scale::Log,
        series: vec![
            Series::line("measured", points(&windowed)),
            Series::line("explicit formula", points(&model)),
            Series::line("|residual|", result.residual.as_ref().map(|r| r.iter().map(|(t, v)| (t, v.abs())).collect()).unwrap_or_default()),
        ],
    }
    .write(&svg)?;
    Ok(Outcome {
        inputs,
        outputs: vec![json, csv, svg],
        status: if worst <= a.max_residual { EXIT_OK } else { EXIT_QUALITY },
        ..Outcome::default()
    })
}

fn read_tube(path: &Path) -> Res<TubeRun> {
    let volume = TimeSeries::read_csv(path)?;
    let m: TubeManifest = serde_json::from_str(&std::fs::read_to_string(sidecar(path))?)?;
    Ok(TubeRun {
        grid: m.grid,
        volume,
        inradius: m.inradius,
    })
}

fn compare(a: &CompareArgs, out: &Path) -> Res<Outcome> {
    let mut inputs = Vec::new();
    let tube_dim = match (a.tube_dim, &a.tube) {
        (Some(d), _) => d,
        (None, Some(p)) => {
            inputs.push(p.clone());
            let fit = minkowski_fit(&read_tube(p)?, a.n, window_pair(&a.tube_window)?, a.period)?;
            println!("tube: dimension {:.6} on [{:e}, {:e}]", fit.dim, fit.t_lo, fit.t_hi);
            fit.dim
        }
        _ => return Err(CliError::Usage("give --tube or --tube-dim".into())),
    };
    let heat_slope = match (a.heat_slope, &a.heat) {
        (Some(s), _) => s,
        (None, Some(p)) => {
            inputs.push(p.clone());
            let e = TimeSeries::read_csv(p)?;
            let floor = std::fs::read_to_string(sidecar(p))
                .ok()
                .and_then(|s| serde_json::from_str::<HeatManifest>(&s).ok())
                .map(|m| 100.0 * m.grid.h * m.grid.h / m.c)
                .unwrap_or(100.0 * e.t_min());
            let (lo, hi) = window_pair(&a.heat_window)?.unwrap_or((floor.max(e.t_min()), e.t_max()));
            let (f, wlo, whi) = best_window_fit(&e, lo, hi, 1.0)?;
            println!("heat: slope {:.6} (r² {:.6}) on [{wlo:e}, {whi:e}]", f.slope, f.r2);
            f.slope
        }
        _ => return Err(CliError::Usage("give --heat or --heat-slope".into())),
    };
    let cmp = compare_exponents(a.n, tube_dim, heat_slope, a.tolerance);
    println!(
        "tube slope {:.6}, heat slope {:.6}, ratio {:.4}: {}",
        cmp.tube_slope,
        cmp.heat_slope,
        cmp.ratio,
        if cmp.consistent { "consistent" } else { "INCONSISTENT" }
    );
    let path = out.join("compare.json");
    write_json(&path, &cmp)?;
    Ok(Outcome {
        inputs,
        outputs: vec![path],
        status: if cmp.consistent { EXIT_OK } else { EXIT_QUALITY },
        ..Outcome::default()
    })
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String), Error>) -> Check {
    match f() {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check {
            name,
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn koch() -> Result<RatioProfile, Error> {
    RatioProfile::from_system(&gkf_system_unrestricted(3, 1.0 / 3.0)?)
}

fn selftest(out: &Path) -> Res<Outcome> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let checks = vec![
        check("moran dimension", || {
            let d = moran_dimension(&koch()?);
            Ok(((d - 4f64.ln() / 3f64.ln()).abs() < 1e-10, format!("D = {d:.12}")))
        }),
        check("lattice poles", || {
            let p = koch()?;
            let class = classify_lattice(&p, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL);
            let set = complex_dimensions(&p, Window::new(0.0, 2.0, 20.0)?, &class)?;
            let worst = set
                .poles
                .iter()
                .map(|q| (residue_check(&p, q.omega).unwrap_or(c(f64::NAN, 0.0)) - q.residue.unwrap_or_default()).norm())
                .fold(0.0, f64::max);
            Ok((set.count() == 7 && worst < 1e-8, format!("{} poles, residue mismatch {worst:.1e}", set.count())))
        }),
        check("lower dimension bound", || {
            let p = RatioProfile::from_system(&gkf_system_unrestricted(4, 0.25)?)?;
            let dl = lower_dim_bound(&p);
            Ok((dl.abs() < 1e-12, format!("D_l = {dl:e}")))
        }),
        check("mellin monomial", || {
            let f = ClosedForm::new(|t: f64| t * t, -2.0);
            let v = truncated_mellin(&f, 0.0, 1.0, c(1.0, 0.0))?.value;
            Ok(((v - 1.0 / 3.0).norm() < 1e-10, format!("{v}")))
        }),
        check("heat residue", || {
            let p = koch()?;
            let d = moran_dimension(&p);
            let hz = HeatZeta::new(
                p,
                Box::new(ClosedForm::new(move |t: f64| t.powf(-d / 2.0), d / 2.0)),
                Box::new(ClosedForm::new(|_| 0.0, 0.0)),
                1.0,
            )?;
            let r = fhl_core::expansion::heat_residue(&hz, c(d, 0.0))?;
            let z = heat_residue_contour(&hz, c(d, 0.0), CONTOUR_RADIUS, CONTOUR_NODES)?;
            Ok(((r - 1.0).norm() < 1e-8 && (z - r).norm() < 1e-6, format!("r_D = {r}, contour {z}")))
        }),
        check("explicit formula", || {
            let d = 4f64.ln() / 3f64.ln();
            let w = c(d, TAU / 3f64.ln());
            let mk = |o: Complex64, v: Complex64| fhl_core::expansion::HeatCoefficient {
                omega: o,
                value: v,
                multiplicity: 1,
                source: fhl_core::expansion::CoefficientSource::Analytic,
            };
            let cs = [mk(c(d, 0.0), c(1.0, 0.0)), mk(w, c(0.02, 0.01)), mk(w.conj(), c(0.02, -0.01))];
            let v = fhl_core::expansion::explicit_formula_eval(&cs, 0, 2, 1e-3, f64::INFINITY)?;
            Ok((v.is_finite() && v > 0.0, format!("E(1e-3) = {v:.6e}")))
        }),
        check("admissibility", || {
            let lat = admissibility_report(&koch()?, 0.0)?.criterion;
            let low = admissibility_report(&RatioProfile::from_system(&gkf_system_unrestricted(5, 0.2)?)?, 0.0)?.criterion;
            Ok((lat == Criterion::Lattice && low == Criterion::LowerDim, format!("{lat:?}, {low:?}")))
        }),
        check("heat solver", || {
            let g = rasterize(&unit_square(), 64)?;
            let run = fd_heat_solve_with(&g, 1.0, &log_grid(1e-2, 1e-1, 8), FdOptions::default(), |_, _| {})?;
            let e = run.energy.v()[0];
            Ok((e > 0.0 && e < 1.0 && run.scheme.max_principle_violation < 1e-8, format!("E(0.01) = {e:.6}")))
        }),
        check("monte carlo", || {
            let sq = unit_square();
            let e = mc_heat_content(&sq, 1.0, 0.01, 20_000, 1e-4, McOptions::default())?;
            Ok(((e.estimate - 0.4).abs() < 0.05, format!("E(0.01) = {:.4} ± {:.4}", e.estimate, e.stderr)))
        }),
    ];
    let mut failed = 0;
    for ch in &checks {
        println!("{} {:<24} {}", if ch.pass { "PASS" } else { "FAIL" }, ch.name, ch.detail);
        failed += usize::from(!ch.pass);
    }
    let path = out.join("selftest.json");
    write_json(&path, &checks)?;
    Ok(Outcome {
        outputs: vec![path],
        status: if failed == 0 { EXIT_OK } else { EXIT_QUALITY },
        ..Outcome::default()
    })
}
