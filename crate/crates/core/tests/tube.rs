use fhl_core::Complex64;
use fhl_core::Error;
use fhl_core::geometry::{GridDomain, Point};
use fhl_core::geometry::{gkf_system, rasterize, snowflake, Polyline};
use fhl_core::series::TimeSeries;
use fhl_core::series::log_grid;
use fhl_core::tube::*;

fn square() -> Polyline {
    Polyline::new(
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ],
        true,
    )
    .unwrap()
}

#[test]
fn square_distances() {
    let g = rasterize(&square(), 64).unwrap();
    let f = distance_transform(&g);
    let h = g.h();
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let Some(d) = f.get(i, j) else { continue };
            let c = g.center(i, j);
            let exact = c.x.min(c.y).min(1.0 - c.x).min(1.0 - c.y);
            assert!((d - exact).abs() < 1e-12);
            if !g.is_interior(i + 1, j) || !g.is_interior(i - 1, j) {
                assert!(d <= h);
            }
        }
    }
    assert!((f.max() - 0.5).abs() <= h);
}

#[test]
fn matches_brute_force_on_snowflake() {
    let s = snowflake(&gkf_system(3, 1.0 / 3.0).unwrap(), 3).unwrap();
    let g = rasterize(&s.boundary, 200).unwrap();
    let f = distance_transform(&g);
    let mut worst: f64 = 0.0;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            if let Some(d) = f.get(i, j) {
                worst = worst.max((d - s.boundary.distance_to(g.center(i, j))).abs());
            }
        }
    }
    assert!(worst < 1e-3 * g.h(), "{worst}");
}

#[test]
fn mask_only_grid_measures_to_cell_faces() {
    let g = rasterize(&square(), 32).unwrap();
    let bare = GridDomain::from_mask(g.h(), g.origin(), g.nx(), g.ny(), g.interior_mask().to_vec()).unwrap();
    let a = distance_transform(&g);
    let b = distance_transform(&bare);
    for (x, y) in a.interior().zip(b.interior()) {
        assert!((x - y).abs() <= 0.5 * g.h() + 1e-12);
    }
}

#[test]
fn symmetric_cells_share_distances() {
    let g = rasterize(&square(), 50).unwrap();
    let f = distance_transform(&g);
    let (nx, ny) = (g.nx(), g.ny());
    for j in 0..ny {
        for i in 0..nx {
            if let (Some(a), Some(b)) = (f.get(i, j), f.get(nx - 1 - i, j)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn square_tube_function() {
    let g = rasterize(&square(), 400).unwrap();
    let ts = log_grid(0.01, 0.6, 32);
    let run = tube_function(&g, &ts).unwrap();
    for (t, v) in run.volume.iter() {
        let exact = if t >= 0.5 { 1.0 } else { 4.0 * t - 4.0 * t * t };
        assert!((v - exact).abs() < 4.0 * g.h(), "t={t}: {v} vs {exact}");
    }
    assert!(run.volume.v().windows(2).all(|w| w[1] >= w[0]));
    let zero = tube_function(&g, &[0.0]).unwrap();
    assert_eq!(zero.volume.v()[0], 0.0);
}

#[test]
fn square_minkowski_dimension_is_one() {
    let g = rasterize(&square(), 4000).unwrap();
    let run = tube_function(&g, &log_grid(2.0 * g.h(), 0.5, 32)).unwrap();
    let fit = minkowski_fit(&run, 2, Some((2.0 * g.h(), 0.05)), None).unwrap();
    assert!((fit.dim - 1.0).abs() < 0.02, "{fit:?}");
}

#[test]
fn window_must_span_two_decades() {
    let g = rasterize(&square(), 100).unwrap();
    let run = tube_function(&g, &log_grid(0.02, 0.5, 32)).unwrap();
    assert!(matches!(minkowski_fit(&run, 2, None, None), Err(Error::Window(_))));
    // Two periods of log 3 are enough when a period is supplied.
    assert!(minkowski_fit(&run, 2, Some((0.04, 0.4)), Some(3f64.ln())).is_ok());
}

#[test]
fn tube_zeta_of_monomial() {
    let d = 1.3;
    let ts = log_grid(1e-4, 1.0, 128);
    let v: Vec<f64> = ts.iter().map(|t| t.powf(2.0 - d)).collect();
    let run = TubeRun {
        grid: rasterize(&square(), 16).unwrap().meta(),
        volume: TimeSeries::new(ts, v).unwrap(),
        inradius: 0.5,
    };
    let s = Complex64::new(2.0, 3.0);
    let delta = 0.5;
    let z = tube_zeta_eval(&run, d, delta, s).unwrap();
    let want = Complex64::new(delta, 0.0).powc(s - d) / (s - d);
    assert!((z.value - want).norm() < 1e-7 * want.norm(), "{} vs {want}", z.value);
    assert!(tube_zeta_eval(&run, d, delta, Complex64::new(1.0, 0.0)).is_err());
}

#[test]
fn exponent_comparison() {
    let d = 4f64.ln() / 3f64.ln();
    let c = compare_exponents(2, d, (2.0 - d) / 2.0, 0.02);
    assert!(c.consistent && (c.ratio - 2.0).abs() < 1e-12);
    let bad = compare_exponents(2, 1.5, 0.5, 0.02);
    assert!(!bad.consistent && (bad.ratio - 1.0).abs() < 1e-12);
}
