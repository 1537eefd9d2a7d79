use fhl_core::Error;
use fhl_core::series::*;

#[test]
fn rejects_non_increasing_grid() {
    assert!(TimeSeries::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    assert!(TimeSeries::new(vec![1.0], vec![0.0, 0.0]).is_err());
}

#[test]
fn log_grid_endpoints() {
    let g = log_grid(1e-6, 10.0, 16);
    assert_eq!(g.len(), 7 * 16 + 1);
    assert!((g[0] - 1e-6).abs() < 1e-20);
    assert!((g[g.len() - 1] - 10.0).abs() < 1e-12);
}

#[test]
fn interp_log_is_exact_for_log_linear_data() {
    let t = log_grid(1e-3, 1.0, 8);
    let s = TimeSeries::from_fn(t, |t| 2.0 * t.ln() + 1.0).unwrap();
    let x = 0.0123;
    assert!((s.interp_log(x).unwrap() - (2.0 * x.ln() + 1.0)).abs() < 1e-12);
    assert!(matches!(s.interp_log(2.0), Err(Error::Coverage { .. })));
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let s = TimeSeries::from_fn(log_grid(1e-4, 1.0, 7), |t| t.sqrt() / 3.0).unwrap();
    let mut buf = Vec::new();
    s.write_csv_to(&mut buf, "E").unwrap();
    let back = TimeSeries::read_csv_from(&buf[..]).unwrap();
    assert_eq!(s, back);
}

#[test]
fn line_fit_recovers_power_law() {
    let s = TimeSeries::from_fn(log_grid(1e-4, 1.0, 10), |t| 3.0 * t).unwrap();
    let fit = loglog_fit(&s, 0.0, 1.0).unwrap();
    assert!((fit.slope - 1.0).abs() < 1e-12);
    assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn best_window_prefers_the_straight_part() {
    // Pure power law on the first decade only.
    let wobble = |t: f64| if t > 1.5e-5 { 1.0 + 0.2 * (5.0 * t.ln()).sin() } else { 1.0 };
    let s = TimeSeries::from_fn(log_grid(1e-6, 1.0, 16), |t| t.sqrt() * wobble(t)).unwrap();
    let (fit, a, b) = best_window_fit(&s, 1e-6, 1.0, 1.0).unwrap();
    assert!((a - 1e-6).abs() < 1e-18 && (b / a - 10.0).abs() < 1e-9);
    assert!((fit.slope - 0.5).abs() < 1e-12);
    assert!(best_window_fit(&s, 0.5, 1.0, 1.0).is_err());
}

#[test]
fn harmonic_fit_recovers_coefficients() {
    let x: Vec<f64> = (0..200).map(|i| -10.0 + 0.05 * i as f64).collect();
    let p = 9f64.ln();
    let y: Vec<f64> = x
        .iter()
        .map(|&x| 0.3 + 0.37 * x + 0.02 * (2.0 * std::f64::consts::PI * x / p + 0.4).cos())
        .collect();
    let f = fit_harmonic(&x, &y, p).unwrap();
    assert!((f.slope - 0.37).abs() < 1e-10);
    assert!((f.amplitude - 0.02).abs() < 1e-10);
    assert!(f.variance_reduction() > 0.999);
}
