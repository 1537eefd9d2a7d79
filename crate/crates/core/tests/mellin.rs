mod transform {
    use fhl_core::Complex64;
    use fhl_core::Error;
    use fhl_core::mellin::*;
    use fhl_core::series::log_grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_transforms() {
        let sq = ClosedForm::new(|t: f64| t * t, -2.0);
        let v = truncated_mellin(&sq, 0.0, 1.0, c(1.0, 0.0)).unwrap();
        assert!((v.value - 1.0 / 3.0).norm() < 1e-10 / 3.0);
        assert!(v.quadrature_error >= 0.0);
        let one = ClosedForm::new(|_| 1.0, 0.0);
        for s in [c(0.5, 0.0), c(1.0, 4.0), c(2.5, -30.0)] {
            let d = 1.7;
            let exact = Complex64::new(d, 0.0).powc(s) / s;
            let v = truncated_mellin(&one, 0.0, d, s).unwrap().value;
            assert!((v - exact).norm() < 1e-10 * exact.norm(), "{s}");
        }
        let inv_sqrt = ClosedForm::new(|t: f64| t.powf(-0.5), 0.5);
        let v = truncated_mellin(&inv_sqrt, 0.0, 1.0, c(2.0, 0.0)).unwrap().value;
        assert!((v - 2.0 / 3.0).norm() < 1e-10);
    }

    #[test]
    fn divergence_is_reported() {
        let inv_sqrt = ClosedForm::new(|t: f64| t.powf(-0.5), 0.5);
        assert!(matches!(
            truncated_mellin(&inv_sqrt, 0.0, 1.0, c(0.5, 1.0)),
            Err(Error::Divergent { .. })
        ));
        assert!(truncated_mellin(&inv_sqrt, 0.1, 1.0, c(0.5, 1.0)).is_ok());
    }

    #[test]
    fn sampled_monomial_with_tail() {
        let t = log_grid(1e-4, 2.0, 64);
        let f = SampledFunction::new(t.clone(), t.iter().map(|t| t.powf(-0.5)).collect(), 0.5).unwrap();
        for s in [c(2.0, 0.0), c(1.0, 3.0)] {
            let exact = Complex64::new(1.5, 0.0).powc(s - 0.5) / (s - 0.5);
            let v = truncated_mellin(&f, 0.0, 1.5, s).unwrap().value;
            assert!((v - exact).norm() < 1e-7 * exact.norm(), "{s}: {v} vs {exact}");
        }
        assert!(matches!(truncated_mellin(&f, 0.0, 3.0, c(2.0, 0.0)), Err(Error::Coverage { .. })));
    }

    #[test]
    fn scaling_identity() {
        let lin = ClosedForm::new(|t: f64| t, -1.0);
        for s in [c(1.0, 0.0), c(2.0, 3.0)] {
            assert!(scaling_identity_residual(&lin, 2.0, 1.0, s).unwrap() < 1e-8);
            assert!(scaling_identity_residual(&lin, 1.0, 1.0, s).unwrap() < 1e-14);
        }
        // Sampled, log-periodic data.
        let t = log_grid(1e-5, 10.0, 64);
        let v: Vec<f64> = t
            .iter()
            .map(|&t: &f64| t.powf(0.37) * (2.0 + (std::f64::consts::TAU * t.ln() / 9f64.ln()).sin()))
            .collect();
        let f = SampledFunction::new(t, v, -0.37).unwrap();
        assert!(scaling_identity_residual(&f, 1.0 / 3.0, 1.0, c(2.0, 3.0)).unwrap() < 1e-6);
    }

    #[test]
    fn holomorphy_proxy() {
        let f = ClosedForm::new(|t: f64| (1.0 + t).ln() / t.sqrt(), -0.5);
        let h = 1e-3;
        let s = c(0.4, 1.3);
        let m = |z: Complex64| truncated_mellin(&f, 0.0, 1.0, z).unwrap().value;
        let dx = (m(s + h) - m(s - h)) / (2.0 * h);
        let dy = (m(s + c(0.0, h)) - m(s - c(0.0, h))) / (2.0 * h);
        // Cauchy–Riemann: ∂_y = i ∂_x.
        assert!((dy - c(0.0, 1.0) * dx).norm() < 1e-6);
    }

    #[test]
    fn bounded_in_vertical_strips() {
        let f = ClosedForm::new(|t: f64| (-t).exp(), 0.0);
        let taus: Vec<Complex64> = (-100..=100).map(|k| c(0.5, k as f64)).collect();
        let sup = mellin_batch(&f, 0.0, 1.0, &taus)
            .into_iter()
            .map(|v| v.unwrap().value.norm())
            .fold(0.0, f64::max);
        // |M(σ+iτ)| ≤ M(σ) for nonnegative f.
        let bound = truncated_mellin(&f, 0.0, 1.0, c(0.5, 0.0)).unwrap().value.re;
        assert!(sup <= bound * (1.0 + 1e-10));
    }
}

mod quad {
    use fhl_core::Complex64;
    use fhl_core::mellin::*;

    #[test]
    fn polynomials_are_exact() {
        let (v, e) = gk15(&|x| Complex64::new(x.powi(20), 0.0), 0.0, 1.0);
        assert!((v.re - 1.0 / 21.0).abs() < 1e-15);
        assert!(e >= 0.0);
    }

    #[test]
    fn oscillatory_integral() {
        let f = |x: f64| Complex64::new(0.0, 50.0 * x).exp();
        let breaks: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
        let (v, _) = integrate(&f, &breaks, QuadOptions::default());
        let exact = (Complex64::new(0.0, 200.0).exp() - 1.0) / Complex64::new(0.0, 50.0);
        assert!((v - exact).norm() < 1e-11);
    }
}

mod sampled {
    use fhl_core::Error;
    use fhl_core::mellin::*;
    use fhl_core::series::log_grid;

    #[test]
    fn rejects_sparse_grids() {
        let t = log_grid(1e-3, 1.0, 16);
        let v = vec![1.0; t.len()];
        assert!(matches!(SampledFunction::new(t, v, 0.0), Err(Error::Resolution { .. })));
    }

    #[test]
    fn interpolation_is_monotone_and_accurate() {
        let t = log_grid(1e-4, 1.0, 64);
        let f = SampledFunction::new(t.clone(), t.iter().map(|t| t.sqrt()).collect(), -0.5).unwrap();
        let fine = log_grid(1e-4, 1.0, 1000);
        let mut prev = 0.0;
        for &x in &fine {
            let v = f.value(x).unwrap();
            assert!(v >= prev);
            assert!((v - x.sqrt()).abs() < 1e-5 * x.sqrt(), "{x}: {v}");
            prev = v;
        }
        // Step data must not overshoot.
        let step: Vec<f64> = t.iter().map(|&x| if x < 1e-2 { 0.0 } else { 1.0 }).collect();
        let g = SampledFunction::new(t, step, 0.0).unwrap();
        for &x in &fine {
            let v = g.value(x).unwrap();
            assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{x}: {v}");
        }
    }

    #[test]
    fn tail_fits_power_law() {
        let t = log_grid(1e-3, 1.0, 64);
        let f = SampledFunction::new(t.clone(), t.iter().map(|t| 3.0 / t).collect(), 1.0).unwrap();
        let (t0, c) = f.tail().unwrap();
        assert_eq!(t0, 1e-3);
        assert!((c - 3.0).abs() < 1e-12);
        assert!((f.value(1e-5).unwrap() - 3e5).abs() < 1e-6);
        assert!(matches!(f.value(2.0), Err(Error::Coverage { .. })));
    }

    #[test]
    fn file_round_trip() {
        let t = log_grid(1e-2, 1.0, 64);
        let f = SampledFunction::new(t.clone(), t.clone(), -1.0)
            .unwrap()
            .with_description("identity");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        f.write(&path).unwrap();
        let g = SampledFunction::read(&path, None).unwrap();
        assert_eq!(g.t(), f.t());
        assert_eq!(g.values(), f.values());
        assert_eq!(g.meta(), f.meta());
    }
}

mod sfe {
    use fhl_core::Complex64;
    use fhl_core::Error;
    use fhl_core::mellin::*;
    use fhl_core::zeta::RatioProfile;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn indicator(t: f64) -> f64 {
        if (1.0..=2.0).contains(&t) {
            1.0
        } else {
            0.0
        }
    }

    #[test]
    fn hand_enumerated_words() {
        let p = RatioProfile::new(vec![(0.5, 2)]).unwrap();
        assert_eq!(synthetic_sfe_solve(&p, 1.0, indicator, (1.0, 2.0), 1.5).unwrap(), 1.0);
        // t = 0.9: 2·R(1.8) + 4·R(3.6) = 2.
        assert_eq!(synthetic_sfe_solve(&p, 1.0, indicator, (1.0, 2.0), 0.9).unwrap(), 2.0);
        assert_eq!(synthetic_sfe_solve(&p, 1.0, |_| 0.0, (1.0, 2.0), 0.3).unwrap(), 0.0);
    }

    #[test]
    fn satisfies_the_functional_equation() {
        let bump = |t: f64| if t > 1.0 && t < 2.0 { ((t - 1.0) * (2.0 - t)).powi(2) } else { 0.0 };
        let p = RatioProfile::new(vec![(0.5, 1), (0.3, 2)]).unwrap();
        for &t in &[0.01, 0.05, 0.37, 1.2, 1.9] {
            let f = |t: f64| synthetic_sfe_solve(&p, 1.5, bump, (1.0, 2.0), t).unwrap();
            let lhs = f(t) - p.pairs().map(|(r, m)| m as f64 * f(t / r.powf(1.5))).sum::<f64>();
            assert!((lhs - bump(t)).abs() < 1e-12 * f(t).max(1.0), "t = {t}");
        }
    }

    #[test]
    fn depth_limit() {
        let p = RatioProfile::new(vec![(0.5, 2)]).unwrap();
        assert!(matches!(
            synthetic_sfe_solve(&p, 1.0, indicator, (1.0, 2.0), 1e-9),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn xi_constant_closed_form() {
        let p = RatioProfile::new(vec![(0.4, 1)]).unwrap();
        let one = ClosedForm::new(|_| 1.0, 0.0);
        let s = c(0.7, 2.0);
        let d = 1.3;
        let exact = Complex64::new(d, 0.0).powc(s) * (1.0 - Complex64::new(0.4, 0.0).powc(s)) / s;
        assert!((xi_entire(&p, 1.0, &one, d, s).unwrap().value - exact).norm() < 1e-10);
        let zero = ClosedForm::new(|_| 0.0, 0.0);
        assert_eq!(xi_entire(&p, 2.0, &zero, d, s).unwrap().value, c(0.0, 0.0));
        assert_eq!(
            sfe_zeta_assemble(&p, 2.0, &zero, &zero, d, c(3.0, 1.0)).unwrap().value,
            c(0.0, 0.0)
        );
    }

    #[test]
    fn assembled_zeta_matches_direct_transform() {
        // Smooth bump on [1, 2], f ~ t^{-1} near 0 so ζ_f converges for Re s > 1.
        let bump = |t: f64| {
            if t > 1.0 && t < 2.0 {
                (-1.0 / ((t - 1.0) * (2.0 - t))).exp()
            } else {
                0.0
            }
        };
        let p = RatioProfile::new(vec![(0.5, 2)]).unwrap();
        let f = ClosedForm::new(|t| synthetic_sfe_solve(&p, 1.0, bump, (1.0, 2.0), t).unwrap(), 1.0);
        let r = ClosedForm::new(bump, 0.0);
        let delta = 1.5;
        let t_c = 1e-6;
        for s in [c(2.5, 0.0), c(2.8, 4.0), c(3.0, -7.5)] {
            let assembled = sfe_zeta_assemble(&p, 1.0, &f, &r, delta, s).unwrap().value;
            // f(t)·t is 1-periodic in log₂ t; its average over a period gives the tail constant.
            let direct = truncated_mellin(&f, t_c, delta, s).unwrap().value;
            let n = 256;
            let cbar: f64 = (0..n)
                .map(|i| {
                    let t = t_c * 2f64.powf(i as f64 / n as f64);
                    t * f.value(t).unwrap()
                })
                .sum::<f64>()
                / n as f64;
            let tail = cbar * Complex64::new(t_c, 0.0).powc(s - 1.0) / (s - 1.0);
            let total = direct + tail;
            assert!((assembled - total).norm() < 1e-6 * total.norm(), "{s}: {assembled} vs {total}");
        }
    }
}
