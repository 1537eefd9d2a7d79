mod admissibility {
    use fhl_core::Error;
    use fhl_core::geometry::gkf_system;
    use fhl_core::zeta::*;

    fn gkf(n: usize, r: f64) -> RatioProfile {
        RatioProfile::from_system(&gkf_system(n, r).unwrap()).unwrap()
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(admissibility_report(&gkf(5, 0.2), 0.0).unwrap().criterion, Criterion::LowerDim);
        let koch = admissibility_report(&gkf(3, 1.0 / 3.0), 0.0).unwrap();
        assert_eq!(koch.criterion, Criterion::Lattice);
        let d = 4f64.ln() / 3f64.ln();
        assert!((koch.admissible_screen.unwrap() - d / 2.0).abs() < 1e-12);
        assert_eq!(admissibility_report(&gkf(4, 0.24), 0.0).unwrap().criterion, Criterion::None);
    }

    #[test]
    fn lower_dim_screen_sits_halfway() {
        let p = gkf(5, 0.2);
        let rep = admissibility_report(&p, -1.0).unwrap();
        let dl = lower_dim_bound(&p);
        assert!((rep.admissible_screen.unwrap() - (dl - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn koch_screen_is_bounded() {
        let b = screen_bound(&gkf(3, 1.0 / 3.0), 0.5, 100.0, 20001).unwrap();
        // |P(0.5 + iτ)| ≥ 4·3^{−1/2} − 1.
        assert!(b.min_p >= 4.0 / 3f64.sqrt() - 1.0 - 1e-12);
        assert!(b.sup_zeta.is_finite());
        let d = 4f64.ln() / 3f64.ln();
        assert!(matches!(
            screen_bound(&gkf(3, 1.0 / 3.0), d, 10.0, 100),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn binary_screen_reverse_triangle() {
        let b = screen_bound(&RatioProfile::new(vec![(0.5, 2)]).unwrap(), 0.0, 50.0, 5001).unwrap();
        assert!(b.min_p >= 1.0 - 1e-12);
        assert!(b.sup_zeta <= 1.0 + 1e-12);
    }
}

mod lattice {
    use fhl_core::geometry::gkf_system;
    use fhl_core::zeta::*;

    fn classify(pairs: Vec<(f64, u32)>) -> LatticeClassification {
        classify_lattice(&RatioProfile::new(pairs).unwrap(), DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL)
    }

    #[test]
    fn single_ratio_is_lattice() {
        let c = classify(vec![(1.0 / 3.0, 4)]);
        assert!(c.is_lattice());
        assert!((c.generator.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.exponents, vec![1]);
    }

    #[test]
    fn powers_of_a_half() {
        let c = classify(vec![(0.5, 1), (0.25, 1)]);
        assert!(c.is_lattice());
        assert!((c.generator.unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(c.exponents, vec![1, 2]);
    }

    #[test]
    fn fractional_generator() {
        // 1/4 = λ0², 1/8 = λ0³ with λ0 = 1/2; from r_1 = 1/4 the generator is r_1^{1/2}.
        let c = classify(vec![(0.25, 1), (0.125, 2)]);
        assert!(c.is_lattice());
        assert!((c.generator.unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(c.exponents, vec![2, 3]);
    }

    #[test]
    fn squareflake_is_nonlattice() {
        let p = RatioProfile::from_system(&gkf_system(4, 0.25).unwrap()).unwrap();
        let c = classify_lattice(&p, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL);
        assert_eq!(c.kind, LatticeKind::Nonlattice);
        assert!(c.residual >= DEFAULT_TOL);
    }
}

mod poles {
    use std::f64::consts::TAU;

    use fhl_core::Complex64;
    use fhl_core::geometry::gkf_system;
    use fhl_core::zeta::*;

    fn gkf(n: usize, r: f64) -> RatioProfile {
        RatioProfile::from_system(&gkf_system(n, r).unwrap()).unwrap()
    }

    fn dims(p: &RatioProfile, w: Window) -> ComplexDimensionSet {
        let c = classify_lattice(p, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL);
        complex_dimensions(p, w, &c).unwrap()
    }

    #[test]
    fn koch_lattice_poles() {
        let p = gkf(3, 1.0 / 3.0);
        let w = Window::new(-1.0, 3.0, 20.0).unwrap();
        let set = dims(&p, w);
        assert_eq!(set.method, PoleMethod::LatticePolynomial);
        assert_eq!(set.poles.len(), 7);
        let d = 4f64.ln() / 3f64.ln();
        let spacing = TAU / 3f64.ln();
        for (k, pole) in (-3..=3).zip(&set.poles) {
            assert!((pole.omega.re - d).abs() < 1e-9);
            assert!((pole.omega.im - k as f64 * spacing).abs() < 1e-8);
        }
        assert_eq!(argument_principle_count(&p, w).unwrap(), 7);
        let ap = argument_principle_poles(&p, w).unwrap();
        assert_eq!(ap.count(), 7);
        for (a, b) in ap.poles.iter().zip(&set.poles) {
            assert!((a.omega - b.omega).norm() < 1e-9);
        }
    }

    #[test]
    fn binary_poles() {
        let p = RatioProfile::new(vec![(0.5, 2)]).unwrap();
        let set = dims(&p, Window::new(-1.0, 2.0, 10.0).unwrap());
        assert_eq!(set.poles.len(), 3);
        let period = TAU / 2f64.ln();
        for (k, pole) in (-1..=1).zip(&set.poles) {
            assert!((pole.omega - Complex64::new(1.0, k as f64 * period)).norm() < 1e-12);
        }
    }

    #[test]
    fn lattice_two_ratio_poles_satisfy_invariants() {
        // {1/2, 1/4}: z + z² = 1, one positive root and one negative root.
        let p = RatioProfile::new(vec![(0.5, 1), (0.25, 1)]).unwrap();
        let w = Window::new(-2.0, 2.0, 40.0).unwrap();
        let set = dims(&p, w);
        let (dl, d) = (lower_dim_bound(&p), moran_dimension(&p));
        for pole in &set.poles {
            assert!(dirichlet_poly(&p, pole.omega).norm() < 1e-10);
            assert!(pole.omega.re >= dl - 1e-9 && pole.omega.re <= d + 1e-9);
            let c = pole.omega.conj();
            assert!(set.poles.iter().any(|q| (q.omega - c).norm() < 1e-9));
            let shifted = pole.omega + Complex64::new(0.0, TAU / 2f64.ln());
            if w.contains(shifted) {
                assert!(dirichlet_poly(&p, shifted).norm() < 1e-9);
            }
        }
        assert_eq!(argument_principle_count(&p, w).unwrap(), set.count());
    }

    #[test]
    fn squareflake_argument_principle_is_self_consistent() {
        let p = gkf(4, 0.25);
        let w = Window::new(-1.0, 2.0, 30.0).unwrap();
        let set = dims(&p, w);
        assert_eq!(set.method, PoleMethod::ArgumentPrinciple);
        assert!(set.undecided.is_empty());
        assert_eq!(argument_principle_count(&p, w).unwrap(), set.count());
        assert!(set.count() > 1);
        let d = moran_dimension(&p);
        assert!(set.poles.iter().any(|q| (q.omega.re - d).abs() < 1e-12 && q.omega.im == 0.0));
        for pole in &set.poles {
            assert!(dirichlet_poly(&p, pole.omega).norm() < 1e-10);
            assert!(pole.omega.re >= -1e-9 && pole.omega.re <= d + 1e-9);
        }
    }

    #[test]
    fn residues_match_derivative() {
        let half = RatioProfile::new(vec![(0.5, 2)]).unwrap();
        let r = residue_check(&half, Complex64::new(1.0, 0.0)).unwrap();
        assert!((r - 1.0 / 2f64.ln()).norm() < 1e-8 / 2f64.ln());
        let koch = gkf(3, 1.0 / 3.0);
        let d = Complex64::new(4f64.ln() / 3f64.ln(), 0.0);
        let r = residue_check(&koch, d).unwrap();
        assert!((r - 1.0 / 3f64.ln()).norm() < 1e-8);
        let set = dims(&koch, Window::new(0.0, 2.0, 20.0).unwrap());
        for pole in &set.poles {
            let c = residue_check(&koch, pole.omega).unwrap();
            let exact = pole.residue.unwrap();
            assert!((c - exact).norm() < 1e-8 * exact.norm());
            let cc = residue_check(&koch, pole.omega.conj()).unwrap();
            assert!((cc - c.conj()).norm() < 1e-8 * exact.norm());
        }
    }

    #[test]
    fn json_and_csv_export() {
        let set = dims(&gkf(3, 1.0 / 3.0), Window::new(0.0, 2.0, 10.0).unwrap());
        let json = serde_json::to_string(&set).unwrap();
        assert!(json.contains("\"res_re\""));
        let back: ComplexDimensionSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
        let mut buf = Vec::new();
        set.write_csv_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("re,im,mult,res_re,res_im\n"));
        assert_eq!(text.lines().count(), set.poles.len() + 1);
    }
}

mod profile {
    use proptest::prelude::*;

    use fhl_core::Complex64;
    use fhl_core::Error;
    use fhl_core::geometry::gkf_system;
    use fhl_core::zeta::*;

    fn gkf(n: usize, r: f64) -> RatioProfile {
        RatioProfile::from_system(&gkf_system(n, r).unwrap()).unwrap()
    }

    #[test]
    fn merges_and_sorts() {
        let p = RatioProfile::new(vec![(0.25, 1), (0.5, 1), (0.25, 2)]).unwrap();
        assert_eq!(p.ratios(), &[0.5, 0.25]);
        assert_eq!(p.multiplicities(), &[1, 3]);
        assert!(RatioProfile::new(vec![(1.0, 1)]).is_err());
        assert!(RatioProfile::new(vec![]).is_err());
    }

    #[test]
    fn dirichlet_values() {
        let koch = RatioProfile::new(vec![(1.0 / 3.0, 4)]).unwrap();
        assert_eq!(dirichlet_poly(&koch, Complex64::new(0.0, 0.0)), Complex64::new(-3.0, 0.0));
        let d = 4f64.ln() / 3f64.ln();
        assert!(dirichlet_poly(&koch, Complex64::new(d, 0.0)).norm() < 1e-12);
        let half = RatioProfile::new(vec![(0.5, 2)]).unwrap();
        assert!(dirichlet_poly(&half, Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zeta_values() {
        let koch = gkf(3, 1.0 / 3.0);
        let z = scaling_zeta(&koch, Complex64::new(2.0, 0.0)).unwrap();
        assert!((z - 1.8).norm() < 1e-14);
        let d = Complex64::new(4f64.ln() / 3f64.ln(), 0.0);
        assert!(matches!(scaling_zeta(&koch, d), Err(Error::AtPole { .. })));
        let half = RatioProfile::new(vec![(0.5, 2)]).unwrap();
        assert!((scaling_zeta(&half, Complex64::new(2.0, 0.0)).unwrap() - 2.0).norm() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = gkf(5, 0.2);
        let s = Complex64::new(0.7, 3.1);
        let h = 1e-6;
        let fd = (dirichlet_poly(&p, s + h) - dirichlet_poly(&p, s - h)) / (2.0 * h);
        assert!((fd - derivative(&p, s)).norm() < 1e-8);
    }

    #[test]
    fn moran_closed_forms() {
        let half = RatioProfile::new(vec![(0.5, 2)]).unwrap();
        assert!((moran_dimension(&half) - 1.0).abs() < 1e-12);
        let cantor = RatioProfile::new(vec![(1.0 / 3.0, 2)]).unwrap();
        assert!((moran_dimension(&cantor) - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        let koch = gkf(3, 1.0 / 3.0);
        let d = moran_dimension(&koch);
        assert!((d - 4f64.ln() / 3f64.ln()).abs() < 1e-10);
        assert!(dirichlet_poly(&koch, Complex64::new(d, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn lower_bound_signs() {
        for r in [0.2, 0.25, 0.3] {
            assert!(lower_dim_bound(&gkf(4, r)).abs() < 1e-12, "r = {r}");
        }
        assert!(lower_dim_bound(&gkf(3, 0.3)) < 0.0);
        assert!(lower_dim_bound(&gkf(5, 0.2)) > 0.0);
        let koch = gkf(3, 1.0 / 3.0);
        assert!((lower_dim_bound(&koch) - moran_dimension(&koch)).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        let p = gkf(4, 0.25);
        let back: RatioProfile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        #[test]
        fn moran_increases_with_multiplicity(
            r1 in 0.05f64..0.6, r2 in 0.05f64..0.6, m1 in 1u32..4, m2 in 1u32..4, k in 0usize..2,
        ) {
            prop_assume!((r1 - r2).abs() > 1e-6);
            let base = RatioProfile::new(vec![(r1, m1), (r2, m2)]).unwrap();
            let mut more = vec![(r1, m1), (r2, m2)];
            more[k].1 += 1;
            let more = RatioProfile::new(more).unwrap();
            prop_assert!(moran_dimension(&more) > moran_dimension(&base));
        }

        #[test]
        fn bounds_are_ordered(r1 in 0.05f64..0.6, r2 in 0.05f64..0.6, m1 in 1u32..4, m2 in 1u32..4) {
            prop_assume!((r1 - r2).abs() > 1e-6);
            let p = RatioProfile::new(vec![(r1, m1), (r2, m2)]).unwrap();
            prop_assert!(lower_dim_bound(&p) <= moran_dimension(&p) + 1e-12);
        }
    }
}
