mod config {
    use fhl_cli::config::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_flags_lists_and_booleans() {
        let t = "# comment\ngkf = 3 0.3333\nsquare = false\nbridge = true\nt = 1e-3,1e-2\n\n";
        assert_eq!(parse(t).unwrap(), s(&["--gkf", "3", "0.3333", "--bridge", "--t", "1e-3,1e-2"]));
        assert!(parse("novalue").is_err());
    }

    #[test]
    fn config_flags_go_before_explicit_ones() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.cfg");
        std::fs::write(&p, "res = 64\n").unwrap();
        let argv = s(&["fhl", "--out", "x", "--config", p.to_str().unwrap(), "heat", "--res", "32"]);
        let got = expand(argv).unwrap();
        let at = got.iter().position(|a| a == "heat").unwrap();
        assert_eq!(&got[at + 1..], &s(&["--res", "64", "--res", "32"])[..]);
    }
}

mod svg {
    use fhl_cli::svg::*;

    #[test]
    fn renders_log_axes_and_skips_nonpositive_points() {
        let c = Chart {
            title: "E <t>".into(),
            x_label: "t".into(),
            y_label: "E".into(),
            x_scale: Scale::Log,
            y_scale: Scale::Log,
            series: vec![Series::line("E", vec![(1e-4, 1e-2), (1e-2, 0.1), (0.1, 0.0)])],
        };
        let svg = c.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("E &lt;t&gt;"));
        assert!(svg.contains("1e-4") && svg.contains("1e-2"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn scatter_on_linear_axes() {
        let c = Chart {
            title: "poles".into(),
            x_label: "Re".into(),
            y_label: "Im".into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: vec![Series::dots("ω", vec![(1.26, 0.0), (1.26, 5.7), (1.26, -5.7)])],
        };
        assert_eq!(c.render().matches("<circle").count(), 3);
    }
}

mod manifest {
    use fhl_cli::manifest::*;

    #[test]
    fn digest_of_known_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("abc");
        std::fs::write(&p, b"abc").unwrap();
        assert_eq!(
            sha256_file(&p).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
