use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fhl(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhl"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("spawn fhl")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn pole_count(dir: &Path) -> usize {
    json(&dir.join("dims.json"))["poles"].as_array().unwrap().len()
}

fn digests(manifest: &Path) -> Vec<String> {
    json(manifest)["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["sha256"].as_str().unwrap().to_owned())
        .collect()
}

#[test]
fn koch_dims_has_seven_poles() {
    let dir = TempDir::new().unwrap();
    let o = fhl(dir.path(), &["dims", "--gkf", "3", "0.3333333333"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(pole_count(dir.path()), 7);
    for f in ["dims.json", "dims.csv", "dims.svg", "dims.manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn ratio_list_dims() {
    let dir = TempDir::new().unwrap();
    let o = fhl(dir.path(), &["dims", "--ratios", "0.5:2", "--T", "10"]);
    assert_eq!(code(&o), 0);
    assert_eq!(pole_count(dir.path()), 3);
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&fhl(dir.path(), &[])), 1);
    assert_eq!(code(&fhl(dir.path(), &["dims", "--bogus"])), 1);
    assert_eq!(code(&fhl(dir.path(), &["dims"])), 1);
    assert_eq!(code(&fhl(dir.path(), &["dims", "--ratios", "2:1"])), 1);
    assert_eq!(code(&fhl(dir.path(), &["--help"])), 0);
    assert_eq!(code(&fhl(dir.path(), &["dims", "--help"])), 0);
}

#[test]
fn command_line_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# halving map\nratios = 0.5:2\nT = 10\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&fhl(dir.path(), &["--config", cfg, "dims"])), 0);
    assert_eq!(pole_count(dir.path()), 3);
    assert_eq!(code(&fhl(dir.path(), &["--config", cfg, "dims", "--T", "20"])), 0);
    assert_eq!(pole_count(dir.path()), 5);
}

#[test]
fn manifest_records_run() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&fhl(dir.path(), &["classify", "--gkf", "3", "0.3333333333"])), 0);
    let m = json(&dir.path().join("classify.manifest.json"));
    assert_eq!(m["command"], "classify");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 1);
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let c = json(&dir.path().join("classify.json"));
    assert_eq!(c["lattice"]["kind"], "Lattice");
}

#[test]
fn reruns_are_bitwise_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["mc", "--square", "--t", "1e-2", "--paths", "2000", "--seed", "7"];
    assert_eq!(code(&fhl(a.path(), &args)), 0);
    assert_eq!(code(&fhl(b.path(), &args)), 0);
    assert_eq!(digests(&a.path().join("mc.manifest.json")), digests(&b.path().join("mc.manifest.json")));
    let dims = ["dims", "--gkf", "3", "0.3333333333"];
    assert_eq!(code(&fhl(a.path(), &dims)), 0);
    assert_eq!(code(&fhl(b.path(), &dims)), 0);
    assert_eq!(
        std::fs::read(a.path().join("dims.csv")).unwrap(),
        std::fs::read(b.path().join("dims.csv")).unwrap()
    );
}

#[test]
fn inconsistent_exponents_exit_two() {
    let dir = TempDir::new().unwrap();
    let ok = fhl(dir.path(), &["compare", "--tube-dim", "1.2619", "--heat-slope", "0.369"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&dir.path().join("compare.json"))["consistent"], true);
    let bad = fhl(dir.path(), &["compare", "--tube-dim", "1.2619", "--heat-slope", "0.1"]);
    assert_eq!(code(&bad), 2);
    assert_eq!(json(&dir.path().join("compare.json"))["consistent"], false);
}

#[test]
fn selftest_passes() {
    let dir = TempDir::new().unwrap();
    let o = fhl(dir.path(), &["selftest"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let checks = json(&dir.path().join("selftest.json"));
    assert!(checks.as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn gkf_writes_boundary_and_warns_on_overlap() {
    let dir = TempDir::new().unwrap();
    let o = fhl(dir.path(), &["gkf", "--gkf", "3", "0.3333333333", "--depth", "2"]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("gkf.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 16);
    let o = fhl(dir.path(), &["gkf", "--gkf", "3", "0.6", "--depth", "1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("self-avoidance"));
}

#[test]
fn square_heat_tube_and_compare() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let heat = fhl(d, &["heat", "--square", "--res", "128", "--t-min", "1e-4", "--t-max", "1e-2", "--per-decade", "8"]);
    assert_eq!(code(&heat), 0, "{}", String::from_utf8_lossy(&heat.stderr));
    let e = std::fs::read_to_string(d.join("heat.csv")).unwrap();
    assert_eq!(e.lines().count(), 1 + 17);
    assert!(d.join("heat.csv.json").exists());

    let tube = fhl(d, &["tube", "--square", "--res", "1024", "--window", "0.002,0.2"]);
    assert_eq!(code(&tube), 0, "{}", String::from_utf8_lossy(&tube.stderr));
    let dim = json(&d.join("tube_fit.json"))["dim"].as_f64().unwrap();
    assert!((dim - 1.0).abs() < 0.1, "{dim}");

    let heat_csv = d.join("heat.csv");
    let cmp = fhl(d, &["compare", "--tube-dim", "1.0", "--heat", heat_csv.to_str().unwrap(), "--heat-window", "1e-4,1e-2"]);
    assert_eq!(code(&cmp), 0, "{}", String::from_utf8_lossy(&cmp.stdout));
}

#[test]
fn snowflake_fit_pipeline() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&fhl(d, &["dims", "--gkf", "3", "0.3333333333"])), 0);
    let heat = fhl(
        d,
        &["heat", "--gkf", "3", "0.3333333333", "--depth", "2", "--res", "128", "--t-min", "1e-4", "--t-max", "1.2", "--per-decade", "64"],
    );
    assert_eq!(code(&heat), 0, "{}", String::from_utf8_lossy(&heat.stderr));
    let (h, m) = (d.join("heat.csv"), d.join("dims.json"));
    let fit = fhl(d, &["fit", "--heat", h.to_str().unwrap(), "--dims", m.to_str().unwrap(), "--gkf", "3", "0.3333333333"]);
    assert!([0, 2].contains(&code(&fit)), "{}", String::from_utf8_lossy(&fit.stderr));
    assert!(d.join("fit.json").exists() && d.join("fit_residual.csv").exists());
    let f = json(&d.join("fit.json"));
    assert_eq!(f["N"], 2);
    assert!(!f["poles"].as_array().unwrap().is_empty());

    let coef = fhl(d, &["fit", "--heat", h.to_str().unwrap(), "--gkf", "3", "0.3333333333", "--fit-coefficients", "--harmonics", "1"]);
    assert!([0, 2].contains(&code(&coef)), "{}", String::from_utf8_lossy(&coef.stderr));
    assert_eq!(json(&d.join("fit.json"))["poles"].as_array().unwrap().len(), 3);
}
