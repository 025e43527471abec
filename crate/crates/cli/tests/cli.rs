use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ptds::catalog::{CatalogSolution, FamilyId, Params};
use ptds::{Flag, Solution};
use serde_json::Value;
use tempfile::TempDir;

fn ptds(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptds"))
        .args(args)
        .arg("--out")
        .arg(dir.join("out"))
        .current_dir(dir)
        .output()
        .expect("spawn ptds")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn with_config(json: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.json"), json).unwrap();
    dir
}

fn report(dir: &TempDir, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.path().join("out").join(name)).unwrap()).unwrap()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["x", "y", "re_u", "im_u", "abs_u", "re_w", "im_w", "flag"]);
    r.records().map(|x| x.unwrap()).collect()
}

fn num(r: &csv::StringRecord, k: usize) -> f64 {
    r[k].parse().unwrap()
}

#[test]
fn seed_on_a_two_by_two_grid() {
    let dir = with_config(r#"{"seed": {"equation": "ds1"}, "grid": {"x": [-1, 1], "y": [-1, 1]}}"#);
    let o = ptds(dir.path(), &["sample", "--config", "run.json", "--grid", "2,2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&dir.path().join("out/t_0.csv"));
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(&r[7], "0");
        assert_eq!((num(r, 2), num(r, 3), num(r, 4)), (1.0, 0.0, 1.0));
    }
}

#[test]
fn sampling_is_deterministic() {
    let cfg = r#"{"family": "ds2_fundamental", "times": [0.3, "-pi/6"], "grid": {"nx": 31, "ny": 17}}"#;
    let (a, b) = (with_config(cfg), with_config(cfg));
    for d in [&a, &b] {
        assert_eq!(code(&ptds(d.path(), &["sample", "--config", "run.json", "--png"])), 0);
    }
    let mut files: Vec<_> = fs::read_dir(a.path().join("out")).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert_eq!(files.len(), 4);
    for f in files {
        let (x, y) = (fs::read(a.path().join("out").join(&f)).unwrap(), fs::read(b.path().join("out").join(&f)).unwrap());
        assert!(x == y, "{f:?} differs between runs");
    }
}

#[test]
fn dumped_values_round_trip() {
    let dir = with_config(r#"{"family": "ds1_fundamental", "params": {"phi": "2pi", "f": 0.5}}"#);
    let o = ptds(dir.path(), &["sample", "--config", "run.json", "--grid", "23,19", "--time", "-0.5"]);
    assert_eq!(code(&o), 0);
    let p = Params::defaults(FamilyId::Ds1Fundamental).with("f", 0.5).unwrap();
    let sol = CatalogSolution::new(p).unwrap();
    let rows = rows(&dir.path().join("out/t_-0.5.csv"));
    assert_eq!(rows.len(), 23 * 19);
    for r in &rows {
        let s = sol.sample(num(r, 0), num(r, 1), -0.5);
        assert_eq!(s.flag, Flag::Regular);
        let w = s.w.unwrap();
        let gaps = [s.u.re - num(r, 2), s.u.im - num(r, 3), s.u.norm() - num(r, 4), w.re - num(r, 5), w.im - num(r, 6)];
        assert!(gaps.iter().all(|g| g.abs() <= 1e-12), "{gaps:?}");
    }
}

#[test]
fn absent_w_leaves_empty_columns() {
    let dir = with_config(r#"{"family": "ds1_peregrine"}"#);
    assert_eq!(code(&ptds(dir.path(), &["sample", "--config", "run.json", "--grid", "3,3"])), 0);
    for r in rows(&dir.path().join("out/t_0.csv")) {
        assert!(r[5].is_empty() && r[6].is_empty());
    }
}

#[test]
fn all_singular_output_exits_3() {
    // a single node on the blow-up hyperbola at t = 0
    let dir = with_config(r#"{"family": "ds1_fundamental", "params": {"e": 0}}"#);
    let o = ptds(dir.path(), &["sample", "--config", "run.json", "--grid", "1,1", "--box", "0.5,0.5666666666666667,1.0,1.08"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn seed_verifies_at_the_floor() {
    let dir = with_config(r#"{"seed": {"equation": "ds2", "epsilon": -1}, "times": [0.3]}"#);
    let o = ptds(dir.path(), &["verify", "--config", "run.json", "--seed-check"]);
    assert_eq!(code(&o), 0);
    let r = report(&dir, "verify.json");
    assert_eq!(r["checks"][0]["order"], "floor");
    assert_eq!(r["seed_check"]["passed"], true);
}

#[test]
fn ds1_fundamental_verifies_at_second_order() {
    let dir = with_config(r#"{"family": "ds1_fundamental", "times": [-0.5]}"#);
    let o = ptds(dir.path(), &["verify", "--config", "run.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&dir, "verify.json");
    let c = &r["checks"][0];
    let order = c["order"].as_f64().unwrap();
    assert!((1.7..=2.3).contains(&order), "{order}");
    assert!(c["max_residual_eq1"].as_f64().unwrap() <= 1e-2);
    assert_eq!(c["masked_fraction"], 0.0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("order_eq2: "));
}

#[test]
fn corrupted_field_fails_verification() {
    let dir = with_config(r#"{"family": "ds1_fundamental", "times": [-0.5]}"#);
    let o = ptds(dir.path(), &["verify", "--config", "run.json", "--corrupt", "0.01"]);
    assert_eq!(code(&o), 4);
    assert_eq!(report(&dir, "verify.json")["passed"], false);
}

#[test]
fn verify_rejects_bad_grids_and_local_families() {
    let dir = with_config(r#"{"family": "ds1_fundamental"}"#);
    assert_eq!(code(&ptds(dir.path(), &["verify", "--config", "run.json", "--box", "-3,2,-3,3"])), 2);
    let dir = with_config(r#"{"family": "ds2_local_ds1_map"}"#);
    assert_eq!(code(&ptds(dir.path(), &["verify", "--config", "run.json"])), 2);
}

#[test]
fn darboux_pipeline_verifies() {
    let cfg = r#"{"dt": {"equation": "ds1", "eigen": [{"r": 1, "phi": "pi/2", "e": 1, "order": 2}]},
                  "grid": {"x": [-2, 2], "y": [-2, 2], "h": 0.04}, "times": [0]}"#;
    let dir = with_config(cfg);
    assert_eq!(code(&ptds(dir.path(), &["verify", "--config", "run.json"])), 0);
}

#[test]
fn ds2_critical_time() {
    let dir = with_config(r#"{"family": "ds2_fundamental"}"#);
    assert_eq!(code(&ptds(dir.path(), &["singularity", "--config", "run.json", "--numeric"])), 0);
    let r = report(&dir, "singularity.json");
    assert_eq!(r["kind"], "point-time");
    assert!((r["t_c"].as_f64().unwrap() - 3f64.sqrt() / 3.0).abs() < 1e-9);
    assert_eq!(r["locus"]["kind"], "hyperbola");
    assert!(r["numeric"]["t_c_gap"].as_f64().unwrap() < 1e-6);
}

#[test]
fn two_rational_interval() {
    let dir = with_config(r#"{"family": "ds2_two_rational"}"#);
    assert_eq!(code(&ptds(dir.path(), &["singularity", "--config", "run.json"])), 0);
    let r = report(&dir, "singularity.json");
    assert_eq!(r["kind"], "interval");
    let got: Vec<f64> = r["interval"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(got.len(), 2);
    for (g, w) in got.iter().zip([0.3262322, 0.6289523]) {
        assert!((g - w).abs() < 1e-6, "{g} vs {w}");
    }
}

#[test]
fn unit_modulus_has_no_blowup() {
    let dir = with_config(r#"{"family": "ds1_fundamental", "params": {"r": 1}}"#);
    assert_eq!(code(&ptds(dir.path(), &["singularity", "--config", "run.json"])), 0);
    assert_eq!(report(&dir, "singularity.json")["kind"], "none");
}

#[test]
fn configuration_errors_exit_2() {
    for cfg in [
        r#"{"family": "ds3_fundamental"}"#,
        r#"{"family": "ds1_hybrid", "params": {"r": 2}}"#,
        r#"{"family": "ds1_fundamental", "params": {"phi": "pi/"}}"#,
        r#"{"family": "ds1_fundamental", "seed": {"equation": "ds1"}}"#,
        r#"{"family": "ds1_fundamental", "equation": "ds2"}"#,
        r#"{"family": "ds1_fundamental", "colour": "red"}"#,
        "not json",
    ] {
        let dir = with_config(cfg);
        assert_eq!(code(&ptds(dir.path(), &["sample", "--config", "run.json", "--grid", "3,3"])), 2, "{cfg}");
    }
    let dir = with_config(r#"{"family": "ds1_hybrid"}"#);
    assert_eq!(code(&ptds(dir.path(), &["singularity", "--config", "run.json"])), 2);
    assert_eq!(code(&ptds(dir.path(), &["sample"])), 2);
}

#[test]
fn catalog_lists_every_family() {
    let dir = tempfile::tempdir().unwrap();
    let o = ptds(dir.path(), &["catalog"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let fams = v["families"].as_array().unwrap();
    assert_eq!(fams.len(), FamilyId::ALL.len());
    for (f, id) in fams.iter().zip(FamilyId::ALL) {
        assert_eq!(f["id"], id.as_str());
        assert_eq!(f["params"].as_array().unwrap().len(), id.schema().len());
    }
}
