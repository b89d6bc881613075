use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cone-auglag"));
    c.env_remove("CONE_AUGLAG_SEED");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn assert_cells_clean(path: &Path) {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    for row in csv_rows(path) {
        for cell in row {
            assert!(!cell.eq_ignore_ascii_case("nan"), "{}: NaN cell", path.display());
        }
    }
}

#[test]
fn catalog_lists_problems() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["catalog"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("catalog.csv"));
    assert!(rows.len() >= 6);
    assert!(rows.iter().any(|r| r[0] == "qp2"));
    let j = json(&dir.path().join("catalog.json"));
    assert!(j["result"]["problems"].as_array().unwrap().len() >= 6);
    assert_cells_clean(&dir.path().join("catalog.csv"));
}

#[test]
fn axioms_hpr_has_no_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["axioms", "--family", "hpr", "--cone", "orthant:2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&dir.path().join("axioms-hpr.json"));
    assert_eq!(j["result"]["mismatches"], 0);
    assert_eq!(j["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(j["config_hash"].as_str().unwrap().len(), 64);
    let rows = csv_rows(&dir.path().join("axioms-hpr.csv"));
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r[4] != "mismatch"));
}

#[test]
fn saddle_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["saddle", "--problem", "exmpl-exp", "--family", "exp"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&dir.path().join("saddle-exmpl-exp-exp.json"));
    for e in j["result"]["entries"].as_array().unwrap() {
        assert!((e["sup"].as_f64().unwrap() - 2.0).abs() < 1e-6);
        assert!((e["inf"].as_f64().unwrap() - 2.0).abs() < 1e-6);
        assert!(e["sup_margin"].as_f64().unwrap().abs() < 1e-6);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["axioms", "--family", "exp", "--seed", "11"];
    run(&args, a.path());
    run(&args, b.path());
    let ja = std::fs::read(a.path().join("axioms-exp.json")).unwrap();
    let jb = std::fs::read(b.path().join("axioms-exp.json")).unwrap();
    assert_eq!(ja, jb);
    let ca = std::fs::read(a.path().join("axioms-exp.csv")).unwrap();
    let cb = std::fs::read(b.path().join("axioms-exp.csv")).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn seed_resolution_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["kkt", "--problem", "qp2", "--out"]).arg(dir.path()).env("CONE_AUGLAG_SEED", "7").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("kkt-qp2.json"))["seed"], 7);

    let o = bin()
        .args(["kkt", "--problem", "qp2", "--seed", "9", "--out"])
        .arg(dir.path())
        .env("CONE_AUGLAG_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("kkt-qp2.json"))["seed"], 9);

    let o = bin().args(["kkt", "--problem", "qp2", "--out"]).arg(dir.path()).env("CONE_AUGLAG_SEED", "x").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"problem": "nlp1d", "seed": 5, "alm": {"max_outer": 40}}"#).unwrap();
    let o = bin().args(["solve", "--config"]).arg(&cfg).args(["--problem", "qp2", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&dir.path().join("solve-qp2-hpr.json"));
    assert_eq!(j["seed"], 5);
    assert_eq!(j["config"]["alm"]["max_outer"], 40);
    assert_eq!(j["config"]["problem"], "qp2");
    assert_cells_clean(&dir.path().join("solve-qp2-hpr.csv"));

    std::fs::write(&cfg, r#"{"problem": "qp2", "max_outer": 3}"#).unwrap();
    let o = bin().args(["solve", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["solve"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["axioms", "--family", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["saddle", "--problem", "no-such", "--family", "hpr"], dir.path()).status.code(), Some(2));
}

#[test]
fn failing_verdicts_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["alternance", "--problem", "minimax-abs", "--x", "0.3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["alternance", "--problem", "minimax-abs"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("alternance-minimax-abs.csv"));
    let signs: Vec<&str> = rows.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(signs, ["-1", "1"]);
}

#[test]
fn exact_and_probe_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["exact", "--construction", "hpr", "--problem", "qp2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&dir.path().join("exact-qp2-hpr.json"));
    let x: Vec<f64> = serde_json::from_value(j["result"]["x"].clone()).unwrap();
    assert!((x[0] - 1.0).abs() < 1e-4 && x[1].abs() < 1e-4);

    let o = run(&["sublevel", "--problem", "qp2", "--family", "hpr", "--c", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["sublevel", "--problem", "tight-ball", "--construction", "he-wu-meng"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let j = json(&dir.path().join("sublevel-tight-ball-he-wu-meng.json"));
    assert_eq!(j["result"]["verdict"]["verdict"], "escape-detected");
}

#[test]
fn dual_respects_weak_duality() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dual", "--problem", "qp2", "--family", "hpr", "--c", "1,10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("dual-qp2-hpr.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[4] == "true"));
}
