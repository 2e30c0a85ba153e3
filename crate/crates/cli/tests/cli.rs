use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn lmeasure(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmeasure")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn square() -> Value {
    json!({
        "version": 1,
        "experiment": "square",
        "space": {"dim": 3},
        "region": {"subspace-cube": {"basis": [[0, 1, 0], [0, 0, 1]], "origin": [0, 0, 0], "ranges": [[-1, 1], [-1, 1]]}},
        "deltas": {"start": 0.125, "factor": 0.5, "count": 5},
        "n_grid": [0, 1, 2, 3],
        "budgets": {"verify_samples": 1024},
        "seed": 7,
        "expect": [{"stat": "dimension", "target": 2, "tol": 0.15}]
    })
}

fn records(out: &Path) -> Vec<Value> {
    fs::read_to_string(out.join("results.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn spacelike_square_is_two_dimensional() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", &square());
    let out = tmp.path().join("out");
    let o = lmeasure(&["dimension", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &records(&out)[0];
    assert!((r["summary"]["dimension"].as_f64().unwrap() - 2.0).abs() < 0.15);
    assert_eq!(r["pass"], true);
    let scaling = fs::read_to_string(out.join("square/scaling.csv")).unwrap();
    assert!(scaling.starts_with("generator,delta,N,cost,verified\n"));
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v = square();
    v["expect"] = json!([{"stat": "upper_N2", "max": 4.4}]);
    let cfg = write_config(tmp.path(), "c.json", &v);
    let mut outputs = Vec::new();
    for (run, workers) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out = tmp.path().join(run);
        let o = lmeasure(&["measure", "--config", &cfg, "--workers", workers, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(csv_files(&out.join("square")));
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn config_hash_follows_semantic_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let run = |name: &str, v: &Value, extra: &[&str]| {
        let cfg = write_config(tmp.path(), name, v);
        let mut args = vec!["bg", "--config", cfg.as_str(), "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(lmeasure(&args).status.code(), Some(0));
    };
    let base = json!({"version": 1, "experiment": "bg", "curvature": {"rows": [[0, 2, 1], [-1, 2, 1]]}, "seed": 1});
    run("a.json", &base, &[]);
    let mut moved = base.clone();
    moved["out"] = json!("ignored");
    moved["workers"] = json!(3);
    run("b.json", &moved, &[]);
    let mut changed = base.clone();
    changed["curvature"]["rows"][1][0] = json!(-2);
    run("c.json", &changed, &[]);
    run("a.json", &base, &["--seed", "2"]);

    let hashes: Vec<String> = records(&out).iter().map(|r| r["config_hash"].as_str().unwrap().to_owned()).collect();
    assert_eq!(hashes.len(), 4);
    assert_eq!(hashes[0], hashes[1]);
    assert_ne!(hashes[0], hashes[2]);
    assert_ne!(hashes[0], hashes[3]);
    assert_eq!(hashes[0].len(), 64);
}

#[test]
fn records_are_appended() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &json!({"version": 1, "experiment": "bg", "curvature": {"rows": [[0, 1, 1]]}, "seed": 1}),
    );
    lmeasure(&["bg", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let first = fs::read_to_string(out.join("results.jsonl")).unwrap();
    lmeasure(&["bg", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let both = fs::read_to_string(out.join("results.jsonl")).unwrap();
    assert!(both.starts_with(&first));
    assert_eq!(both.lines().count(), 2);
}

#[test]
fn factor_at_least_one_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v = square();
    v["deltas"]["factor"] = json!(1.0);
    let cfg = write_config(tmp.path(), "c.json", &v);
    let o = lmeasure(&["dimension", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("deltas.factor"));
}

#[test]
fn unknown_fields_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v = square();
    v["n_grdi"] = json!([1]);
    let cfg = write_config(tmp.path(), "c.json", &v);
    let o = lmeasure(&["dimension", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_grdi"));
}

#[test]
fn wrong_version_and_missing_config() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v = square();
    v["version"] = json!(2);
    let cfg = write_config(tmp.path(), "c.json", &v);
    assert_eq!(lmeasure(&["dimension", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(lmeasure(&["dimension"]).status.code(), Some(2));
    assert_eq!(lmeasure(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn null_segment_has_no_length_and_no_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &json!({
            "version": 1,
            "experiment": "null-segment",
            "space": {"dim": 2},
            "region": {"curve": {"vertices": [[0, 0], [1, 1]]}},
            "deltas": {"start": 0.25, "factor": 0.5, "count": 5},
            "seed": 3,
            "expect": [{"stat": "length", "target": 0, "tol": 1e-12}, {"stat": "dimension", "target": 0, "tol": 0.05}]
        }),
    );
    let out = tmp.path().join("out");
    let o = lmeasure(&["curve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = &records(&out)[0];
    assert_eq!(r["summary"]["length"].as_f64(), Some(0.0));
    assert_eq!(r["labels"]["class"], "null");
}

#[test]
fn failed_expectation_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v = square();
    v["expect"] = json!([{"stat": "dimension", "target": 3, "tol": 0.1}]);
    let cfg = write_config(tmp.path(), "c.json", &v);
    let out = tmp.path().join("out");
    let o = lmeasure(&["dimension", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(records(&out)[0]["pass"], false);
}

#[test]
fn missing_suite_is_not_found() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lmeasure(&["reproduce", "no-such-suite", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no suite named"));
}

#[test]
fn bishop_gromov_suite_flat_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lmeasure(&["reproduce", "bishop-gromov", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let text = fs::read_to_string(tmp.path().join("bishop-gromov/curvature-table/curvature.csv")).unwrap();
    let mut flat = 0;
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        if v[0] == 0.0 {
            assert_eq!(v[3], 2f64.powf(v[1] + 1.0));
            assert!((v[4] - 0.5f64.powf(v[1] + 1.0)).abs() < 1e-15);
            flat += 1;
        }
    }
    assert_eq!(flat, 3);
}

#[test]
fn minkowski_subspaces_suite_table() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lmeasure(&["reproduce", "minkowski-subspaces", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let table = fs::read_to_string(tmp.path().join("minkowski-subspaces/subspaces.csv")).unwrap();
    let rows: Vec<Vec<&str>> = table.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let (dim, expected): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        let k: f64 = r[1].parse().unwrap();
        // null pieces lose one dimension
        let want = if r[0] == "null" { k - 1.0 } else { k };
        assert_eq!(expected, want);
        assert!((dim - want).abs() <= 0.2, "{r:?}");
    }
}
