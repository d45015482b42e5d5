use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn glucose(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glucose"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = glucose(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn gen_writes_header_plus_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen", "--n", "600", "--k", "10", "--seed", "7", "-o", "a.csv",
        ],
    );
    ok(
        dir.path(),
        &[
            "gen", "--n", "600", "--k", "10", "--seed", "7", "-o", "b.csv",
        ],
    );
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a.lines().count(), 601);
    assert!(a.starts_with("f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,glucose_mmol_l\n"));
    assert_eq!(a, fs::read_to_string(dir.path().join("b.csv")).unwrap());
}

#[test]
fn invalid_config_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = glucose(dir.path(), &["gen", "--k", "0", "-o", "a.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("k must be at least 1"));
    assert!(!dir.path().join("a.csv").exists());
}

#[test]
fn train_predict_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--n", "200", "-o", "data.csv"]);
    let log = ok(
        d,
        &[
            "train",
            "--data",
            "data.csv",
            "--trees",
            "20",
            "-o",
            "model.json",
        ],
    );
    assert!(log.contains("partition sizes"), "{log}");
    assert!(log.contains("boundaries"), "{log}");
    assert!(log.contains("f10"), "{log}");

    let pred = ok(
        d,
        &["predict", "--model", "model.json", "--data", "data.csv"],
    );
    assert_eq!(pred.lines().count(), 201);
    assert!(pred.starts_with("row,subset,pipeline_mmol_l,baseline_mmol_l\n"));

    let text = ok(
        d,
        &[
            "evaluate",
            "--model",
            "model.json",
            "--data",
            "data.csv",
            "--plot",
            "grid.svg",
        ],
    );
    assert!(text.contains("baseline") && text.contains("pipeline"));
    assert!(fs::read_to_string(d.join("grid.svg"))
        .unwrap()
        .contains("<circle"));

    ok(
        d,
        &[
            "evaluate",
            "--model",
            "model.json",
            "--data",
            "data.csv",
            "--format",
            "structured",
            "-o",
            "r.json",
        ],
    );
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(v["n_test"], 50);
    assert_eq!(v["methods"].as_array().unwrap().len(), 2);
}

#[test]
fn three_averaged_rows_train() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // 10 rows, 7 train rows, window 5 -> 3 averaged rows
    ok(
        d,
        &[
            "gen",
            "--n",
            "10",
            "--k",
            "3",
            "--informative",
            "2",
            "-o",
            "small.csv",
        ],
    );
    let log = ok(
        d,
        &[
            "train",
            "--data",
            "small.csv",
            "--train-fraction",
            "0.7",
            "--trees",
            "5",
            "-o",
            "m.json",
        ],
    );
    assert!(log.contains("1 / 1 / 1"), "{log}");
}

#[test]
fn unwritable_model_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--n", "60", "-o", "data.csv"]);
    let out = glucose(
        d,
        &[
            "train",
            "--data",
            "data.csv",
            "--trees",
            "5",
            "-o",
            "missing/dir/m.json",
        ],
    );
    assert!(!out.status.success());
}

#[test]
fn corrupt_inputs_fail_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.csv"), "f1,glucose_mmol_l\n1,5\n2,0.0\n").unwrap();
    let out = glucose(d, &["train", "--data", "bad.csv", "-o", "m.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    fs::write(d.join("m.json"), "{\"schema\":\"nope\"}").unwrap();
    fs::write(d.join("ok.csv"), "f1,glucose_mmol_l\n1,5\n2,6\n").unwrap();
    let out = glucose(d, &["evaluate", "--model", "m.json", "--data", "ok.csv"]);
    assert!(!out.status.success());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("c.toml"), "[gen]\nn = 50\nk = 3\ninformative = 1\n").unwrap();
    ok(
        d,
        &["--config", "c.toml", "gen", "--n", "40", "-o", "a.csv"],
    );
    let a = fs::read_to_string(d.join("a.csv")).unwrap();
    assert_eq!(a.lines().count(), 41);
    assert!(a.starts_with("f1,f2,f3,glucose_mmol_l\n"));

    fs::write(d.join("bad.toml"), "[gen]\nrows = 50\n").unwrap();
    assert!(!glucose(d, &["--config", "bad.toml", "gen", "-o", "b.csv"])
        .status
        .success());
}
