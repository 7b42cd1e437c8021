use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn triband(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triband"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("triband-cli-{}-{name}", std::process::id()))
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn classify_prints_full_record() {
    let out = triband(&["classify", "--preset", "paper-ex2", "--lambda", "1.5"]);
    assert!(out.status.success());
    let v = json(&out);
    for key in [
        "lambda",
        "ratio",
        "in_spectrum",
        "fine",
        "goldberg",
        "ap",
        "delta",
        "co",
        "boundary",
        "p",
        "tol",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["lambda"]["re"], 1.5);
    assert_eq!(v["in_spectrum"], true);
    assert_eq!(v["fine"], "Residual");
    assert_eq!(v["goldberg"], "C2");
}

#[test]
fn classify_diagonal_value_is_unresolved() {
    let v = json(&triband(&[
        "classify",
        "--params",
        "1,i,2,1,-i,1",
        "--lambda",
        "i",
    ]));
    assert_eq!(v["goldberg"], "Unresolved(C1,C2)");
    assert_eq!(v["ap"], "UnknownPerPaper");
}

#[test]
fn boundary_classification_depends_on_p() {
    // |1 - l| = 1 for the difference operator
    let two = json(&triband(&[
        "classify", "--preset", "delta", "--lambda", "2",
    ]));
    let one = json(&triband(&[
        "classify", "--preset", "delta", "--lambda", "2", "--p", "1",
    ]));
    assert_eq!(two["fine"], "Continuous");
    assert_eq!(one["fine"], "Residual");
    assert_eq!(two["boundary"], true);
}

#[test]
fn region_formats() {
    let csv = triband(&[
        "region",
        "--preset",
        "paper-ex2",
        "--window",
        "0.5,4.5,-1,1",
        "--res",
        "2,1",
    ]);
    assert!(csv.status.success());
    let text = String::from_utf8(csv.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "re,im,code,ratio");
    assert!(rows[1].starts_with("1.5,0,RESIDUAL,"));
    assert!(rows[2].starts_with("3.5,0,RESOLVENT,"));

    let pgm = triband(&[
        "region",
        "--preset",
        "paper-ex2",
        "--window",
        "0.5,4.5,-1,1",
        "--res",
        "2,1",
        "--format",
        "pgm",
    ]);
    assert_eq!(pgm.stdout, b"P5\n2 1\n255\n\x40\xff".to_vec());

    let j = json(&triband(&[
        "region",
        "--preset",
        "paper-ex2",
        "--res",
        "3,3",
        "--format",
        "json",
    ]));
    assert_eq!(j["codes"].as_array().unwrap().len(), 9);
    assert_eq!(j["meta"]["window"]["re_min"], -3.0);
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("region.pgm");
    let out = triband(&[
        "region",
        "--preset",
        "paper-ex1",
        "--res",
        "7,5",
        "--format",
        "pgm",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let bytes = fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P5\n7 5\n255\n"));
    assert_eq!(bytes.len(), b"P5\n7 5\n255\n".len() + 35);
    fs::remove_file(path).ok();
}

#[test]
fn config_file_with_flag_override() {
    let path = scratch("run.cfg");
    fs::write(&path, "# example\npreset = paper-ex1\np = 1\n").unwrap();
    let cfg = path.to_str().unwrap();
    let v = json(&triband(&["norm", "--config", cfg]));
    assert_eq!(v["p"], 1.0);
    assert_eq!(v["empirical"], 4.0);
    assert_eq!(v["exact"], 4.0);
    let v = json(&triband(&["norm", "--config", cfg, "--p", "2"]));
    assert_eq!(v["p"], 2.0);
    assert!(v["exact"].is_null());
    fs::remove_file(path).ok();
}

#[test]
fn verify_passes_and_emits_json_lines() {
    let out = triband(&["verify", "--preset", "paper-ex2", "--res", "11,11"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() > 50);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["n_used"], 400);
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS oracle_agreement"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["classify", "--preset", "paper-ex1"],
        vec!["classify", "--lambda", "1"],
        vec!["classify", "--preset", "nope", "--lambda", "1"],
        vec!["classify", "--params", "1,1,1,-1,0,0", "--lambda", "3"],
        vec!["classify", "--params", "1,1,0,1,0,0", "--lambda", "3"],
        vec!["norm", "--preset", "delta", "--p", "0.5"],
        vec!["region", "--preset", "delta", "--window", "1,0,0,1"],
        vec!["region", "--preset", "delta", "--format", "png"],
        vec!["frobnicate"],
    ] {
        let out = triband(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn seeded_norm_is_reproducible() {
    let a = triband(&["norm", "--preset", "paper-ex1", "--p", "3", "--seed", "42"]);
    let b = triband(&["norm", "--preset", "paper-ex1", "--p", "3", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let e = v["empirical"].as_f64().unwrap();
    assert!(e >= v["lower"].as_f64().unwrap() - 1e-12 && e <= v["upper"].as_f64().unwrap() + 1e-12);
}
