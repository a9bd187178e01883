use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numrange"))
        .args(args)
        .env_remove("NUMRANGE_CATALOG")
        .output()
        .expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn nindex_linf2_is_one_and_exact() {
    let o = run(&["--cmd", "nindex", "--target", "linf2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    let it = &v["items"][0];
    assert_eq!(it["value"]["value"].as_f64(), Some(1.0));
    assert_eq!(it["value"]["exact"], Value::Bool(true));
}

#[test]
fn verify_small_catalog_exits_zero() {
    let o = run(&["--cmd", "verify", "--target", "l12,linf2,l22", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.contains(",violated,"));
    assert!(text.lines().count() > 20);
}

#[test]
fn unknown_label_is_named() {
    let o = run(&["--cmd", "opnorm", "--target", "swap,nosuch"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nosuch"));
    assert!(o.stdout.is_empty());
}

#[test]
fn wrong_kind_is_an_input_error() {
    let o = run(&["--cmd", "opnorm", "--target", "l22"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("l22"));
}

#[test]
fn csv_header() {
    let o = run(&["--cmd", "opnorm", "--target", "swap", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("command,targets,value,flag,margin,verdict,seed"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "opnorm");
    assert_eq!(row[3], "exact");
    assert_eq!(row[6], "0x5eed");
}

#[test]
fn json_is_deterministic_apart_from_wall_time() {
    let args = ["--cmd", "vradius", "--target", "rot,swap,cdiag", "--seed", "1234"];
    let a = numrange_cli::without_wall_time(&String::from_utf8(run(&args).stdout).unwrap());
    let b = numrange_cli::without_wall_time(&String::from_utf8(run(&args).stdout).unwrap());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a["seed"], "0x1234");
}

#[test]
fn every_number_is_flagged() {
    let o = run(&["--cmd", "daugavet", "--target", "swap,rot"]);
    let v = json_of(&o);
    for k in ["tolerance", "budget", "wall_time_ms"] {
        assert!(v[k]["exact"].is_boolean(), "{k}");
    }
    for it in v["items"].as_array().unwrap() {
        assert!(it["value"]["exact"].is_boolean());
    }
}

#[test]
fn catalog_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"[{"label": "tri", "kind": "polyhedral", "field": "real", "vertices": [["1", "0"], ["0", "1"], ["-1", "-1"]]}]"#).unwrap();
    let o = run(&["--catalog", p.to_str().unwrap(), "--cmd", "nindex", "--target", "tri"]);
    assert_eq!(o.status.code(), Some(1), "a non-symmetric set is not a unit ball");

    std::fs::write(&p, r#"[{"label": "sq", "kind": "polyhedral", "field": "real", "facets": [["1", "0"], ["0", "1"]]}]"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_numrange"))
        .args(["--cmd", "nindex", "--target", "sq"])
        .env("NUMRANGE_CATALOG", &p)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_of(&o)["items"][0]["value"]["value"].as_f64(), Some(1.0));
}

#[test]
fn bad_vertex_fails_to_load() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(
        &p,
        r#"[{"label": "ok", "kind": "lp", "field": "real", "p": "1", "dim": 2},
            {"label": "bad", "kind": "polyhedral", "field": "real", "facets": [["1", "0"], ["0", "1"]], "vertices": [["3/2", "0"], ["0", "1"]]}]"#,
    )
    .unwrap();
    let o = run(&["--catalog", p.to_str().unwrap(), "--cmd", "nindex", "--target", "ok"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad") && err.contains("entry 1"), "{err}");
}

#[test]
fn out_file_and_human_format() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.txt");
    let o = run(&["--cmd", "norm", "--target", "hex", "--vector", "1/3,-2/3", "--format", "human", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.contains("hex norm = 1 (exact)"), "{text}");
}

#[test]
fn guardrail_errors_are_per_item() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(
        &p,
        r#"[{"label": "l16", "kind": "lp", "field": "real", "p": "1", "dim": 6},
            {"label": "l12", "kind": "lp", "field": "real", "p": "1", "dim": 2}]"#,
    )
    .unwrap();
    let o = run(&["--catalog", p.to_str().unwrap(), "--cmd", "nindex", "--target", "l16,l12"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert!(v["items"][0]["error"].is_string());
    assert_eq!(v["items"][1]["value"]["value"].as_f64(), Some(1.0));
}

#[test]
fn seed_must_be_hex() {
    let o = run(&["--cmd", "nindex", "--target", "l12", "--seed", "zz"]);
    assert_ne!(o.status.code(), Some(0));
}
