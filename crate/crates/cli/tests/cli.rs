use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hyperinv::tensor::contract_one_free;
use hyperinv::{ExactScalar, SymTensor};
use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperinv")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, doc: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, doc.to_string()).unwrap();
    path
}

fn doc(rank: usize, dim: usize, entries: &[(&[usize], &str)]) -> Value {
    json!({
        "rank": rank,
        "dim": dim,
        "entries": entries.iter().map(|(i, v)| json!({"index": i, "value": v})).collect::<Vec<_>>(),
    })
}

fn example_a() -> Value {
    doc(4, 2, &[(&[0, 0, 0, 0], "1"), (&[1, 1, 1, 1], "1"), (&[0, 1, 0, 1], "1")])
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn value_at<'a>(entries: &'a Value, index: &[usize]) -> Option<&'a str> {
    entries
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["index"] == json!(index))
        .map(|e| e["value"].as_str().unwrap())
}

#[test]
fn det_fixtures() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &example_a());
    let o = run(&["det", p(&a)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4\n");

    let id = write(&dir, "id.json", &doc(2, 2, &[(&[0, 0], "1"), (&[1, 1], "1")]));
    assert_eq!(stdout(&run(&["det", p(&id)])), "1\n");

    let s = write(&dir, "s.json", &doc(3, 2, &[(&[0, 0, 0], "1"), (&[1, 1, 1], "1")]));
    let o = run(&["det", p(&s)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("0 (identically"));
    assert_eq!(lines.next().unwrap(), "cayley 1");
}

#[test]
fn invariants_fixtures() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &doc(2, 2, &[(&[0, 0], "2"), (&[0, 1], "1"), (&[1, 1], "3")]));
    let id = write(&dir, "id.json", &doc(2, 2, &[(&[0, 0], "1"), (&[1, 1], "1")]));
    let o = run(&["invariants", p(&a), "--metric", p(&id)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(serde_json::from_str::<Value>(&stdout(&o)).unwrap(), json!(["1", "5", "5"]));

    let b = write(&dir, "b.json", &example_a());
    let o = run(&["invariants", p(&b), "--metric", p(&b)]);
    assert_eq!(serde_json::from_str::<Value>(&stdout(&o)).unwrap(), json!(["1", "2", "1"]));

    let singular = write(&dir, "sing.json", &doc(2, 2, &[(&[0, 0], "1"), (&[0, 1], "1"), (&[1, 1], "1")]));
    let o = run(&["invariants", p(&a), "--metric", p(&singular)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/det G"));
}

#[test]
fn inverse_fixtures_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let a_doc = example_a();
    let a = write(&dir, "a.json", &a_doc);
    let o = run(&["inverse", p(&a)]);
    assert_eq!(o.status.code(), Some(0));
    let inv_doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(value_at(&inv_doc["entries"], &[0, 0, 0, 0]), Some("1/4"));

    // feed the output back and contract against the input
    let load = |v: &Value| {
        SymTensor::from_entries(
            v["rank"].as_u64().unwrap() as usize,
            v["dim"].as_u64().unwrap() as usize,
            v["entries"].as_array().unwrap().iter().map(|e| {
                let idx: Vec<usize> = serde_json::from_value(e["index"].clone()).unwrap();
                (idx, e["value"].as_str().unwrap().parse::<ExactScalar>().unwrap())
            }),
        )
        .unwrap()
    };
    assert!(contract_one_free(&load(&inv_doc), &load(&a_doc)).unwrap().is_identity());

    let id = write(&dir, "id.json", &doc(2, 3, &[(&[0, 0], "1"), (&[1, 1], "1"), (&[2, 2], "1")]));
    let o = run(&["inverse", p(&id)]);
    assert_eq!(
        serde_json::from_str::<Value>(&stdout(&o)).unwrap(),
        doc(2, 3, &[(&[0, 0], "1"), (&[1, 1], "1"), (&[2, 2], "1")])
    );

    let flat = write(
        &dir,
        "flat.json",
        &doc(3, 2, &[(&[0, 0, 0], "1"), (&[0, 0, 1], "1"), (&[0, 1, 1], "1"), (&[1, 1, 1], "1")]),
    );
    let o = run(&["inverse", p(&flat)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "--suite", "rank4", "--dim", "2", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));

    let o = run(&["verify", "--suite", "odd", "--dim", "2", "--seed", "1", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["constants"]["kappa"], "9/10");
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(check["status"], "pass");
        assert_eq!(check["residual"], "0");
    }

    let o = run(&["verify", "--suite", "rank2", "--dim", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("(d!)^r"));

    assert_eq!(run(&["verify", "--suite", "rank3", "--dim", "2"]).status.code(), Some(2));
}

#[test]
fn lift_fixtures() {
    let dir = TempDir::new().unwrap();
    let mixed = write(&dir, "m.json", &doc(3, 2, &[(&[0, 0, 0], "1"), (&[0, 1, 1], "1")]));
    let o = run(&["lift", p(&mixed)]);
    assert_eq!(o.status.code(), Some(0));
    let out: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(out["lifted"]["rank"], 6);
    assert_eq!(value_at(&out["lifted"]["entries"], &[0, 0, 0, 0, 1, 1]), Some("2/5"));

    let zero = write(&dir, "z.json", &doc(3, 2, &[]));
    let out: Value = serde_json::from_str(&stdout(&run(&["lift", p(&zero)]))).unwrap();
    assert_eq!(out["det"], "0");
    assert!(out["lifted"]["entries"].as_array().unwrap().is_empty());

    let diag = write(&dir, "d.json", &doc(3, 2, &[(&[0, 0, 0], "1"), (&[1, 1, 1], "1")]));
    let out: Value = serde_json::from_str(&stdout(&run(&["lift", p(&diag)]))).unwrap();
    assert_eq!(out["s_squared"], "1");
    assert_eq!(out["kappa"], "9/10");

    let a = write(&dir, "a.json", &example_a());
    assert_eq!(run(&["lift", p(&a)]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_2_without_output() {
    let dir = TempDir::new().unwrap();
    let cases = [
        json!({"rank": 2, "dim": 2, "entries": [{"index": [0, 1], "value": "1"}, {"index": [1, 0], "value": "2"}]}),
        json!({"rank": 2, "dim": 2, "entries": [{"index": [0, 2], "value": "1"}]}),
        json!({"rank": 2, "dim": 2, "entries": [{"index": [0], "value": "1"}]}),
        json!({"rank": 2, "dim": 2, "entries": [{"index": [0, 0], "value": "1.5"}]}),
        json!({"rank": 2, "dim": 2, "entries": [{"index": [0, 0], "value": "1/0"}]}),
        json!({"rank": 2, "dim": 2, "entries": [], "note": "x"}),
        json!({"rank": 0, "dim": 2, "entries": []}),
    ];
    for (i, case) in cases.iter().enumerate() {
        let path = write(&dir, &format!("bad{i}.json"), case);
        let o = run(&["det", p(&path)]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        assert!(o.stdout.is_empty(), "case {i}");
    }
    let o = run(&["det", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &example_a());
    for args in [
        vec!["verify", "--suite", "rank2", "--dim", "3", "--seed", "9", "--samples", "2"],
        vec!["verify", "--suite", "odd", "--dim", "2", "--seed", "4", "--samples", "3", "--pretty"],
        vec!["inverse", p(&a)],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(first.stdout, second.stdout);
    }
}
