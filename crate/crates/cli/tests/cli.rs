use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teledistill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(out: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn bounds_example_chain() {
    let out = run(&["bounds", "--noise", data("isotropic01.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let t = text(&out);
    assert!(t.contains("0.372508 bits per pair"), "{t}");
}

#[test]
fn bounds_flags_vacuous_and_underived() {
    let dir = tempfile::tempdir().unwrap();
    let noisy = dir.path().join("noisy.json");
    std::fs::write(&noisy, r#"{"d": 2, "n": 2, "form": "iid", "single_letter": [0.25, 0.25, 0.25, 0.25]}"#).unwrap();
    let t = text(&run(&["bounds", "--noise", noisy.to_str().unwrap()]));
    assert!(t.contains("bound vacuous"), "{t}");

    let table = dir.path().join("table.json");
    std::fs::write(&table, r#"{"d": 2, "n": 1, "form": "explicit", "table": {"[[0,0]]": 1.0}}"#).unwrap();
    let out = run(&["bounds", "--noise", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out).contains("bound not derived"));
}

#[test]
fn teleportation_check_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["verify-lemma1", "--d", "2", "--n", "1", "--seed", "7", "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(text(&out).starts_with("PASS"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let rows = csv_rows(&a);
    assert_eq!(&rows[0][3], "7");
    assert!(rows[0][5].parse::<f64>().unwrap() < 1e-9);
}

#[test]
fn twirl_and_choi_batteries() {
    for cmd in ["twirl", "choi-roundtrip"] {
        let out = run(&[cmd, "--d", "3", "--seed", "1", "--format", "json"]);
        assert_eq!(out.status.code(), Some(0), "{}", text(&out));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["seed"], 1);
    }
}

#[test]
fn code_fidelity_bitflip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let out = run(&[
        "code-fidelity",
        "--code",
        data("bitflip.json").to_str().unwrap(),
        "--noise",
        data("x01.json").to_str().unwrap(),
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let header = csv::Reader::from_path(&path).unwrap().headers().unwrap().clone();
    let expected = [
        "scenario", "d", "n", "K", "rate", "fidelity_way1", "fidelity_way2", "gap", "bound_corollary1",
        "bound_hashing_or_markov",
    ];
    assert_eq!(header.iter().collect::<Vec<_>>(), expected);
    let row = &csv_rows(&path)[0];
    for col in [5, 6] {
        assert!((row[col].parse::<f64>().unwrap() - 0.972).abs() < 1e-9);
    }
}

#[test]
fn distill_battery_and_single() {
    let out = run(&["distill", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out));
    let t = String::from_utf8_lossy(&out.stderr);
    assert!(t.contains("battery seed 5"));
    assert!(t.contains("[pure-state]") && t.contains("[dense]"));

    let out = run(&[
        "distill",
        "--code",
        data("bitflip.json").to_str().unwrap(),
        "--noise",
        data("x01.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["rows"][0]["fidelity_way1"].as_f64().unwrap() - 0.972).abs() < 1e-9);
}

#[test]
fn exponent_command() {
    let out = run(&["exponent", "--noise", data("x01.json").to_str().unwrap(), "--rate", "0.9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("above-capacity"));
    let out = run(&["exponent", "--noise", data("isotropic01.json").to_str().unwrap(), "--rate", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"d": 2, "n": 2, "stabilizer_basis": [[0,1,0,0],[1,0,0,0]]}"#).unwrap();
    let out = run(&["code-fidelity", "--code", bad.to_str().unwrap(), "--noise", data("x01.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out).contains("stabilizer_basis"));

    let out = run(&["code-fidelity", "--code", data("bitflip.json").to_str().unwrap(), "--noise", data("isotropic01.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "register mismatch is a configuration error");

    let out = run(&["verify-lemma1", "--d", "2", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out).contains("resource guard"));

    let out = run(&["bounds", "--noise", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
