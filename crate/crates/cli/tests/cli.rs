use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rep2ldc"))
        .args(args)
        .env_remove("REP2LDC_CAP")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"field\": ").unwrap();
    assert_eq!(code(&run(&["verify", "--input", path(&bad)])), 1);
    assert_eq!(code(&run(&["rank-scan", "--input", path(&bad)])), 1);
    assert_eq!(code(&run(&["rank-scan", "--fixture", "nonsense(1)"])), 1);
}

#[test]
fn cap_is_enforced_from_flag_and_environment() {
    assert_eq!(code(&run(&["rank-scan", "--fixture", "signed-shift(4,3)", "--cap", "10"])), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_rep2ldc"))
        .args(["construct", "--fixture", "signed-shift(4,3)", "--h", "1"])
        .env("REP2LDC_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn cap_applies_to_group_files_too() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("group.json");
    let out = run(&["fixtures", "export", "--fixture", "signed-shift(4,3)", "--output", path(&spec)]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&run(&["rank-scan", "--input", path(&spec), "--cap", "63"])), 2);
    assert_eq!(code(&run(&["rank-scan", "--input", path(&spec), "--cap", "64"])), 0);
}

#[test]
fn degenerate_inputs() {
    assert_eq!(code(&run(&["construct", "--fixture", "signed-shift(4,3)", "--h", "g0"])), 4);
    assert_eq!(code(&run(&["construct", "--fixture", "signed-shift(4,3)", "--hs", "1", "--alphas", "0"])), 4);
    // rho(g1) in cyclic(7,3) is the scalar 3.
    assert_eq!(code(&run(&["construct", "--fixture", "cyclic(7,3)", "--h", "1", "--lambda", "3"])), 4);
}

#[test]
fn non_spanning_orbit_exits_five() {
    // The sum of all shifts has the all-ones line as its image, which shifts fix.
    let out = run(&["construct", "--fixture", "shift(4,3)", "--hs", "0,1,2,3", "--alphas", "1,1,1,1"]);
    assert_eq!(code(&out), 5, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_element_and_argument_mixes() {
    assert_eq!(code(&run(&["construct", "--fixture", "signed-shift(3,3)", "--h", "999"])), 1);
    assert_eq!(code(&run(&["construct", "--fixture", "signed-shift(3,3)", "--h", "x1"])), 1);
    assert_eq!(
        code(&run(&["construct", "--fixture", "signed-shift(3,3)", "--hs", "1,2", "--alphas", "1"])),
        1
    );
    assert_eq!(
        code(&run(&["construct", "--fixture", "signed-shift(3,3)", "--hs", "1,2", "--alphas", "1,-1", "--q", "3"])),
        1
    );
    assert_eq!(code(&run(&["construct", "--fixture", "signed-shift(3,3)", "--h", "1", "--format", "csv"])), 1);
    assert_ne!(code(&run(&["construct", "--fixture", "signed-shift(3,3)"])), 0);
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = run(&[
        "construct",
        "--fixture",
        "signed-shift(4,3)",
        "--h",
        "1",
        "--output",
        path(&cert),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let summary: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["m"], 64);
    assert_eq!(summary["t"], 4);
    assert_eq!(summary["verified"], true);

    let out = run(&["verify", "--input", path(&cert), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["pass"], true);

    let text = stdout(&run(&["verify", "--input", path(&cert)]));
    assert!(text.contains("verdict: pass"), "{text}");
    assert!(text.contains("entropy audit: pass"), "{text}");
}

#[test]
fn json_without_output_prints_the_certificate() {
    let out = run(&["construct", "--fixture", "dihedral(5,11)", "--h", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let cert: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["kind"], "special2");
    assert_eq!(cert["code"]["m"], 10);
}

fn tamper(cert: &Path, edit: impl FnOnce(&mut Value)) -> i32 {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(cert).unwrap()).unwrap();
    edit(&mut v);
    let bad = cert.with_extension("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    code(&run(&["verify", "--input", path(&bad)]))
}

#[test]
fn tampered_certificates_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let made = run(&["construct", "--fixture", "signed-shift(4,3)", "--h", "1", "--output", path(&cert)]);
    assert_eq!(code(&made), 0);

    let v = std::fs::read_to_string(&cert).unwrap();
    let v: Value = serde_json::from_str(&v).unwrap();
    let old = v["code"]["vectors"][5][0].as_i64().unwrap();
    assert_eq!(tamper(&cert, |v| v["code"]["vectors"][5][0] = ((old + 1) % 3).into()), 3);
    assert_eq!(tamper(&cert, |v| v["achieved_delta"] = "1".into()), 3);
    assert_eq!(tamper(&cert, |v| v["code"]["claimed_delta"] = "9/10".into()), 3);
    assert_eq!(tamper(&cert, |v| v["z"][0] = ((v["z"][0].as_i64().unwrap() + 1) % 3).into()), 3);
    assert_eq!(tamper(&cert, |v| v["code"]["matchings"][0][0][1] = 63.into()), 3);
}

#[test]
fn verify_plain_codes() {
    let dir = tempfile::tempdir().unwrap();
    let had = dir.path().join("had.json");
    assert_eq!(code(&run(&["fixtures", "export", "--fixture", "hadamard(3)", "--output", path(&had)])), 0);
    let out = run(&["verify", "--input", path(&had)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("tight"));

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&had).unwrap()).unwrap();
    v["form"] = "general".into();
    let general = dir.path().join("general.json");
    std::fs::write(&general, v.to_string()).unwrap();
    let out = run(&["verify", "--input", path(&general)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("not applicable"));

    v["form"] = "special2".into();
    v["matchings"][1][0] = serde_json::json!([0, 1]);
    std::fs::write(&general, v.to_string()).unwrap();
    let out = run(&["verify", "--input", path(&general)]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("coordinate 1, set 0"), "{}", stdout(&out));
}

#[test]
fn rank_scan_formats() {
    let out = run(&["rank-scan", "--fixture", "dihedral(5,11)", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.records().count(), 9);

    let out = run(&["rank-scan", "--fixture", "signed-shift(4,3)", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["reports"].as_array().unwrap().len(), 63);
    assert_eq!(v["fixed_space_average"]["average"], "1");
}

#[test]
fn demo_and_listing() {
    let out = run(&["demo"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains("[FAIL]"));
    assert_eq!(text.matches("[ok]").count(), 8);

    let out = run(&["demo", "--field", "0", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], true);

    let list = stdout(&run(&["fixtures", "list"]));
    for name in ["signed-shift", "dihedral", "symmetric", "cyclic", "shift", "hadamard"] {
        assert!(list.contains(name));
    }
}
