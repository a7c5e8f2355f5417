use std::fs;
use std::process::{Command, Output};

fn decaylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decaylab"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn bessel_table_json_has_exact_entries() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = decaylab(&["bessel-table", "--kmax", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["a"][0][2], "3");
    assert_eq!(v["manifest"]["seed"], 0);
    assert_eq!(v["manifest"]["subcommand"], "bessel-table");
    assert_eq!(v["columns"][0], "j");
}

#[test]
fn lq_scan_row_for_q_three() {
    let out = decaylab(&["lq-scan", "--d", "2", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("d,q,classification"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("2,3.0,DIVERGENT,"), "{row}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(decaylab(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(decaylab(&["lq-scan", "--p", "3"]).status.code(), Some(1));
    assert_eq!(decaylab(&["bessel-table", "--kmax", "99"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, "{\n  \"d\": 2,\n  \"unknown\": 1\n}\n").unwrap();
    let out = decaylab(&["lq-scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown field") && err.contains("line 3"), "{err}");
}

#[test]
fn unwritable_output_exits_one() {
    let out = decaylab(&["bessel-table", "--out", "/nonexistent-dir/t.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_output_has_manifest_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = decaylab(&["fbi-check", "--d", "1", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("fbi-check.csv")).unwrap();
    assert!(csv.starts_with("x0,xi0,re,im,x_dependence\n"));
    assert_eq!(csv.lines().count(), 101);
    let m: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("fbi-check.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 7);
    assert_eq!(m["passed"], true);
}

#[test]
fn verify_all_quick_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let out = decaylab(&["verify-all", "--quick", "--seed", "0", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        bytes.push(fs::read(&path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}
