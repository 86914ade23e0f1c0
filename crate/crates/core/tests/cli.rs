use std::path::Path;
use std::process::Command;

fn tiretrack(config: &str, out: &Path) -> std::process::Output {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_tiretrack"))
        .arg(&cfg)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn success_lists_artifacts() {
    let out = tempfile::tempdir().unwrap();
    let o = tiretrack(r#"{"command":"monodromy","curve":{"variant":"circle","radius":2.0}}"#, out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let listed = String::from_utf8(o.stdout).unwrap();
    assert_eq!(listed.lines().count(), 3);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["classification"], "hyperbolic");
    let t = summary["abs_trace"].as_f64().unwrap();
    assert!((t - 230.76).abs() < 0.01, "{t}");
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let o = tiretrack(r#"{"command":"monodromy","bike":{"ell":0}}"#, out.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ell"));
    let o = tiretrack("not json", out.path());
    assert_eq!(o.status.code(), Some(1));
    let o = tiretrack(
        r#"{"command":"bisect","curve":{"variant":"circle","radius":1.0},"sweep":{"bracket":[2.0,3.0]}}"#,
        out.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let missing = Command::new(env!("CARGO_BIN_EXE_tiretrack")).arg("/nonexistent/run.json").output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn finn_and_bisect_artifacts() {
    let out = tempfile::tempdir().unwrap();
    let o = tiretrack(
        r#"{"command":"bisect","curve":{"variant":"ellipse","a":2.0,"b":1.0},"output":{"stem":"ellipse"}}"#,
        out.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(out.path().join("ellipse.svg")).unwrap();
    // four cusp markers on the coalesced rear
    assert_eq!(svg.matches("<circle").count(), 4);
    let csv = std::fs::read_to_string(out.path().join("ellipse.csv")).unwrap();
    assert!(csv.starts_with("scale,area,perimeter,signed_rear_length,cusps,"));
}
