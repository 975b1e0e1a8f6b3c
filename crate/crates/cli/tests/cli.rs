use std::process::{Command, Output};

fn orthlab(dir: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthlab"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = orthlab(dir.path(), &["orth", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(
        orthlab(dir.path(), &["orth", "--set", "q=1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        orthlab(dir.path(), &["classgroup", "--set", "D=12"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        orthlab(
            dir.path(),
            &["mollify", "--set", "strict=true", "--set", "c=1/16"]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = orthlab(
        dir.path(),
        &["report", "--set", "kind=sums", "--set", "precision=20"],
    );
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn polycert_reports_failure_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = orthlab(dir.path(), &["-q", "polycert"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("polycert.json")).unwrap()).unwrap();
    let status = |name: &str| {
        report["certificates"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["certificate"] == name)
            .unwrap()["status"]
            .clone()
    };
    assert_eq!(status("near_diagonal"), "pass");
    assert_eq!(status("sos_u"), "fail");
    assert!(dir.path().join("polycert.manifest.json").exists());
}

#[test]
fn gauss770_golden_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = orthlab(dir.path(), &["-q", "orth", "--gauss770"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("gauss770.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(
        v["orientations"],
        serde_json::json!([[6, -4, 129], [6, 4, 129]])
    );
    let m: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("gauss770.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["config"]["gauss770"], "true");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn config_file_then_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# class group\nD = 23\n").unwrap();
    let read = |args: &[&str]| {
        assert_eq!(orthlab(dir.path(), args).status.code(), Some(0));
        let v: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join("classgroup.json")).unwrap())
                .unwrap();
        v["h"].as_u64().unwrap()
    };
    assert_eq!(
        read(&["-q", "--config", cfg.to_str().unwrap(), "classgroup"]),
        3
    );
    assert_eq!(
        read(&[
            "-q",
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "D=3080",
            "classgroup"
        ]),
        32
    );
}
