use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cochain-transfer"))
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../golden").join(name)
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: Option<&Path>) -> Output {
    let mut cmd = bin();
    cmd.args(args).arg("--config").arg(config);
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.output().unwrap()
}

const EXPORTS: [&str; 4] = ["tensors.json", "structure_constants.json", "xi.json", "cme.json"];

#[test]
fn exports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "square.json", r#"{"geometry":"square","K_or_D":1,"suites":"all"}"#);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["all"], &cfg, Some(out));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    }
    for name in EXPORTS {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn square_report_names_h_gamma_and_cubic_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "square.json", r#"{"geometry":"square","K_or_D":1,"suites":"all"}"#);
    let out = dir.path().join("out");
    let o = run(&["all", "--json"], &cfg, Some(&out));
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    let h_gamma = checks.iter().find(|c| c["name"] == "h(γ) = 0").unwrap();
    assert_eq!(h_gamma["measured"], 0.0);
    assert!(report["files"]["tensors"].as_str().unwrap().ends_with("tensors.json"));
    let tensors: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("tensors.json")).unwrap()).unwrap();
    let words = tensors["words"].as_array().unwrap();
    assert!(words.iter().all(|w| w["word"].as_array().unwrap().len() <= 3));
    assert!(report["square_h2"]["value"].is_number());
}

#[test]
fn smallest_interval_has_zero_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "i.json", r#"{"geometry":"interval","nodes":[0,1],"window":{"K":1}}"#);
    let out = dir.path().join("out");
    let o = run(&["cme"], &cfg, Some(&out));
    assert!(o.status.success());
    let cme: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("cme.json")).unwrap()).unwrap();
    assert_eq!(cme["max_abs_residual"], 0.0);
    assert_eq!(cme["dropped"], 0);
}

#[test]
fn verify_diffs_golden_tables() {
    let dir = tempfile::tempdir().unwrap();
    let json = format!(
        r#"{{"geometry":"circle","n":4,"window":{{"K":1}},"golden":{:?}}}"#,
        golden("circle_n4_K1.json")
    );
    let cfg = write_config(dir.path(), "c.json", &json);
    let o = run(&["verify", "--suite", "transfer"], &cfg, None);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(text.contains("PASS [transfer] engine matches the golden tables"), "{text}");
}

#[test]
fn tampered_golden_table_fails_with_status_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut g: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(golden("interval_3nodes_K2.json")).unwrap()).unwrap();
    g["length1"][0]["value"] = serde_json::json!({"rat": "12345"});
    let gpath = dir.path().join("bad.json");
    std::fs::write(&gpath, g.to_string()).unwrap();
    let json = format!(
        r#"{{"geometry":"interval","nodes":["0","1/2","1"],"window":{{"K":2}},"golden":{gpath:?}}}"#
    );
    let cfg = write_config(dir.path(), "i.json", &json);
    let o = run(&["verify"], &cfg, None);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(1), "{text}");
    assert!(text.contains("FAIL [transfer] engine matches the golden tables"));
    assert!(text.contains("witness length 1"), "{text}");
}

#[test]
fn config_errors_exit_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    for (i, json) in [
        r#"{"geometry":"torus"}"#,
        r#"{"geometry":"interval","nodes":[0,1],"tol":0}"#,
        r#"{"geometry":"interval","nodes":["1","0"]}"#,
        "{",
    ]
    .iter()
    .enumerate()
    {
        let cfg = write_config(dir.path(), &format!("bad{i}.json"), json);
        let o = run(&["build"], &cfg, None);
        assert_eq!(o.status.code(), Some(2), "{json}");
    }
    let ok = write_config(dir.path(), "ok.json", r#"{"geometry":"interval"}"#);
    assert_eq!(run(&["build", "--tol", "-1"], &ok, None).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"], &ok, None).status.code(), Some(2));
    assert_eq!(
        run(&["build"], &dir.path().join("missing.json"), None).status.code(),
        Some(2)
    );
}

#[test]
fn build_subcommand_runs_only_build_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"geometry":"circle","n":4}"#);
    let o = run(&["build", "--json"], &cfg, None);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["suite"] == "build"));
}

#[test]
fn shipped_configs_verify_cleanly() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let o = run(&["verify"], &path, None);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stdout));
        seen += 1;
    }
    assert!(seen >= 5);
}
