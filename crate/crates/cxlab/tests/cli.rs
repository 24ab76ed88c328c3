use std::path::PathBuf;
use std::process::{Command, Output};

fn cxlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cxlab")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cxlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_accepts_shipped_scenario() {
    let out = cxlab(&["check", &scenario("quadric_ci.cx")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok, 17 task(s)"));
}

#[test]
fn check_reports_location_of_parse_errors() {
    let path = temp_file("bad.cx", "field p = 5\nring A = [x] / (x^2)\nmodule k = k B\n");
    let out = cxlab(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:"), "{err}");
}

#[test]
fn missing_file_exits_with_two() {
    let out = cxlab(&["run", "/nonexistent/scenario.cx"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_report_is_deterministic_across_processes() {
    let path = scenario("quadric_ci.cx");
    let first = cxlab(&["run", &path, "--json", "--seed", "3"]);
    let second = cxlab(&["run", &path, "--json", "--seed", "3"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("\"seed\": 3"));
}

#[test]
fn failed_task_exits_with_one_and_writes_report() {
    let src = temp_file(
        "fail.cx",
        "field p = 5\nring Q = [x, y] / (x^2, y^2)\ntask verify-complex Q matrices=[[[x]], [[y]]] range=0..1\n",
    );
    let out_path = src.with_extension("txt");
    let out = cxlab(&["run", src.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = std::fs::read_to_string(out_path).unwrap();
    assert!(report.contains("FAILED") && report.contains("d_0 d_1 != 0"), "{report}");
}
