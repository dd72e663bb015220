use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbicert"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn certify_passes_and_writes_the_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let o = run(&[
        "certify",
        config("three-lines.json").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(cert["intersections"]["d_p_squared"]["value"], "177");
    assert_eq!(cert["epsilon"]["rational_lower_bound"]["value"], "1/176");
    assert_eq!(cert["outcome"]["status"], "pass");
}

#[test]
fn certify_reports_failure_and_bad_input() {
    let o = run(&["certify", config("plane-one-line.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cz_inequality"));

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(run(&["certify", empty.to_str().unwrap()]).status.code(), Some(3));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"version": 1, "components": [{"degree": "x", "role": "paired"}]}"#).unwrap();
    let o = run(&["certify", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("components[0].degree"));
}

#[test]
fn orbifold_configuration_certifies_the_constants() {
    let o = run(&["certify", config("three-lines-orbifold.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["constants"]["n"]["value"], "42");
}

#[test]
fn search_lists_the_ansatz_first() {
    let o = run(&[
        "search",
        "--config",
        config("three-lines.json").to_str().unwrap(),
        "--bound",
        "6",
        "--limit",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("(4, 4, 4, 3)"), "{text}");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn constants_table() {
    let o = run(&["constants", "--config", config("three-lines.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    for needle in ["42", "69860", "156808", "2900873"] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }
    let capped = run(&[
        "constants",
        "--config",
        config("three-lines.json").to_str().unwrap(),
        "--cap",
        "10",
    ]);
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn plane_beta_is_a_third_of_the_degree() {
    let o = run(&["beta", "--plane", "--degree", "2", "--max-n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("closed form  2/3"), "{text}");
    assert_eq!(text.matches("2/3").count(), 6);
}

#[test]
fn stress_sweeps_report_no_violations() {
    let o = run(&["stress", "wang", "--samples", "200", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("violations     0"));

    let o = run(&[
        "stress",
        "probe",
        "--samples",
        "50",
        "--max-degree",
        "3",
        "--config",
        config("three-lines.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(first.get("ratio").is_some());
    assert!(text.contains("violations  0"));
}
