use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strichartz-lab")).args(args).current_dir(cwd).output().unwrap()
}

const BESSEL: &str = "kind = \"bessel-verify\"\noutput = \"out/bessel.csv\"\n[params]\norders = [0.0, 1.5]\nradii = [0.5, 3.0]\n";

#[test]
fn run_writes_results_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.toml"), BESSEL).unwrap();
    let out = lab(&["run", "b.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/bessel.csv")).unwrap();
    assert!(csv.starts_with("# strichartz-lab results, schema_version = 1\r\n"));
    assert_eq!(csv.lines().count(), 2 + 4);
    assert!(dir.path().join("out/bessel.meta.toml").exists());
}

#[test]
fn output_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.toml"), BESSEL).unwrap();
    let out = lab(&["run", "b.toml", "-o", "elsewhere.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("elsewhere.csv").exists());
    assert!(dir.path().join("elsewhere.meta.toml").exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn validation_failure_exits_2_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "kind = \"khat-scan\"\n[params]\na = 2.0\nd = 3\nepsilon = [0.1]\n").unwrap();
    let out = lab(&["validate", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));

    std::fs::write(dir.path().join("q.toml"), "kind = \"admissible-table\"\n[params]\na = 2.0\nd = 3\nq = [1.5]\np = [2]\n").unwrap();
    let out = lab(&["run", "q.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("q = 1.5 violates the exponent bound q >= 2"), "{err}");
    assert!(!dir.path().join("q.csv").exists());
}

#[test]
fn io_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["run", "missing.toml"], dir.path()).status.code(), Some(1));
    assert_eq!(lab(&["plot", "missing.csv"], dir.path()).status.code(), Some(1));
}

#[test]
fn validate_reports_kind() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.toml"), BESSEL).unwrap();
    let out = lab(&["validate", "b.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid bessel-verify config"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn plot_warns_on_unknown_metric() {
    let dir = tempfile::tempdir().unwrap();
    let csv = "# strichartz-lab results, schema_version = 1\r\nexperiment,params,metric,value,error,seed\r\nx,r=1.0,mystery,1.0,exact,0\r\nx,nu=0.0;r=1.0,bessel_j,0.76,1e-17,0\r\n";
    std::fs::write(dir.path().join("r.csv"), csv).unwrap();
    let out = lab(&["plot", "r.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipping unknown metric `mystery`"));
    let script = std::fs::read_to_string(dir.path().join("r.py")).unwrap();
    assert!(script.contains("errorbar"));
    assert!(!script.contains("mystery"));
}

#[test]
fn bad_thread_count_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.toml"), BESSEL).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_strichartz-lab"))
        .args(["validate", "b.toml"])
        .env(strichartz_lab::THREADS_ENV, "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
