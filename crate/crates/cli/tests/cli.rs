use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mrlrc"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn simulate(name: &str, dir: &tempfile::TempDir) -> (Output, PathBuf) {
    let transcript = dir.path().join(format!("{name}.transcript"));
    let out = run(&[
        "simulate",
        config(name).to_str().unwrap(),
        "--transcript",
        transcript.to_str().unwrap(),
    ]);
    (out, transcript)
}

#[test]
fn example_direct_report_shows_formula_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = simulate("example1_direct.toml", &dir);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("formula direct: k_e = 6, k_s = 1"), "{text}");
    assert!(text.contains("oracle: k_e = 6, k_s = 1"), "{text}");
}

#[test]
fn example_forwarded_report() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = simulate("example1_forwarded.toml", &dir);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("formula forwarded (list [2, 3, 1]): k_e = 6, k_s = 1"), "{text}");
    assert!(text.contains("oracle: k_e = 6"), "{text}");
}

#[test]
fn zero_failures_give_an_empty_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let (out, transcript) = simulate("no_failures.toml", &dir);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(transcript).unwrap(), "");
}

#[test]
fn too_many_failures_exit_unrecoverable() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = simulate("unrecoverable.toml", &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unrecoverable"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("example1_direct.toml"))
        .unwrap()
        .replace("l2_groups = [1]", "l2_groups = [7]");
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let out = run(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eavesdropper"));
}

#[test]
fn missing_config_is_a_usage_error() {
    assert_eq!(run(&["simulate"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "/nonexistent.toml"]).status.code(), Some(1));
}

#[test]
fn transcripts_are_deterministic_and_reanalyzable() {
    let dir = tempfile::tempdir().unwrap();
    let (first, transcript) = simulate("random_failures.toml", &dir);
    let bytes = std::fs::read(&transcript).unwrap();
    let (second, _) = simulate("random_failures.toml", &dir);
    assert_eq!(std::fs::read(&transcript).unwrap(), bytes);
    assert_eq!(stdout(&first), stdout(&second));

    let out = run(&[
        "analyze",
        transcript.to_str().unwrap(),
        config("random_failures.toml").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let analyzed = stdout(&out);
    let simulated = stdout(&first);
    let oracle = |s: &str| s.lines().find(|l| l.starts_with("oracle:")).map(str::to_owned);
    assert_eq!(oracle(&analyzed), oracle(&simulated));
}

#[test]
fn sweep_matches_pinned_rows_and_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let base = config("sweep.toml");
    let args = [
        "sweep",
        base.to_str().unwrap(),
        "--g-min",
        "1",
        "--g-max",
        "15",
        "--out",
        csv.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "g,k,ks_direct,ks_forwarded,ks_lrc_no_global");
    assert_eq!(lines[1], "1,4,0,0,0");
    assert_eq!(lines[5], "5,32,16,22,28");
    assert_eq!(lines[15], "15,102,56,92,98");
    assert_eq!(run(&args).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), text);
}

#[test]
fn sweep_rejects_groups_beyond_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let out = run(&[
        "sweep",
        config("sweep.toml").to_str().unwrap(),
        "--g-min",
        "1",
        "--g-max",
        "20",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 9, "{text}");
}
