use std::fs;
use std::process::{Command, Output};

fn harness(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vilenkin-harness"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn passing_run_exits_zero_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = harness(&["lemma-glukhov", "--m", "2^4", "--n-list", "0,1,2", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(dir.path().join("lemma-glukhov.csv")).unwrap();
    assert!(table.starts_with("p,n,integral,root,ratio\n"));
    assert_eq!(table.lines().count(), 1 + 2 * 3);
    let summary = fs::read_to_string(dir.path().join("lemma-glukhov.summary.csv")).unwrap();
    assert_eq!(summary, "experiment,checks_passed,checks_total\nlemma-glukhov,3,3\n");
}

#[test]
fn failing_check_exits_one() {
    // on 2^2 the smooth test function is constant, so the strict trend check cannot hold
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = harness(&["strong-means", "--m", "2^2", "--function", "smooth", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    let checks = fs::read_to_string(dir.path().join("strong-means.checks.csv")).unwrap();
    assert!(checks.contains("\"smooth trend: mean(M_d,M_d) < mean(2,2)\",fail,"));
    let summary = fs::read_to_string(dir.path().join("strong-means.summary.csv")).unwrap();
    assert!(summary.ends_with("strong-means,2,3\n"));
}

#[test]
fn calibrated_counterexample_shows_growth() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = harness(&["counterexample", "--c-prime", "0.19", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let checks = fs::read_to_string(dir.path().join("counterexample.checks.csv")).unwrap();
    assert!(checks.contains("diagnostic grows with k,pass,"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(harness(&["no-such-experiment"]).status.code(), Some(2));
    assert_eq!(harness(&[]).status.code(), Some(2));
    assert_eq!(harness(&["kernels", "--m", "2,x"]).status.code(), Some(2));
    let o = harness(&["kernels", "--m", "2^13"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# glukhov desk run\nm = 2^4\nn-list = 0,1,2,3\np = 1\n").unwrap();
    let out = dir.path().join("out");
    let o = harness(&[
        "lemma-glukhov",
        "--config",
        cfg.to_str().unwrap(),
        "--n-list",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("lemma-glukhov.csv")).unwrap();
    assert_eq!(table.lines().count(), 2);

    fs::write(&cfg, "m = 2^4\ntrials = many\n").unwrap();
    let o = harness(&["transform", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, field `trials`"));
    let o = harness(&["transform", "--trials", "abc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("flag --trials"));
}
