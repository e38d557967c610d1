use std::path::PathBuf;
use std::process::{Command, Output};

use jitterbound::frontend::{parse_xta, Report, TraceDocument, VerdictKind};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jitterbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn satisfied_check_prints_one_line() {
    let o = run(&["check", &model("chain.toml")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("SATISFIED"));
}

#[test]
fn violated_check_writes_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let o = run(&[
        "check",
        &model("chain.toml"),
        "--bound",
        "5",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let doc: TraceDocument = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(doc.steps.len() > 1);
    assert!(doc.steps.last().unwrap().armed);
}

#[test]
fn machine_report_parses_back() {
    let o = run(&["check", &model("chain.toml"), "--format", "machine", "--wcrt"]);
    assert_eq!(o.status.code(), Some(0));
    let report = Report::parse_machine(&stdout(&o)).unwrap();
    assert_eq!(report.verdict, VerdictKind::Satisfied);
    assert_eq!(report.bound.ticks, 60);
    assert_eq!(report.worst_case.unwrap().worst.unwrap().ticks, 55);
}

#[test]
fn exhausted_search_exits_2() {
    let o = run(&["check", &model("chain.toml"), "--max-states", "1", "--quiet"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn other_orders_agree() {
    for order in ["dfs", "random"] {
        let o = run(&[
            "check",
            &model("chain.toml"),
            "--order",
            order,
            "--seed",
            "7",
            "--bound",
            "5",
        ]);
        assert_eq!(o.status.code(), Some(1), "{order}");
    }
}

#[test]
fn channel_mismatch_fails_validation() {
    let o = run(&["validate", &model("bad_channels.toml")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("setpoint"));
    let ok = run(&["validate", &model("steam_boiler.toml")]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
}

#[test]
fn usage_and_input_errors_exit_2() {
    for args in [
        vec!["frobnicate"],
        vec!["check"],
        vec!["check", "/nonexistent/model.toml"],
        vec!["check", &model("chain.toml"), "--bound", "0.05"],
        vec!["simulate", &model("chain.toml"), "--horizon", "1", "--dt", "0.1"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn export_writes_model_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.xta");
    let o = run(&["export", &model("chain.toml"), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = parse_xta(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.processes.len(), 5);
    let query = std::fs::read_to_string(out.with_extension("q")).unwrap();
    assert!(query.contains("z <= 60"));
}

#[test]
fn simulate_writes_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("level.csv");
    let o = run(&[
        "simulate",
        &model("steam_boiler.toml"),
        "--horizon",
        "1",
        "--dt",
        "0.05",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some("t,w,u1,u2,mode"));
    assert_eq!(csv.lines().count(), 22);
    assert!(stdout(&o).contains("ModeSwitch"));
}

#[test]
fn wcrt_reports_the_sum() {
    let o = run(&["wcrt", &model("steam_boiler.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("86 ms"));
}
