use gwsym::Report;
use std::process::{Command, Output};

fn gwsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn pairing_table_passes() {
    let o = gwsym(&["report", "pairing-table"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("h(zeta1,zeta4): -rho^10"));
    assert!(text.contains("[PASS] causal"));
}

#[test]
fn machine_output_is_deterministic_and_parses() {
    let a = gwsym(&["report", "pairing-table", "--format", "machine"]);
    let b = gwsym(&["--format", "machine", "report", "pairing-table"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = Report::from_machine(&stdout(&a)).unwrap();
    assert_eq!(report.command, "report pairing-table");
    assert_eq!(report.value("h(zeta3,zeta4)"), Some("-1"));
    assert!(report.all_passed());
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("forms.txt");
    let o = gwsym(&["derive", "forms", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&o));
}

#[test]
fn scenario_format_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    std::fs::write(&path, "format = machine\noracle_rho = 2.0\n").unwrap();
    let p = path.to_str().unwrap();
    let o = gwsym(&["--scenario", p, "report", "pairing-table"]);
    assert!(stdout(&o).starts_with("gwsym-report\t1\n"));
    let o = gwsym(&["--scenario", p, "--format", "text", "report", "pairing-table"]);
    assert!(stdout(&o).starts_with("gwsym report (schema 1)"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(gwsym(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gwsym(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(gwsym(&["oracle", "--rho", "-1"]).status.code(), Some(2));
    assert_eq!(gwsym(&["oracle", "verify", "items"]).status.code(), Some(2));
    assert_eq!(
        gwsym(&["--scenario", "/nonexistent/scenario", "report", "pairing-table"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "zeta1 = 1, 0, 1, 0\n").unwrap();
    let o = gwsym(&["--scenario", path.to_str().unwrap(), "report", "pairing-table"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zeta1"));
    assert!(o.stdout.is_empty());
}

#[test]
fn unwritable_out_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("r.txt");
    let o = gwsym(&["report", "pairing-table", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_agrees_at_two() {
    let o = gwsym(&["oracle", "--rho", "2.0", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = Report::from_machine(&stdout(&o)).unwrap();
    assert!(report.verdict("oracle-terms@2.0").unwrap().passed);
    assert!(report.verdict("total-oracle@2.0").unwrap().passed);
}

#[test]
fn items_names_failing_verdicts() {
    let o = gwsym(&["verify", "items", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for id in ["item-3-H", "item-6-k=3", "item-8-H"] {
        assert!(err.contains(id), "{err}");
    }
    let report = Report::from_machine(&stdout(&o)).unwrap();
    let failing: Vec<&str> = report.failing().iter().map(|v| v.id.as_str()).collect();
    assert_eq!(failing, ["item-3-H", "item-6-k=3", "item-8-H"]);
}

#[test]
fn oracle_then_total_runs_total_suite() {
    let o = gwsym(&["oracle", "--rho", "2.0", "verify", "total", "--format", "machine"]);
    let report = Report::from_machine(&stdout(&o)).unwrap();
    assert_eq!(report.command, "verify total");
    assert!(report.verdict("total-oracle@2.0").unwrap().passed);
    assert!(!report.verdict("total-leading").unwrap().passed);
    assert_eq!(o.status.code(), Some(1));
}
