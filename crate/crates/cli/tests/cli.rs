use std::io::Write;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_entropic-packet");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("ENTROPIC_PACKET_CONFIG").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn non_normalizable_alpha_exits_two() {
    for args in [
        &["compute", "--alpha", "0.5"][..],
        &["compute", "--alpha", "-1"],
        &["sweep", "--alpha-min", "0.4"],
        &["sweep", "--alpha-min", "3", "--alpha-max", "2"],
        &["verify", "--alpha", "2,0.3"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
    }
}

#[test]
fn compute_text_reports_anchor_values() {
    let o = run(&["compute", "--alpha", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("S_p              1\n"));
    assert!(text.contains("gap              0.0794415\n"));
    assert!(text.contains("<X^2>            1\n"));
}

#[test]
fn single_row_sweep_matches_compute() {
    let csv = stdout(&run(&["sweep", "--alpha-min", "2", "--alpha-max", "2", "--step", "0.1"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines, ["alpha,s_x,s_p,u_total,gap", "2,1.22417142753,1,2.22417142753,0.0794415416798"]);

    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&["compute", "--alpha", "2", "--format", "json"]))).unwrap();
    let s_x = json["entropy"]["s_x"].as_f64().unwrap();
    assert!((s_x - 1.22417142753).abs() < 1e-11);
    assert_eq!(json["variance"]["position_second_moment"]["value"], 1.0);
}

#[test]
fn sweep_json_has_csv_columns() {
    let o = run(&["sweep", "--alpha-min", "1", "--alpha-max", "1.5", "--step", "0.25", "--format", "json"]);
    let rows: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let mut keys: Vec<&str> = row.keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["alpha", "gap", "s_p", "s_x", "u_total"]);
    }
}

#[test]
fn sweep_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let o = run(&["sweep", "--alpha-min", "2", "--alpha-max", "3", "--step", "0.5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn verify_json_lists_every_entry() {
    let o = run(&["verify", "--alpha", "1,2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    let names: Vec<&str> = reports[0]["entries"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"position_second_moment_divergence"));
    assert!(names.contains(&"parseval"));
    assert!(reports.iter().all(|r| r["all_pass"] == true));
}

#[test]
fn config_file_from_environment() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# loose\nrel_tol = 1e-6").unwrap();
    let o = Command::new(BIN)
        .args(["compute", "--alpha", "2"])
        .env("ENTROPIC_PACKET_CONFIG", file.path())
        .output()
        .unwrap();
    assert!(o.status.success());

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "tolerance = 1e-6").unwrap();
    let o = Command::new(BIN)
        .args(["compute", "--alpha", "2"])
        .env("ENTROPIC_PACKET_CONFIG", bad.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_and_validate() {
    assert_eq!(run(&["--rel-tol", "-1", "compute", "--alpha", "2"]).status.code(), Some(2));
    assert!(run(&["compute", "--alpha", "2", "--rel-tol", "1e-8"]).status.success());
}

#[test]
fn default_sweep_approaches_bound() {
    let o = run(&["sweep"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 95);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][3] < w[0][3]));
    assert!(rows.iter().all(|r| r[4] >= 0.0));
}
