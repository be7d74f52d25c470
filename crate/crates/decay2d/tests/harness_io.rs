//! End-to-end harness checks: config → run → CSV determinism, and the CLI
//! binary's exit-status contract.

use std::path::PathBuf;
use std::process::Command;

fn temp_dir(tag: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(tag);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const SMALL_CONFIG: &str = "
[grid]
L = 8.0
n = 65
[data]
p = 3.0
phi0.family = bump
phi0.amplitude = 1.0
phi0.radius = 2.0
[scheme]
t_final = 2.0
[diagnostics]
sample_dt = 0.5
profile_times = 0 1 2
[output]
series = series.csv
profile = profile.csv
";

#[test]
fn identical_configs_produce_byte_identical_csv_bodies() {
    let dir = temp_dir("determinism");
    let cfg_path = dir.join("run.ini");
    std::fs::write(&cfg_path, SMALL_CONFIG).unwrap();

    let (cfg, _) = decay2d::config::parse_config(&cfg_path).unwrap();
    let mut bodies = Vec::new();
    for k in 0..2 {
        let out = decay2d::solver::run(&cfg).unwrap();
        let path = dir.join(format!("series_{k}.csv"));
        decay2d::report::write_series_csv(&path, &out.series).unwrap();
        bodies.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(bodies[0], bodies[1], "CSV bodies differ between identical runs");
}

#[test]
fn cli_simulate_writes_reports_and_exits_zero() {
    let dir = temp_dir("cli_simulate");
    let cfg_path = dir.join("run.ini");
    std::fs::write(&cfg_path, SMALL_CONFIG).unwrap();
    let out_dir = dir.join("out");

    let status = Command::new(env!("CARGO_BIN_EXE_decay2d"))
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_dir.join("series.csv").is_file());
    assert!(out_dir.join("profile.csv").is_file());

    let series = std::fs::read_to_string(out_dir.join("series.csv")).unwrap();
    let header = series.lines().next().unwrap();
    assert!(header.starts_with("t,e_total,pot_weighted,pot_plain"));
    assert_eq!(series.lines().count(), 1 + 5); // t = 0, 0.5, …, 2.0
}

#[test]
fn cli_rejects_bad_config_with_nonzero_status() {
    let dir = temp_dir("cli_bad");
    let cfg_path = dir.join("bad.ini");
    std::fs::write(&cfg_path, SMALL_CONFIG.replace("[grid]", "[gird]")).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_decay2d"))
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("gird"), "error should name the bad section: {stderr}");
}

#[test]
fn cli_quadrature_preset_passes_and_writes_verdicts() {
    let dir = temp_dir("cli_quadrature");
    let status = Command::new(env!("CARGO_BIN_EXE_decay2d"))
        .args(["quadrature-lemmas", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success(), "quadrature-lemmas preset should exit 0");
    let verdicts = std::fs::read_to_string(dir.join("quadrature-lemmas.verdicts.jsonl")).unwrap();
    assert!(verdicts.lines().count() >= 5);
    for line in verdicts.lines() {
        assert!(line.contains("\"pass\":true"), "failing verdict: {line}");
    }
}

#[test]
fn oracle_query_file_mode() {
    let dir = temp_dir("cli_oracle_queries");
    let queries = dir.join("queries.txt");
    std::fs::write(&queries, "1.0 0.0 0.0\n2.0 0.5 0.5\n# comment\n3.0 -1.0 0.0\n").unwrap();
    let cfg_path = dir.join("run.ini");
    std::fs::write(
        &cfg_path,
        format!("{SMALL_CONFIG}\n[oracle]\nqueries = {}\n", queries.display()),
    )
    .unwrap();
    let out_dir = dir.join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_decay2d"))
        .args(["kernel-oracle", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out_dir.join("oracle_values.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 3); // seed comment, header, 3 queries
}
