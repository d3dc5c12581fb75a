use std::fs;
use std::path::Path;
use std::process::Command as Process;

use dmlpg_cli::{execute, execute_with_threads, Command, RunConfig, RunOptions};

fn options(dir: &Path, threads: Option<usize>) -> RunOptions {
    RunOptions { out: dir.to_path_buf(), threads, seed: None }
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn beam_study_writes_three_rows_with_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse("problem = \"beam\"\nlevels = [0, 1, 2]").unwrap();
    let files = execute(Command::Study, &cfg, &options(dir.path(), None)).unwrap();
    assert!(files.iter().any(|f| f.ends_with("convergence.csv")));
    let table = read(dir.path(), "convergence.csv");
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "h,N,r_u,r_eps,t_assemble_s,t_solve_s,shape_evals,order_u,order_eps");
    assert_eq!(lines.len(), 4);
    let order_u: f64 = lines[3].split(',').nth(7).unwrap().parse().unwrap();
    assert!(order_u > 1.7, "{order_u}");
    let profile = read(dir.path(), "beam_stress_x1_4.csv");
    assert!(profile.starts_with("x2,numerical_s11,exact_s11,numerical_s12,exact_s12\n"));
    let summary = read(dir.path(), "summary.jsonl");
    assert_eq!(summary.lines().count(), 1);
    let record: serde_json::Value = serde_json::from_str(summary.trim()).unwrap();
    assert_eq!(record["command"], "study");
    assert_eq!(record["results"].as_array().unwrap().len(), 3);
    assert_eq!(record["config"]["epsilon"], 4.0);
}

#[test]
fn boussinesq_solve_writes_surface_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse("problem = \"boussinesq\"\nlevels = [0]").unwrap();
    execute(Command::Solve, &cfg, &options(dir.path(), None)).unwrap();
    let disp = read(dir.path(), "boussinesq_surface_displacement.csv");
    assert!(disp.starts_with("r,numerical_u_r,exact_u_r,numerical_w,exact_w\n"));
    assert_eq!(disp.lines().count(), 47);
    let vm = read(dir.path(), "boussinesq_surface_von_mises.csv");
    assert!(vm.starts_with("r,numerical_von_mises,exact_von_mises\n"));
    let solve = read(dir.path(), "solve.csv");
    assert_eq!(solve.lines().count(), 2);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let text = "problem = \"plate\"\nlevels = [0, 1]\ntimings = false\n[subdomain]\nshape = \"ball\"";
    let cfg = RunConfig::parse(text).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    execute_with_threads(Command::Study, &cfg, &options(a.path(), Some(1))).unwrap();
    execute_with_threads(Command::Study, &cfg, &options(b.path(), Some(4))).unwrap();
    for name in ["convergence.csv", "plate_s11_x1_0.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    assert!(read(a.path(), "convergence.csv").lines().nth(1).unwrap().contains(",nan,nan,"));
}

#[test]
fn compare_joins_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse("problem = \"manufactured\"\nmethod = \"dmlpg5\"\nlevels = [0, 1]").unwrap();
    execute(Command::Compare, &cfg, &options(dir.path(), None)).unwrap();
    let table = read(dir.path(), "compare.csv");
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("method,h,N,"));
    assert!(lines[1].starts_with("dmlpg5,") && lines[3].starts_with("mlpg5,"));
    let evals: u64 = lines[4].split(',').nth(7).unwrap().parse().unwrap();
    assert!(evals > 0);
}

#[test]
fn study_rejects_a_single_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse("problem = \"beam\"\nlevels = [0]").unwrap();
    let err = execute(Command::Study, &cfg, &options(dir.path(), None)).unwrap_err().to_string();
    assert!(err.contains("`levels`"), "{err}");
}

#[test]
fn binary_reports_errors_with_nonzero_status() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "problem = \"beam\"\nfoo = 3\n").unwrap();
    let output = Process::new(env!("CARGO_BIN_EXE_dmlpg"))
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("foo") && stderr.contains("line 2"), "{stderr}");
}

#[test]
fn binary_solves_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("beam.toml");
    fs::write(&config, "problem = \"beam\"\nlevels = [0]\n").unwrap();
    let out = dir.path().join("run");
    let status = Process::new(env!("CARGO_BIN_EXE_dmlpg"))
        .args(["solve", "--threads", "2", "--seed", "7", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success());
    let record: serde_json::Value = serde_json::from_str(read(&out, "summary.jsonl").trim()).unwrap();
    assert_eq!(record["threads"], 2);
    assert_eq!(record["seed"], 7);
    assert!(out.join("beam_stress_x1_4.csv").exists());
}
