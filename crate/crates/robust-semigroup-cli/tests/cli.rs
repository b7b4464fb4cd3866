//! End-to-end checks of the command-line surface: subcommands, overrides,
//! exit codes, and the emitted files.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_robust-semigroup")
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let config = serde_json::json!({
        "model": {"dimension": 1, "drift": [0.25], "covariance": [[1.0]]},
        "penalty": {"p": 2.0, "kind": {"ball": {"delta": 1.0}}},
        "grid": {"dimension": 1, "half_width": 8.0, "points_per_axis": 65},
        "horizon": 0.5,
        "levels": {"min": 1, "max": 2},
        "initial": {"tent": {"center": [0.0], "width": 2.0}},
        "output_dir": dir.join("out"),
        "seed": 3,
        "check_pairs": 3
    });
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

#[test]
fn converge_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = Command::new(bin())
        .args(["converge", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("converge"), "summary line missing: {stdout}");
    let csv = std::fs::read_to_string(dir.path().join("out/converge.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "level,n_steps,interlevel_gap,gap_to_pde,runtime_ms");
    assert_eq!(lines.count(), 2);
}

#[test]
fn pde_and_step_write_grid_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    for sub in ["pde", "step"] {
        let out = Command::new(bin()).args([sub, "--config"]).arg(&cfg).output().unwrap();
        assert!(out.status.success(), "{sub} failed: {}", String::from_utf8_lossy(&out.stderr));
        let csv =
            std::fs::read_to_string(dir.path().join(format!("out/{sub}.csv"))).unwrap();
        assert!(csv.starts_with("x,value\n"));
        assert_eq!(csv.lines().count(), 66);
    }
}

#[test]
fn overrides_change_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = Command::new(bin())
        .args(["converge", "--config"])
        .arg(&cfg)
        .args(["--level", "3", "--grid-n", "33", "--horizon", "0.25"])
        .arg("--out")
        .arg(dir.path().join("alt"))
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("alt/converge.csv")).unwrap();
    // levels 1..3 now, at horizon 0.25 the level-1 schedule is a single step
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(1).unwrap().starts_with("1,1,"));
}

#[test]
fn invalid_config_exits_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "model": {"dimension": 1, "drift": [0.0], "covariance": [[1.0]]},
        "penalty": {"p": 2.0, "kind": {"ball": {"delta": 1.0}}},
        "grid": {"dimension": 1, "half_width": 2.0, "points_per_axis": 65},
        "horizon": 4.0,
        "levels": {"min": 1, "max": 2},
        "initial": {"tent": {"center": [0.0], "width": 1.0}},
        "output_dir": dir.path().join("out"),
        "seed": 3
    });
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();
    // horizon 4 on a half-width-2 grid leaks increment mass past the cutoff
    let out = Command::new(bin()).args(["converge", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("configuration error"), "stderr: {stderr}");
}

#[test]
fn check_subcommand_reports_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = Command::new(bin()).args(["check", "--config"]).arg(&cfg).output().unwrap();
    // coarse grids may flag resolution-bound checks; the contract here is
    // the report itself plus a clean exit semantics (0 or 1, never a crash)
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
    let csv = std::fs::read_to_string(dir.path().join("out/checks.csv")).unwrap();
    assert!(csv.starts_with("check_name,violation,tolerance,pass\n"));
    for name in ["contraction", "monotonicity", "convexity", "normalization", "key_inequality",
                 "monotone_in_n", "strong_continuity", "generator_limit_floor", "tail_bound",
                 "dual_primal"] {
        assert!(csv.contains(name), "missing check row {name}: {csv}");
    }
}
