//! Machine-readable reports with byte-deterministic CSV emission.
//!
//! Floats are written with `{:e}` (exact shortest scientific form), so the
//! bytes depend only on the values. All files are UTF-8 with `\n` endings.

use robust_semigroup::grid::GridFunction;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct ConvergeRow {
    pub level: u32,
    pub n_steps: usize,
    /// `‖𝒮^n f - 𝒮^{n-1} f‖∞`; absent on the first computed level.
    pub interlevel_gap: Option<f64>,
    pub gap_to_pde: f64,
    pub runtime_ms: u128,
}

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(name: &str, violation: f64, tolerance: f64) -> Self {
        CheckRow { name: name.to_string(), violation, tolerance, pass: violation <= tolerance }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergeRow>,
    pub checks: Vec<CheckRow>,
}

impl ConvergenceReport {
    pub fn final_gap(&self) -> f64 {
        self.rows.last().map(|r| r.gap_to_pde).unwrap_or(f64::NAN)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn converge_csv(rows: &[ConvergeRow]) -> String {
    let mut out = String::from("level,n_steps,interlevel_gap,gap_to_pde,runtime_ms\n");
    for r in rows {
        let gap = match r.interlevel_gap {
            Some(g) => format!("{g:e}"),
            None => String::new(),
        };
        writeln!(out, "{},{},{},{:e},{}", r.level, r.n_steps, gap, r.gap_to_pde, r.runtime_ms)
            .expect("writing to a string cannot fail");
    }
    out
}

pub fn checks_csv(rows: &[CheckRow]) -> String {
    let mut out = String::from("check_name,violation,tolerance,pass\n");
    for r in rows {
        writeln!(out, "{},{:e},{:e},{}", r.name, r.violation, r.tolerance, r.pass)
            .expect("writing to a string cannot fail");
    }
    out
}

/// Grid function as `x[,y],value` rows.
pub fn grid_function_csv(f: &GridFunction) -> String {
    let spec = f.spec();
    let mut out = String::new();
    match spec.dim {
        1 => {
            out.push_str("x,value\n");
            for flat in 0..spec.len() {
                let p = spec.position(flat);
                writeln!(out, "{:e},{:e}", p[0], f.value(flat)).unwrap();
            }
        }
        _ => {
            out.push_str("x,y,value\n");
            for flat in 0..spec.len() {
                let p = spec.position(flat);
                writeln!(out, "{:e},{:e},{:e}", p[0], p[1], f.value(flat)).unwrap();
            }
        }
    }
    out
}

pub fn write_file(dir: &Path, name: &str, content: &str) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .map_err(|e| anyhow::anyhow!("creating {}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, content.as_bytes())
        .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?;
    Ok(path)
}
