//! Experiment configuration: JSON schema, validation, and construction of
//! the domain objects (model, penalty, grid, initial function).

use robust_semigroup::error::Error;
use robust_semigroup::grid::{
    clipped_identity, gaussian_bump, tent, GridFunction, GridSpec, SmoothGridFunction,
};
use robust_semigroup::measures::{DiscreteMeasure, JumpSpec, LevyModel};
use robust_semigroup::transport::{Penalty, PenaltyKind};
use robust_semigroup::Result;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Presets must sit below this at the boundary, else the run is flagged.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

pub const MAX_LEVEL: u32 = 12;

fn default_check_pairs() -> usize {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub penalty: PenaltyConfig,
    pub grid: GridConfig,
    pub horizon: f64,
    pub levels: LevelRange,
    pub initial: InitialFn,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Random pairs per operator-law check in the property suite.
    #[serde(default = "default_check_pairs")]
    pub check_pairs: usize,
    /// Report runtimes as zero so reruns are byte-identical.
    #[serde(default)]
    pub stable_timing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub dimension: usize,
    pub drift: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<JumpConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpConfig {
    pub intensity: f64,
    pub sizes: SizesConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizesConfig {
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PenaltyConfig {
    pub p: f64,
    pub kind: PenaltyKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub dimension: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LevelRange {
    pub min: u32,
    pub max: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialFn {
    GaussianBump { center: Vec<f64>, width: f64 },
    Tent { center: Vec<f64>, width: f64 },
    ClippedIdentity { inner: f64, outer: f64 },
    Custom { values: Vec<f64> },
}

impl ModelConfig {
    pub fn build(&self) -> Result<LevyModel> {
        let d = self.dimension;
        let mut cov = Vec::with_capacity(d * d);
        if self.covariance.len() != d || self.covariance.iter().any(|r| r.len() != d) {
            return Err(Error::model("covariance must be a d×d matrix"));
        }
        for row in &self.covariance {
            cov.extend_from_slice(row);
        }
        let jumps = match &self.jumps {
            None => None,
            Some(j) => {
                let mut atoms = Vec::new();
                for a in &j.sizes.atoms {
                    if a.len() != d {
                        return Err(Error::model("jump atom dimension mismatch"));
                    }
                    atoms.extend_from_slice(a);
                }
                Some(JumpSpec {
                    intensity: j.intensity,
                    sizes: DiscreteMeasure::new(d, atoms, j.sizes.weights.clone())?,
                })
            }
        };
        LevyModel::new(d, self.drift.clone(), cov, jumps)
    }
}

impl PenaltyConfig {
    pub fn build(&self) -> Result<Penalty> {
        match self.kind {
            PenaltyKind::Ball { delta } => Penalty::ball(self.p, delta),
            PenaltyKind::Power { c, q } => Penalty::power(self.p, c, q),
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<GridSpec> {
        GridSpec::new(self.dimension, self.half_width, self.points_per_axis)
    }
}

impl InitialFn {
    pub fn build(&self, spec: GridSpec) -> Result<GridFunction> {
        match self {
            InitialFn::GaussianBump { center, width } => {
                Ok(gaussian_bump(spec, center, *width)?.f)
            }
            InitialFn::Tent { center, width } => tent(spec, center, *width),
            InitialFn::ClippedIdentity { inner, outer } => clipped_identity(spec, *inner, *outer),
            InitialFn::Custom { values } => GridFunction::from_values(spec, values.clone()),
        }
    }

    /// Initial condition on an arbitrary (usually refined) grid. Presets are
    /// analytic; tabulated values are linearly interpolated.
    pub fn build_on(&self, spec: GridSpec, source: &GridSpec) -> Result<GridFunction> {
        match self {
            InitialFn::Custom { values } => {
                let src = GridFunction::from_values(*source, values.clone())?;
                GridFunction::from_fn(spec, |p| interpolate(&src, p))
            }
            _ => self.build(spec),
        }
    }

    /// Analytic-gradient version for the generator-limit check; only the
    /// Gaussian bump carries one.
    pub fn build_smooth(&self, spec: GridSpec) -> Option<SmoothGridFunction> {
        match self {
            InitialFn::GaussianBump { center, width } => gaussian_bump(spec, center, *width).ok(),
            _ => None,
        }
    }
}

fn interpolate(f: &GridFunction, point: &[f64]) -> f64 {
    let spec = f.spec();
    let h = spec.spacing();
    let n = spec.points_per_axis;
    let clamp_cell = |x: f64| -> (usize, f64) {
        let rel = (x + spec.half_width) / h;
        let i = rel.floor().clamp(0.0, (n - 2) as f64);
        (i as usize, (rel - i).clamp(0.0, 1.0))
    };
    match spec.dim {
        1 => {
            let (i, s) = clamp_cell(point[0]);
            f.value(i) * (1.0 - s) + f.value(i + 1) * s
        }
        _ => {
            let (i, s) = clamp_cell(point[0]);
            let (j, t) = clamp_cell(point[1]);
            let v00 = f.value(i * n + j);
            let v01 = f.value(i * n + j + 1);
            let v10 = f.value((i + 1) * n + j);
            let v11 = f.value((i + 1) * n + j + 1);
            v00 * (1.0 - s) * (1.0 - t) + v01 * (1.0 - s) * t + v10 * s * (1.0 - t) + v11 * s * t
        }
    }
}

/// Fully constructed experiment objects.
pub struct ValidatedExperiment {
    pub model: LevyModel,
    pub penalty: Penalty,
    pub spec: GridSpec,
    pub initial: GridFunction,
}

impl ExperimentConfig {
    pub fn from_file(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("parsing {}: {e}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<ValidatedExperiment> {
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::configuration("horizon must be positive"));
        }
        if self.levels.min > self.levels.max || self.levels.max > MAX_LEVEL {
            return Err(Error::configuration(format!(
                "levels must satisfy min ≤ max ≤ {MAX_LEVEL}"
            )));
        }
        let spec = self.grid.build()?;
        let model = self.model.build()?;
        if model.dim() != spec.dim {
            return Err(Error::configuration("model and grid dimensions differ"));
        }
        let penalty = self.penalty.build()?;
        let initial = self.initial.build(spec)?;
        let boundary = initial.boundary_max();
        if boundary > BOUNDARY_TOLERANCE {
            return Err(Error::configuration(format!(
                "initial function is {boundary:.3e} at the boundary (limit {BOUNDARY_TOLERANCE:.0e}); enlarge the domain"
            )));
        }
        Ok(ValidatedExperiment { model, penalty, spec, initial })
    }
}
