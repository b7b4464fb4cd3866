//! Finitely supported measures and discretized Lévy increment laws.
//!
//! `increment_measure` turns a [`LevyModel`] into the law `μ_t` of one
//! increment, represented on the grid of a [`GridSpec`]: the Gaussian part
//! is binned through exact cell probabilities (CDF differences in 1-d,
//! tensor products / density cells in 2-d), the finite-activity jump part
//! through a truncated Poisson series of discrete self-convolutions, and
//! the result is renormalized after truncation. A final quadratic
//! reweighting matches the analytic mean and second moments of the true
//! increment law, which keeps the weak error of the binning at the level
//! of the cell resolution rather than its first moments.

use crate::error::Error;
use crate::grid::GridSpec;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Total mass that may be lost to truncation before the grid is rejected.
pub const MASS_LEAK_BOUND: f64 = 1e-8;

/// Omitted tail mass of the Poisson jump-count series.
const POISSON_TAIL: f64 = 1e-10;

/// Finitely supported probability measure on `R^d`, `d ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    dim: usize,
    /// Row-major atom coordinates, `len = n * dim`.
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::model(format!("dimension must be 1 or 2, got {dim}")));
        }
        if atoms.len() != weights.len() * dim {
            return Err(Error::model("atom/weight length mismatch"));
        }
        if weights.is_empty() {
            return Err(Error::model("a probability measure needs at least one atom"));
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::model("atoms must be finite"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::model("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::model(format!("weights sum to {total}, expected 1 within 1e-12")));
        }
        Ok(DiscreteMeasure { dim, atoms, weights })
    }

    /// Point mass at `point`.
    pub fn dirac(point: &[f64]) -> Result<Self> {
        DiscreteMeasure::new(point.len(), point.to_vec(), vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atom_norm(&self, i: usize) -> f64 {
        let a = self.atom(i);
        if self.dim == 1 {
            a[0].abs()
        } else {
            a[0].hypot(a[1])
        }
    }

    /// Mass of `{|y| ≥ c}`.
    pub fn tail_mass(&self, c: f64) -> f64 {
        (0..self.len()).filter(|&i| self.atom_norm(i) >= c).map(|i| self.weights[i]).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mean(&self) -> [f64; 2] {
        let mut m = [0.0; 2];
        for i in 0..self.len() {
            let a = self.atom(i);
            for k in 0..self.dim {
                m[k] += self.weights[i] * a[k];
            }
        }
        m
    }

    /// Raw second-moment matrix `E[x xᵀ]`.
    pub fn second_moment(&self) -> [[f64; 2]; 2] {
        let mut s = [[0.0; 2]; 2];
        for i in 0..self.len() {
            let a = self.atom(i);
            for r in 0..self.dim {
                for c in 0..self.dim {
                    s[r][c] += self.weights[i] * a[r] * a[c];
                }
            }
        }
        s
    }
}

/// `∫ |x|^p dμ` for `p ∈ (1, ∞)`; equals `W_p(δ_0, μ)^p`.
pub fn moment_p(mu: &DiscreteMeasure, p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("moment order must lie in (1, ∞), got {p}")));
    }
    Ok((0..mu.len()).map(|i| mu.weight(i) * mu.atom_norm(i).powf(p)).sum())
}

/// Finite-activity jump component: rate and jump-size law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpSpec {
    pub intensity: f64,
    pub sizes: DiscreteMeasure,
}

/// Lévy triplet restricted to drift + diffusion + finite-activity jumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyModel {
    dim: usize,
    drift: Vec<f64>,
    /// Row-major `d×d` covariance.
    covariance: Vec<f64>,
    jumps: Option<JumpSpec>,
}

impl LevyModel {
    pub fn new(
        dim: usize,
        drift: Vec<f64>,
        covariance: Vec<f64>,
        jumps: Option<JumpSpec>,
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::model(format!("dimension must be 1 or 2, got {dim}")));
        }
        if drift.len() != dim || covariance.len() != dim * dim {
            return Err(Error::model("drift/covariance shape does not match dimension"));
        }
        if drift.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::model("drift and covariance must be finite"));
        }
        if dim == 2 && (covariance[1] - covariance[2]).abs() > 1e-12 {
            return Err(Error::model("covariance must be symmetric"));
        }
        for ev in eigenvalues(dim, &covariance) {
            if ev < -1e-12 {
                return Err(Error::model(format!("covariance has negative eigenvalue {ev}")));
            }
        }
        if let Some(j) = &jumps {
            if !(j.intensity >= 0.0) || !j.intensity.is_finite() {
                return Err(Error::model("jump intensity must be nonnegative"));
            }
            if j.sizes.dim() != dim {
                return Err(Error::model("jump-size dimension does not match the model"));
            }
        }
        Ok(LevyModel { dim, drift, covariance, jumps })
    }

    /// Pure Brownian model with unit covariance and zero drift.
    pub fn standard_brownian(dim: usize) -> Result<Self> {
        let mut cov = vec![0.0; dim * dim];
        for k in 0..dim {
            cov[k * dim + k] = 1.0;
        }
        LevyModel::new(dim, vec![0.0; dim], cov, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn covariance(&self, r: usize, c: usize) -> f64 {
        self.covariance[r * self.dim + c]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|k| self.covariance(k, k)).sum()
    }

    pub fn drift_norm(&self) -> f64 {
        if self.dim == 1 {
            self.drift[0].abs()
        } else {
            self.drift[0].hypot(self.drift[1])
        }
    }

    pub fn jumps(&self) -> Option<&JumpSpec> {
        self.jumps.as_ref()
    }

    /// Analytic mean and second-moment matrix of the increment law `μ_t`.
    pub fn increment_moments(&self, t: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut mean = [0.0; 2];
        for k in 0..self.dim {
            mean[k] = self.drift[k] * t;
        }
        let mut cov = [[0.0; 2]; 2];
        for r in 0..self.dim {
            for c in 0..self.dim {
                cov[r][c] = self.covariance(r, c) * t;
            }
        }
        if let Some(j) = &self.jumps {
            let jm = j.sizes.mean();
            let js = j.sizes.second_moment();
            for k in 0..self.dim {
                mean[k] += j.intensity * t * jm[k];
            }
            for r in 0..self.dim {
                for c in 0..self.dim {
                    cov[r][c] += j.intensity * t * js[r][c];
                }
            }
        }
        let mut second = [[0.0; 2]; 2];
        for r in 0..self.dim {
            for c in 0..self.dim {
                second[r][c] = cov[r][c] + mean[r] * mean[c];
            }
        }
        (mean, second)
    }
}

fn eigenvalues(dim: usize, cov: &[f64]) -> Vec<f64> {
    match dim {
        1 => vec![cov[0]],
        _ => {
            let (a, b, d) = (cov[0], cov[1], cov[3]);
            let tr = a + d;
            let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
            vec![(tr - disc) / 2.0, (tr + disc) / 2.0]
        }
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Dense nonnegative mass vector over the cells of a grid.
struct GridDensity {
    spec: GridSpec,
    mass: Vec<f64>,
}

impl GridDensity {
    fn zeros(spec: GridSpec) -> Self {
        GridDensity { spec, mass: vec![0.0; spec.len()] }
    }

    fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    fn deposit(&mut self, point: &[f64], w: f64) {
        if let Some(idx) = self.spec.snap(point) {
            self.mass[idx] += w;
        }
    }

    /// Discrete convolution: mass at `x_i + x_j`, snapped to the grid.
    /// Mass landing outside the domain is dropped (accounted as leak).
    fn convolve(&self, other: &GridDensity) -> GridDensity {
        let spec = self.spec;
        let mut out = GridDensity::zeros(spec);
        let nz_other: Vec<(usize, f64)> = other
            .mass
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| (i, w))
            .collect();
        for (i, wi) in self.mass.iter().enumerate().filter(|(_, &w)| w > 0.0) {
            let pi = spec.position(i);
            for &(j, wj) in &nz_other {
                let pj = spec.position(j);
                let p = [pi[0] + pj[0], pi[1] + pj[1]];
                out.deposit(&p[..spec.dim], wi * wj);
            }
        }
        out
    }

    fn into_measure(self) -> Result<DiscreteMeasure> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::configuration("all increment mass was truncated away"));
        }
        let spec = self.spec;
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for (i, &w) in self.mass.iter().enumerate() {
            if w > 0.0 {
                let p = spec.position(i);
                atoms.extend_from_slice(&p[..spec.dim]);
                weights.push(w / total);
            }
        }
        DiscreteMeasure::new(spec.dim, atoms, weights)
    }
}

/// Bin the Gaussian component `N(mean, cov·t-free)` onto the grid.
fn bin_gaussian(spec: &GridSpec, mean: &[f64], cov: &[f64]) -> Result<GridDensity> {
    let mut out = GridDensity::zeros(*spec);
    let n = spec.points_per_axis;
    let h = spec.spacing();
    // Per-axis cell probabilities by exact CDF differences.
    let axis_weights = |m: f64, var: f64| -> Vec<f64> {
        if var <= 0.0 {
            let mut w = vec![0.0; n];
            if let Some(i) = spec.snap_axis(m) {
                w[i] = 1.0;
            }
            return w;
        }
        let sd = var.sqrt();
        (0..n)
            .map(|i| {
                let x = spec.axis_coord(i);
                let lo = (x - h / 2.0 - m) / sd;
                let hi = (x + h / 2.0 - m) / sd;
                (normal_cdf(hi) - normal_cdf(lo)).max(0.0)
            })
            .collect()
    };
    match spec.dim {
        1 => {
            out.mass = axis_weights(mean[0], cov[0]);
        }
        _ => {
            let (a, b, d) = (cov[0], cov[1], cov[3]);
            if b.abs() <= 1e-14 * (1.0 + a.abs() + d.abs()) {
                let wx = axis_weights(mean[0], a);
                let wy = axis_weights(mean[1], d);
                for i in 0..n {
                    for j in 0..n {
                        out.mass[i * n + j] = wx[i] * wy[j];
                    }
                }
            } else {
                let det = a * d - b * b;
                if det <= 0.0 {
                    return Err(Error::configuration(
                        "degenerate correlated covariance cannot be binned in d = 2",
                    ));
                }
                let norm = 1.0 / (2.0 * std::f64::consts::PI * det.sqrt());
                let cell = h * h;
                for i in 0..n {
                    let dx = spec.axis_coord(i) - mean[0];
                    for j in 0..n {
                        let dy = spec.axis_coord(j) - mean[1];
                        let q = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
                        out.mass[i * n + j] = norm * (-0.5 * q).exp() * cell;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Jump part `Σ_{k≥1} P(N_t = k) · J^{*k}` on the grid; the `k = 0` term is
/// handled by the caller so the Gaussian part is never convolved with a
/// snapped point mass.
fn bin_jump_part(spec: &GridSpec, jumps: &JumpSpec, t: f64) -> (GridDensity, f64) {
    let lambda_t = jumps.intensity * t;
    let mut jump_grid = GridDensity::zeros(*spec);
    for i in 0..jumps.sizes.len() {
        jump_grid.deposit(jumps.sizes.atom(i), jumps.sizes.weight(i));
    }
    let mut acc = GridDensity::zeros(*spec);
    let mut pk = (-lambda_t).exp(); // P(N = 0)
    let p0 = pk;
    let mut cum = pk;
    let mut cur: Option<GridDensity> = None;
    let mut k = 0usize;
    while 1.0 - cum > POISSON_TAIL && k < 1000 {
        k += 1;
        pk *= lambda_t / k as f64;
        cum += pk;
        let next = match &cur {
            None => {
                let mut c = GridDensity::zeros(*spec);
                c.mass.copy_from_slice(&jump_grid.mass);
                c
            }
            Some(c) => c.convolve(&jump_grid),
        };
        for (a, b) in acc.mass.iter_mut().zip(&next.mass) {
            *a += pk * b;
        }
        cur = Some(next);
    }
    (acc, p0)
}

/// Quadratic reweighting so the binned measure reproduces the analytic mean
/// and second moments. Skipped when the support is too degenerate to carry
/// the correction or it would drive weights negative.
fn match_moments(density: &mut GridDensity, mean: &[f64; 2], second: &[[f64; 2]; 2]) {
    let spec = density.spec;
    let d = spec.dim;
    let nb = if d == 1 { 3 } else { 6 };
    let basis = |p: &[f64; 2], k: usize| -> f64 {
        match (d, k) {
            (_, 0) => 1.0,
            (1, 1) => p[0],
            (1, 2) => p[0] * p[0],
            (2, 1) => p[0],
            (2, 2) => p[1],
            (2, 3) => p[0] * p[0],
            (2, 4) => p[1] * p[1],
            (2, 5) => p[0] * p[1],
            _ => unreachable!(),
        }
    };
    let target: Vec<f64> = match d {
        1 => vec![1.0, mean[0], second[0][0]],
        _ => vec![1.0, mean[0], mean[1], second[0][0], second[1][1], second[0][1]],
    };
    // Gram matrix S[r][c] = Σ w · b_r · b_c.
    let mut gram = vec![0.0; nb * nb];
    for (i, &w) in density.mass.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let p = spec.position(i);
        let b: Vec<f64> = (0..nb).map(|k| basis(&p, k)).collect();
        for r in 0..nb {
            for c in 0..nb {
                gram[r * nb + c] += w * b[r] * b[c];
            }
        }
    }
    let coeffs = match solve_dense(nb, &mut gram, &target) {
        Some(c) => c,
        None => return,
    };
    let mut corrected = density.mass.clone();
    let mut negative = 0.0f64;
    for (i, w) in corrected.iter_mut().enumerate() {
        if *w <= 0.0 {
            continue;
        }
        let p = spec.position(i);
        let factor: f64 = (0..nb).map(|k| coeffs[k] * basis(&p, k)).sum();
        *w *= factor;
        if *w < 0.0 {
            negative += -*w;
            *w = 0.0;
        }
    }
    if negative > 1e-12 {
        return; // correction would distort the measure; keep the plain binning
    }
    density.mass = corrected;
    let total = density.total();
    if total > 0.0 {
        for w in density.mass.iter_mut() {
            *w /= total;
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when near-singular.
fn solve_dense(n: usize, a: &mut [f64], b: &[f64]) -> Option<Vec<f64>> {
    let mut x = b.to_vec();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[piv * n + col].abs() {
                piv = row;
            }
        }
        if a[piv * n + col].abs() < 1e-10 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        for k in col + 1..n {
            x[col] -= a[col * n + k] * x[k];
        }
        x[col] /= a[col * n + col];
    }
    Some(x)
}

/// Discretized increment law `μ_t` of `model` on the grid of `spec`.
///
/// Returns `δ_0` for `t = 0`. Truncation may drop at most
/// [`MASS_LEAK_BOUND`] of mass; beyond that the grid is rejected as a
/// configuration error rather than silently renormalized.
pub fn increment_measure(model: &LevyModel, t: f64, spec: &GridSpec) -> Result<DiscreteMeasure> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if model.dim() != spec.dim {
        return Err(Error::model("model dimension does not match the grid"));
    }
    if t == 0.0 {
        return DiscreteMeasure::dirac(&vec![0.0; model.dim()]);
    }
    let d = model.dim();
    let mean: Vec<f64> = (0..d).map(|k| model.drift()[k] * t).collect();
    let cov: Vec<f64> = (0..d * d).map(|i| model.covariance(i / d, i % d) * t).collect();
    let gaussian = bin_gaussian(spec, &mean, &cov)?;

    let mut total = match model.jumps() {
        Some(j) if j.intensity * t > 0.0 && j.sizes.len() > 0 => {
            let (jump_part, p0) = bin_jump_part(spec, j, t);
            let mut out = gaussian.convolve(&jump_part);
            for (o, g) in out.mass.iter_mut().zip(&gaussian.mass) {
                *o += p0 * g;
            }
            out
        }
        _ => gaussian,
    };

    let leak = 1.0 - total.total();
    if leak > MASS_LEAK_BOUND {
        return Err(Error::configuration(format!(
            "increment mass leak {leak:.3e} exceeds {MASS_LEAK_BOUND:.0e}; enlarge the grid half-width"
        )));
    }
    let sum = total.total();
    if sum > 0.0 {
        for w in total.mass.iter_mut() {
            *w /= sum;
        }
    }
    let (m, s) = model.increment_moments(t);
    match_moments(&mut total, &m, &s);
    total.into_measure()
}

/// Discrete convolution of two grid-supported measures, renormalized after
/// truncation. Used to test the convolution-semigroup property of the
/// increment laws.
pub fn convolve_measures(
    a: &DiscreteMeasure,
    b: &DiscreteMeasure,
    spec: &GridSpec,
) -> Result<DiscreteMeasure> {
    let mut da = GridDensity::zeros(*spec);
    for i in 0..a.len() {
        da.deposit(a.atom(i), a.weight(i));
    }
    let mut db = GridDensity::zeros(*spec);
    for i in 0..b.len() {
        db.deposit(b.atom(i), b.weight(i));
    }
    let mut out = da.convolve(&db);
    let sum = out.total();
    if sum > 0.0 {
        for w in out.mass.iter_mut() {
            *w /= sum;
        }
    }
    out.into_measure()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: f64, n: usize) -> GridSpec {
        GridSpec::new(1, l, n).unwrap()
    }

    #[test]
    fn pure_drift_is_a_single_snapped_atom() {
        let model = LevyModel::new(1, vec![1.0], vec![0.0], None).unwrap();
        let mu = increment_measure(&model, 0.5, &grid(8.0, 1025)).unwrap();
        assert_eq!(mu.len(), 1);
        assert!((mu.atom(0)[0] - 0.5).abs() < 1e-12);
        assert!((mu.weight(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_time_gives_dirac_at_origin() {
        let model = LevyModel::standard_brownian(1).unwrap();
        let mu = increment_measure(&model, 0.0, &grid(8.0, 1025)).unwrap();
        assert_eq!(mu.len(), 1);
        assert_eq!(mu.atom(0)[0], 0.0);
        assert_eq!(mu.weight(0), 1.0);
    }

    #[test]
    fn brownian_second_moment_matches_closed_form() {
        let model = LevyModel::standard_brownian(1).unwrap();
        let mu = increment_measure(&model, 1.0, &grid(8.0, 1025)).unwrap();
        let m2 = moment_p(&mu, 2.0).unwrap();
        assert!((m2 - 1.0).abs() < 1e-6, "second moment {m2}");
        assert!((mu.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn compound_poisson_moments_match_model() {
        let sizes = DiscreteMeasure::new(1, vec![0.5, -0.5], vec![0.5, 0.5]).unwrap();
        let model = LevyModel::new(
            1,
            vec![0.0],
            vec![1.0],
            Some(JumpSpec { intensity: 1.0, sizes }),
        )
        .unwrap();
        let t = 0.5;
        let mu = increment_measure(&model, t, &grid(8.0, 1025)).unwrap();
        let (_, s) = model.increment_moments(t);
        let m2 = moment_p(&mu, 2.0).unwrap();
        assert!((m2 - s[0][0]).abs() < 1e-9, "m2 = {m2}, expected {}", s[0][0]);
        assert!((mu.mean()[0]).abs() < 1e-9);
    }

    #[test]
    fn moment_p_examples() {
        let d0 = DiscreteMeasure::dirac(&[0.0]).unwrap();
        assert_eq!(moment_p(&d0, 2.0).unwrap(), 0.0);
        let da = DiscreteMeasure::dirac(&[-1.5]).unwrap();
        assert!((moment_p(&da, 3.0).unwrap() - 1.5f64.powi(3)).abs() < 1e-12);
        let mix = DiscreteMeasure::new(1, vec![-1.0, 3.0], vec![0.5, 0.5]).unwrap();
        assert!((moment_p(&mix, 2.0).unwrap() - 5.0).abs() < 1e-12);
        assert!(moment_p(&mix, 1.0).is_err());
        assert!(moment_p(&mix, 0.5).is_err());
    }

    #[test]
    fn tail_bound_holds_for_produced_increments() {
        let model = LevyModel::standard_brownian(1).unwrap();
        for &t in &[0.125, 0.5, 1.0] {
            let mu = increment_measure(&model, t, &grid(8.0, 513)).unwrap();
            let p = 2.0;
            let mp = moment_p(&mu, p).unwrap().powf(1.0 / p);
            for &c in &[0.25, 0.5, 1.0, 2.0, 4.0] {
                assert!(
                    mu.tail_mass(c) <= mp / c + 1e-12,
                    "tail bound failed at t={t}, c={c}"
                );
            }
        }
    }

    #[test]
    fn negative_time_and_bad_covariance_are_rejected() {
        let model = LevyModel::standard_brownian(1).unwrap();
        assert!(matches!(
            increment_measure(&model, -0.1, &grid(4.0, 65)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            LevyModel::new(1, vec![0.0], vec![-1.0], None),
            Err(Error::Model(_))
        ));
        assert!(matches!(
            LevyModel::new(2, vec![0.0, 0.0], vec![1.0, 0.5, -0.5, 1.0], None),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn mass_leak_is_a_configuration_error() {
        let model = LevyModel::standard_brownian(1).unwrap();
        let err = increment_measure(&model, 4.0, &grid(1.0, 65));
        assert!(matches!(err, Err(Error::Configuration(_))));
    }

    #[test]
    fn d2_diagonal_binning_matches_moments() {
        let model = LevyModel::new(2, vec![0.5, -0.25], vec![1.0, 0.0, 0.0, 0.5], None).unwrap();
        let spec = GridSpec::new(2, 6.0, 97).unwrap();
        let mu = increment_measure(&model, 0.5, &spec).unwrap();
        let (mean, second) = model.increment_moments(0.5);
        let m = mu.mean();
        let s = mu.second_moment();
        assert!((m[0] - mean[0]).abs() < 1e-9);
        assert!((m[1] - mean[1]).abs() < 1e-9);
        assert!((s[0][0] - second[0][0]).abs() < 1e-9);
        assert!((s[1][1] - second[1][1]).abs() < 1e-9);
    }

    #[test]
    fn d2_correlated_binning_matches_cross_moment() {
        let model = LevyModel::new(2, vec![0.0, 0.0], vec![1.0, 0.4, 0.4, 1.0], None).unwrap();
        let spec = GridSpec::new(2, 6.0, 97).unwrap();
        let mu = increment_measure(&model, 0.5, &spec).unwrap();
        let s = mu.second_moment();
        assert!((s[0][1] - 0.2).abs() < 1e-9, "cross moment {}", s[0][1]);
    }

    #[test]
    fn convolution_of_increments_approximates_the_sum_time() {
        let model = LevyModel::standard_brownian(1).unwrap();
        let spec = grid(8.0, 513);
        let a = increment_measure(&model, 0.3, &spec).unwrap();
        let b = increment_measure(&model, 0.2, &spec).unwrap();
        let c = convolve_measures(&a, &b, &spec).unwrap();
        let direct = increment_measure(&model, 0.5, &spec).unwrap();
        // moment agreement here; the W_p comparison lives with the transport tests
        assert!((moment_p(&c, 2.0).unwrap() - moment_p(&direct, 2.0).unwrap()).abs() < 1e-4);
    }
}
