//! Uniform truncated grids and grid functions.
//!
//! A [`GridSpec`] is a tensor grid on `[-L, L]^d` with `N` points per axis.
//! A [`GridFunction`] stores samples of a continuous function vanishing at
//! infinity; everything outside the truncated domain is implicitly zero.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Lags (in grid cells) at which the modulus-of-continuity table is sampled.
const MODULUS_LAGS: [usize; 6] = [1, 2, 4, 8, 16, 32];

/// Uniform grid on `[-L, L]^d`, `d ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::domain(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::domain(format!("half-width must be positive, got {half_width}")));
        }
        if points_per_axis < 3 {
            return Err(Error::domain(format!(
                "need at least 3 points per axis, got {points_per_axis}"
            )));
        }
        Ok(GridSpec { dim, half_width, points_per_axis })
    }

    /// Grid spacing `h = 2L/(N-1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    /// Total number of grid points (`N^d`).
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index `i` along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// All axis coordinates.
    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|i| self.axis_coord(i)).collect()
    }

    /// Nearest axis index for a coordinate, or `None` if it snaps outside.
    pub fn snap_axis(&self, x: f64) -> Option<usize> {
        let idx = ((x + self.half_width) / self.spacing()).round();
        if idx < 0.0 || idx > (self.points_per_axis - 1) as f64 {
            None
        } else {
            Some(idx as usize)
        }
    }

    /// Flat index of a multi-index (row-major, axis 0 outermost).
    pub fn flat(&self, multi: &[usize]) -> usize {
        match self.dim {
            1 => multi[0],
            _ => multi[0] * self.points_per_axis + multi[1],
        }
    }

    /// Multi-index of a flat index.
    pub fn unflat(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.points_per_axis, flat % self.points_per_axis],
        }
    }

    /// Position (length `dim`) of a flat index.
    pub fn position(&self, flat: usize) -> [f64; 2] {
        let m = self.unflat(flat);
        [self.axis_coord(m[0]), if self.dim == 2 { self.axis_coord(m[1]) } else { 0.0 }]
    }

    /// Nearest grid index of a point, or `None` if outside the domain.
    pub fn snap(&self, point: &[f64]) -> Option<usize> {
        let i0 = self.snap_axis(point[0])?;
        if self.dim == 1 {
            Some(i0)
        } else {
            let i1 = self.snap_axis(point[1])?;
            Some(self.flat(&[i0, i1]))
        }
    }
}

/// Samples of an `f ∈ C_0(R^d)` surrogate on a [`GridSpec`], zero outside.
#[derive(Debug, Clone)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
    sup_norm: f64,
    min_value: f64,
    max_value: f64,
    modulus: Vec<(usize, f64)>,
}

impl GridFunction {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::domain(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("grid function values must be finite"));
        }
        let mut sup = 0.0f64;
        let mut minv = f64::INFINITY;
        let mut maxv = f64::NEG_INFINITY;
        for &v in &values {
            sup = sup.max(v.abs());
            minv = minv.min(v);
            maxv = maxv.max(v);
        }
        let modulus = sampled_modulus(&spec, &values);
        Ok(GridFunction { spec, values, sup_norm: sup, min_value: minv, max_value: maxv, modulus })
    }

    pub fn zero(spec: GridSpec) -> Self {
        GridFunction::from_values(spec, vec![0.0; spec.len()]).expect("zero function is valid")
    }

    /// Build from a pointwise closure over positions.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..spec.len())
            .map(|i| {
                let p = spec.position(i);
                f(&p[..spec.dim])
            })
            .collect();
        GridFunction::from_values(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    /// Recorded `‖f‖∞`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Oscillation of the zero-extended function: `max(f,0) - min(f,0)`.
    pub fn oscillation(&self) -> f64 {
        self.max_value.max(0.0) - self.min_value.min(0.0)
    }

    /// Sampled modulus-of-continuity table: pairs `(lag, ω(lag·h))` over the
    /// zero-extended samples, axis-aligned increments.
    pub fn modulus_table(&self) -> &[(usize, f64)] {
        &self.modulus
    }

    /// First-difference Lipschitz estimate, including the jump to the zero
    /// exterior at the boundary.
    pub fn lipschitz_estimate(&self) -> f64 {
        self.modulus.first().map(|&(_, w)| w / self.spec.spacing()).unwrap_or(0.0)
    }

    /// Largest `|f|` on the outermost grid layer.
    pub fn boundary_max(&self) -> f64 {
        let n = self.spec.points_per_axis;
        let mut m = 0.0f64;
        match self.spec.dim {
            1 => {
                m = m.max(self.values[0].abs()).max(self.values[n - 1].abs());
            }
            _ => {
                for i in 0..n {
                    for j in 0..n {
                        if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                            m = m.max(self.values[i * n + j].abs());
                        }
                    }
                }
            }
        }
        m
    }

    /// Value at an arbitrary point: nearest grid sample, zero outside.
    pub fn value_at(&self, point: &[f64]) -> f64 {
        match self.spec.snap(point) {
            Some(i) => self.values[i],
            None => 0.0,
        }
    }

    /// `‖f - g‖∞` over the grid.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest signed excess `max(f - g)` over the grid.
    pub fn max_excess_over(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scale(&self, alpha: f64) -> GridFunction {
        GridFunction::from_values(self.spec, self.values.iter().map(|v| alpha * v).collect())
            .expect("scaling preserves validity")
    }

    pub fn linear_mix(&self, alpha: f64, other: &GridFunction) -> GridFunction {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        GridFunction::from_values(self.spec, values).expect("mix preserves validity")
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        GridFunction::from_values(self.spec, values).expect("sum preserves validity")
    }

    pub fn pointwise_le(&self, other: &GridFunction, tol: f64) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| *a <= *b + tol)
    }
}

fn sampled_modulus(spec: &GridSpec, values: &[f64]) -> Vec<(usize, f64)> {
    let n = spec.points_per_axis;
    let max_lag = MODULUS_LAGS[MODULUS_LAGS.len() - 1].min(n - 1);
    // maxdiff[j] = largest |f(x) - f(y)| over axis-aligned offsets of exactly j cells,
    // with the zero exterior included.
    let mut maxdiff = vec![0.0f64; max_lag + 1];
    let get = |axis_fixed: usize, i: isize, axis: usize| -> f64 {
        if i < 0 || i >= n as isize {
            return 0.0;
        }
        let i = i as usize;
        match spec.dim {
            1 => values[i],
            _ => {
                if axis == 0 {
                    values[i * n + axis_fixed]
                } else {
                    values[axis_fixed * n + i]
                }
            }
        }
    };
    let lines: usize = if spec.dim == 1 { 1 } else { n };
    for axis in 0..spec.dim {
        for line in 0..lines {
            for j in 1..=max_lag {
                let mut d = maxdiff[j];
                for i in 0..n as isize {
                    let a = get(line, i, axis);
                    let b = get(line, i + j as isize, axis);
                    let diff = (a - b).abs();
                    if diff > d {
                        d = diff;
                    }
                    let c = get(line, i - (j as isize), axis);
                    let diff = (a - c).abs();
                    if diff > d {
                        d = diff;
                    }
                }
                maxdiff[j] = d;
            }
        }
    }
    let mut table = Vec::new();
    let mut running = 0.0f64;
    let mut j = 1usize;
    for &lag in MODULUS_LAGS.iter() {
        if lag > max_lag {
            break;
        }
        while j <= lag {
            running = running.max(maxdiff[j]);
            j += 1;
        }
        table.push((lag, running));
    }
    table
}

/// Grid function together with analytically sampled gradient values,
/// for consistency checks that need `∇f` without difference quotients.
#[derive(Debug, Clone)]
pub struct SmoothGridFunction {
    pub f: GridFunction,
    /// Row-major gradient samples, `len = N^d * d`.
    pub gradient: Vec<f64>,
}

impl SmoothGridFunction {
    pub fn gradient_at(&self, flat: usize) -> &[f64] {
        let d = self.f.spec().dim;
        &self.gradient[flat * d..flat * d + d]
    }
}

/// Gaussian bump `exp(-|x-c|² / (2w²))`.
pub fn gaussian_bump(spec: GridSpec, center: &[f64], width: f64) -> Result<SmoothGridFunction> {
    if !(width > 0.0) {
        return Err(Error::domain("bump width must be positive"));
    }
    let d = spec.dim;
    let mut values = Vec::with_capacity(spec.len());
    let mut gradient = Vec::with_capacity(spec.len() * d);
    for i in 0..spec.len() {
        let p = spec.position(i);
        let mut q = 0.0;
        for k in 0..d {
            let dx = p[k] - center[k];
            q += dx * dx;
        }
        let v = (-q / (2.0 * width * width)).exp();
        values.push(v);
        for k in 0..d {
            let dx = p[k] - center[k];
            gradient.push(-dx / (width * width) * v);
        }
    }
    Ok(SmoothGridFunction { f: GridFunction::from_values(spec, values)?, gradient })
}

/// Tent `max(0, 1 - |x-c|/w)` (Euclidean distance).
pub fn tent(spec: GridSpec, center: &[f64], width: f64) -> Result<GridFunction> {
    if !(width > 0.0) {
        return Err(Error::domain("tent width must be positive"));
    }
    GridFunction::from_fn(spec, |p| {
        let mut q = 0.0;
        for k in 0..spec.dim {
            let dx = p[k] - center[k];
            q += dx * dx;
        }
        (1.0 - q.sqrt() / width).max(0.0)
    })
}

/// Identity clipped at `±inner` and ramped down to zero at `±outer`,
/// so the function vanishes at the boundary. In `d = 2` the profile acts on
/// the first coordinate, multiplied by a plateau window in the second.
pub fn clipped_identity(spec: GridSpec, inner: f64, outer: f64) -> Result<GridFunction> {
    if !(0.0 < inner && inner < outer) {
        return Err(Error::domain("need 0 < inner < outer for clipped identity"));
    }
    let ramp = move |x: f64| -> f64 {
        let a = x.abs();
        if a <= inner {
            x
        } else if a <= outer {
            x.signum() * inner * (outer - a) / (outer - inner)
        } else {
            0.0
        }
    };
    let plateau = move |x: f64| -> f64 {
        let a = x.abs();
        if a <= inner {
            1.0
        } else if a <= outer {
            (outer - a) / (outer - inner)
        } else {
            0.0
        }
    };
    GridFunction::from_fn(spec, |p| {
        if spec.dim == 1 {
            ramp(p[0])
        } else {
            ramp(p[0]) * plateau(p[1])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec1d() -> GridSpec {
        GridSpec::new(1, 4.0, 17).unwrap()
    }

    #[test]
    fn spacing_and_coords() {
        let s = spec1d();
        assert_eq!(s.spacing(), 0.5);
        assert_eq!(s.axis_coord(0), -4.0);
        assert_eq!(s.axis_coord(16), 4.0);
        assert_eq!(s.snap_axis(0.24), Some(8));
        assert_eq!(s.snap_axis(-4.3), None);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(3, 1.0, 9).is_err());
        assert!(GridSpec::new(1, 0.0, 9).is_err());
        assert!(GridSpec::new(1, 1.0, 2).is_err());
    }

    #[test]
    fn sup_norm_matches_values() {
        let s = spec1d();
        let f = GridFunction::from_fn(s, |p| p[0] * 0.25).unwrap();
        assert!((f.sup_norm() - 1.0).abs() < 1e-12);
        assert_eq!(f.value_at(&[0.5]), 0.125);
        assert_eq!(f.value_at(&[9.0]), 0.0);
    }

    #[test]
    fn modulus_table_is_monotone_and_bounds_differences() {
        let s = spec1d();
        let f = GridFunction::from_fn(s, |p| (1.0 - p[0].abs() / 2.0).max(0.0)).unwrap();
        let table = f.modulus_table();
        for w in table.windows(2) {
            assert!(w[0].1 <= w[1].1 + 1e-15);
        }
        // tent slope 1/2, lag 1 = h/2 = 0.25
        assert!((table[0].1 - 0.25).abs() < 1e-12);
        assert!((f.lipschitz_estimate() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_extension_counts_in_modulus() {
        let s = GridSpec::new(1, 1.0, 5).unwrap();
        let f = GridFunction::from_values(s, vec![1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        // constant inside, but the jump to the exterior zero is h-visible
        assert!((f.modulus_table()[0].1 - 1.0).abs() < 1e-15);
        assert!((f.boundary_max() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn presets_vanish_at_boundary_when_parameterized_sanely() {
        let s = GridSpec::new(1, 8.0, 129).unwrap();
        let bump = gaussian_bump(s, &[0.0], 1.5).unwrap();
        assert!(bump.f.boundary_max() < 1e-6);
        let t = tent(s, &[0.0], 2.0).unwrap();
        assert!(t.boundary_max() == 0.0);
        let c = clipped_identity(s, 4.0, 7.0).unwrap();
        assert!(c.boundary_max() == 0.0);
        assert_eq!(c.value_at(&[2.0]), 2.0);
    }

    #[test]
    fn d2_flat_roundtrip() {
        let s = GridSpec::new(2, 2.0, 9).unwrap();
        for i in 0..s.len() {
            let m = s.unflat(i);
            assert_eq!(s.flat(&m[..]), i);
        }
        let p = s.position(s.flat(&[4, 4]));
        assert_eq!(&p[..2], &[0.0, 0.0]);
    }
}
