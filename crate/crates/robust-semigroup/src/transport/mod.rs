//! Wasserstein distances and worst-case expectations over Wasserstein
//! neighborhoods (hard balls and distance-penalized families).

mod dual;
mod simplex;

use crate::error::Error;
use crate::grid::{GridFunction, GridSpec};
use crate::measures::DiscreteMeasure;
use crate::Result;
use serde::{Deserialize, Serialize};

pub(crate) use dual::{BudgetTerm, EngineScratch, RobustEngine};

/// Cap on `m·n` for the exact transport LP.
const LP_SIZE_CAP: usize = 1_000_000;

/// Penalty on the transport radius: either the hard-ball indicator
/// (`φ = +∞·1_{(δ,∞)}`) or a superlinear power `φ(x) = c·x^q` with `q > p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    Ball { delta: f64 },
    Power { c: f64, q: f64 },
}

/// A penalty `φ` together with the Wasserstein order `p` it scales against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    p: f64,
    kind: PenaltyKind,
}

fn validate_order(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("Wasserstein order must lie in (1, ∞), got {p}")));
    }
    Ok(())
}

impl Penalty {
    pub fn ball(p: f64, delta: f64) -> Result<Self> {
        validate_order(p)?;
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::domain(format!("ball radius slope must be ≥ 0, got {delta}")));
        }
        Ok(Penalty { p, kind: PenaltyKind::Ball { delta } })
    }

    /// `φ(x) = c·x^q`. Requires `q > p` so `x ↦ φ(x^{1/p})` is convex and
    /// the penalty grows faster than linear in the radius power.
    pub fn power(p: f64, c: f64, q: f64) -> Result<Self> {
        validate_order(p)?;
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::domain(format!("power penalty needs c > 0, got {c}")));
        }
        if !(q > p) || !q.is_finite() {
            return Err(Error::domain(format!("power penalty needs q > p, got q={q}, p={p}")));
        }
        Ok(Penalty { p, kind: PenaltyKind::Power { c, q } })
    }

    pub fn order(&self) -> f64 {
        self.p
    }

    pub fn kind(&self) -> &PenaltyKind {
        &self.kind
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.kind, PenaltyKind::Ball { .. })
    }

    /// `φ(x)` for `x ≥ 0` (`+∞` outside the ball).
    pub fn phi(&self, x: f64) -> f64 {
        match self.kind {
            PenaltyKind::Ball { delta } => {
                if x <= delta {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PenaltyKind::Power { c, q } => c * x.powf(q),
        }
    }

    /// Rescaled penalty `φ_t(x) = t·φ(x/t)`; for `t = 0` the indicator of `{0}`.
    pub fn phi_t(&self, t: f64, x: f64) -> f64 {
        if t == 0.0 {
            return if x > 0.0 { f64::INFINITY } else { 0.0 };
        }
        t * self.phi(x / t)
    }

    /// Convex conjugate `φ*(y) = sup_{x≥0}(xy - φ(x))` for `y ≥ 0`.
    pub fn conjugate(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || !y.is_finite() {
            return Err(Error::domain(format!("conjugate argument must be ≥ 0, got {y}")));
        }
        Ok(match self.kind {
            PenaltyKind::Ball { delta } => delta * y,
            PenaltyKind::Power { c, q } => {
                if y == 0.0 {
                    0.0
                } else {
                    (q - 1.0) / q * (y / (c * q)).powf(1.0 / (q - 1.0)) * y
                }
            }
        })
    }

    /// `d/dy φ*(y)`; also the maximizing `x` in the conjugate.
    pub fn conjugate_slope(&self, y: f64) -> f64 {
        match self.kind {
            PenaltyKind::Ball { delta } => delta,
            PenaltyKind::Power { c, q } => {
                if y <= 0.0 {
                    0.0
                } else {
                    (y / (c * q)).powf(1.0 / (q - 1.0))
                }
            }
        }
    }

    /// Largest radius the effective feasible set can use at horizon `t`:
    /// `sup { r : φ_t(r) ≤ ‖f‖∞ + 1 }`.
    pub fn radius_bracket(&self, t: f64, f_sup: f64) -> f64 {
        match self.kind {
            PenaltyKind::Ball { delta } => delta * t,
            PenaltyKind::Power { c, q } => t * ((f_sup + 1.0) / (t * c)).powf(1.0 / q),
        }
    }

    /// Budget term of the fused dual at horizon `t` (`t > 0`):
    /// `ψ_t(λ) = sup_{s≥0} (λ s - φ_t(s^{1/p}))`.
    pub(crate) fn budget_term(&self, t: f64) -> BudgetTerm {
        match self.kind {
            PenaltyKind::Ball { delta } => {
                BudgetTerm::Ball { budget: (delta * t).powf(self.p) }
            }
            PenaltyKind::Power { c, q } => {
                BudgetTerm::Power { coeff: c * t.powf(1.0 - q), beta: q / self.p }
            }
        }
    }
}

/// `φ*(y)` as a free operation (`y ≥ 0`).
pub fn phi_conjugate(penalty: &Penalty, y: f64) -> Result<f64> {
    penalty.conjugate(y)
}

/// Exact `W_p` between two measures on the line via the quantile coupling.
pub fn wasserstein_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    validate_order(p)?;
    if mu.dim() != 1 || nu.dim() != 1 {
        return Err(Error::domain("wasserstein_1d needs one-dimensional measures"));
    }
    let sorted = |m: &DiscreteMeasure| -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> =
            (0..m.len()).filter(|&i| m.weight(i) > 0.0).map(|i| (m.atom(i)[0], m.weight(i))).collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        v
    };
    let a = sorted(mu);
    let b = sorted(nu);
    let mut total = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    let mut ra = a[0].1;
    let mut rb = b[0].1;
    while i < a.len() && j < b.len() {
        let m = ra.min(rb);
        let d = (a[i].0 - b[j].0).abs();
        total += m * if p == 2.0 { d * d } else { d.powf(p) };
        ra -= m;
        rb -= m;
        if ra <= 1e-18 {
            i += 1;
            if i < a.len() {
                ra = a[i].1;
            }
        }
        if rb <= 1e-18 {
            j += 1;
            if j < b.len() {
                rb = b[j].1;
            }
        }
    }
    Ok(total.powf(1.0 / p))
}

/// Exact `W_p` in any supported dimension via the transportation simplex.
pub fn wasserstein_lp(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    validate_order(p)?;
    if mu.dim() != nu.dim() {
        return Err(Error::domain("measures must share a dimension"));
    }
    let (m, n) = (mu.len(), nu.len());
    if m * n > LP_SIZE_CAP {
        return Err(Error::resource(format!(
            "transport LP with {m}×{n} cells exceeds the {LP_SIZE_CAP} cap"
        )));
    }
    let d = mu.dim();
    let mut cost = vec![0.0f64; m * n];
    for i in 0..m {
        let xi = mu.atom(i);
        for j in 0..n {
            let yj = nu.atom(j);
            let mut d2 = 0.0;
            for k in 0..d {
                let dd = xi[k] - yj[k];
                d2 += dd * dd;
            }
            cost[i * n + j] = if p == 2.0 { d2 } else { d2.sqrt().powf(p) };
        }
    }
    let mut lp = simplex::Transportation::new(mu.weights(), nu.weights(), &cost);
    Ok(lp.solve()?.max(0.0).powf(1.0 / p))
}

/// Measure-plus-grid context reused across base points when sweeping an
/// operator over the whole grid.
pub(crate) struct PreparedRobust {
    pub engine: RobustEngine,
    /// Grid positions of the relocation candidates: axis coordinates for
    /// `d = 1`, flat `(x, y)` pairs for `d = 2`.
    pub zpos: Vec<f64>,
    pub spec: GridSpec,
    atom_coords: Vec<f64>,
    atom_weights: Vec<f64>,
    atom_count: usize,
}

impl PreparedRobust {
    pub fn new(mu: &DiscreteMeasure, spec: &GridSpec, p: f64) -> Self {
        let axis = spec.axis_coords();
        let mut atom_coords = Vec::with_capacity(mu.len() * spec.dim);
        for i in 0..mu.len() {
            atom_coords.extend_from_slice(mu.atom(i));
        }
        let engine = RobustEngine::new(spec.dim, &atom_coords, mu.weights(), &axis, p);
        let zpos = match spec.dim {
            1 => axis,
            _ => {
                let mut z = Vec::with_capacity(spec.len() * 2);
                for i in 0..spec.len() {
                    let pt = spec.position(i);
                    z.push(pt[0]);
                    z.push(pt[1]);
                }
                z
            }
        };
        PreparedRobust {
            engine,
            zpos,
            spec: *spec,
            atom_coords,
            atom_weights: mu.weights().to_vec(),
            atom_count: mu.len(),
        }
    }

    /// Fill `window[z] = f(x + z)` with zero extension, `x` a grid point.
    pub fn fill_window(&self, f: &GridFunction, flat_x: usize, window: &mut Vec<f64>) {
        let spec = &self.spec;
        let n = spec.points_per_axis;
        window.clear();
        window.reserve(spec.len());
        let odd = n % 2 == 1;
        match spec.dim {
            1 if odd => {
                let c = (n - 1) / 2;
                let values = f.values();
                for j in 0..n {
                    let k = flat_x + j;
                    window.push(if k >= c && k - c < n { values[k - c] } else { 0.0 });
                }
            }
            2 if odd => {
                let c = (n - 1) / 2;
                let m = spec.unflat(flat_x);
                let values = f.values();
                for j1 in 0..n {
                    let k1 = m[0] + j1;
                    let row_ok = k1 >= c && k1 - c < n;
                    for j2 in 0..n {
                        let k2 = m[1] + j2;
                        if row_ok && k2 >= c && k2 - c < n {
                            window.push(values[(k1 - c) * n + (k2 - c)]);
                        } else {
                            window.push(0.0);
                        }
                    }
                }
            }
            _ => {
                let x = spec.position(flat_x);
                self.fill_window_at(f, &x[..spec.dim], window);
            }
        }
    }

    /// Generic window builder for an arbitrary base point.
    pub fn fill_window_at(&self, f: &GridFunction, x: &[f64], window: &mut Vec<f64>) {
        let spec = &self.spec;
        window.clear();
        window.reserve(spec.len());
        for zf in 0..spec.len() {
            let z = spec.position(zf);
            let pt = [x[0] + z[0], if spec.dim == 2 { x[1] + z[1] } else { 0.0 }];
            window.push(f.value_at(&pt[..spec.dim]));
        }
    }

    /// Zero-cost value per atom (original order): `f(x + y_i)`.
    pub fn fill_stays(&self, f: &GridFunction, x: &[f64], stays: &mut Vec<f64>) {
        stays.clear();
        let d = self.spec.dim;
        for i in 0..self.atom_count {
            let y = &self.atom_coords[i * d..(i + 1) * d];
            let pt = [x[0] + y[0], if d == 2 { x[1] + y[1] } else { 0.0 }];
            stays.push(f.value_at(&pt[..d]));
        }
    }

    pub fn solve(
        &self,
        window: &[f64],
        stays: &[f64],
        budget: BudgetTerm,
        hint: Option<f64>,
        scratch: &mut EngineScratch,
    ) -> (f64, Option<f64>) {
        let mut minv = f64::INFINITY;
        let mut maxv = f64::NEG_INFINITY;
        for &v in window {
            minv = minv.min(v);
            maxv = maxv.max(v);
        }
        let osc = (maxv - minv).max(0.0);
        if let BudgetTerm::Ball { budget: b } = budget {
            if b <= 0.0 {
                let baseline: f64 =
                    stays.iter().zip(&self.atom_weights).map(|(s, w)| s * w).sum();
                return (baseline, None);
            }
        }
        self.engine.solve(window, &self.zpos, stays, budget, osc, hint, scratch)
    }
}

/// Worst-case expectation `sup { ∫ f(x+y) ν(dy) : W_p(μ, ν) ≤ radius }`,
/// with relocation candidates restricted to the grid carrying `f`.
pub fn robust_sup_ball(
    f: &GridFunction,
    mu: &DiscreteMeasure,
    radius: f64,
    p: f64,
    x: &[f64],
) -> Result<f64> {
    validate_order(p)?;
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::domain(format!("ball radius must be ≥ 0, got {radius}")));
    }
    let spec = *f.spec();
    if mu.dim() != spec.dim || x.len() != spec.dim {
        return Err(Error::domain("dimension mismatch between f, μ, and the base point"));
    }
    let prep = PreparedRobust::new(mu, &spec, p);
    let mut stays = Vec::new();
    prep.fill_stays(f, x, &mut stays);
    if radius == 0.0 {
        return Ok((0..mu.len()).map(|i| mu.weight(i) * stays[i]).sum());
    }
    let mut window = Vec::new();
    prep.fill_window_at(f, x, &mut window);
    let mut scratch = EngineScratch::new();
    let (v, _) = prep.solve(
        &window,
        &stays,
        BudgetTerm::Ball { budget: radius.powf(p) },
        None,
        &mut scratch,
    );
    Ok(v)
}

/// Penalized worst-case expectation
/// `sup_ν ( ∫ f(x+y) ν(dy) - φ_t(W_p(μ, ν)) )`, evaluated as
/// `sup_{ε ≥ 0} ( ball(ε) - φ_t(ε) )` over the bracket from the effective
/// feasible set. The ball kind collapses to `robust_sup_ball` at radius `δt`.
pub fn robust_sup_penalty(
    f: &GridFunction,
    mu: &DiscreteMeasure,
    penalty: &Penalty,
    t: f64,
    x: &[f64],
) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    let spec = *f.spec();
    if mu.dim() != spec.dim || x.len() != spec.dim {
        return Err(Error::domain("dimension mismatch between f, μ, and the base point"));
    }
    let p = penalty.order();
    if t == 0.0 {
        // φ_0 pins ν = μ
        return Ok((0..mu.len()).map(|i| {
            let y = mu.atom(i);
            let pt = [x[0] + y[0], if spec.dim == 2 { x[1] + y[1] } else { 0.0 }];
            mu.weight(i) * f.value_at(&pt[..spec.dim])
        }).sum());
    }
    if let PenaltyKind::Ball { delta } = penalty.kind() {
        return robust_sup_ball(f, mu, delta * t, p, x);
    }
    let prep = PreparedRobust::new(mu, &spec, p);
    let mut stays = Vec::new();
    prep.fill_stays(f, x, &mut stays);
    let mut window = Vec::new();
    prep.fill_window_at(f, x, &mut window);
    let mut scratch = EngineScratch::new();
    let eps_max = penalty.radius_bracket(t, f.sup_norm());
    let mut hint: Option<f64> = None;
    let mut ball_at = |eps: f64, hint: &mut Option<f64>| -> f64 {
        if eps <= 0.0 {
            return (0..mu.len()).map(|i| mu.weight(i) * stays[i]).sum();
        }
        let (v, h) = prep.solve(
            &window,
            &stays,
            BudgetTerm::Ball { budget: eps.powf(p) },
            *hint,
            &mut scratch,
        );
        *hint = h;
        v
    };
    // objective ε ↦ ball(ε) - φ_t(ε) is unimodal (concave after s = ε^p)
    let mut lo = 0.0f64;
    let mut hi = eps_max;
    let mut best = ball_at(lo, &mut hint).max(ball_at(hi, &mut hint) - penalty.phi_t(t, hi));
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + eps_max) {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let v1 = ball_at(m1, &mut hint) - penalty.phi_t(t, m1);
        let v2 = ball_at(m2, &mut hint) - penalty.phi_t(t, m2);
        best = best.max(v1).max(v2);
        if v1 < v2 {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{clipped_identity, GridSpec};

    fn measure1(atoms: Vec<f64>, weights: Vec<f64>) -> DiscreteMeasure {
        DiscreteMeasure::new(1, atoms, weights).unwrap()
    }

    #[test]
    fn w1d_examples() {
        let mu = measure1(vec![0.0, 2.0], vec![0.5, 0.5]);
        let nu = measure1(vec![1.0, 3.0], vec![0.5, 0.5]);
        assert!((wasserstein_1d(&mu, &mu, 2.0).unwrap()).abs() < 1e-15);
        let a = DiscreteMeasure::dirac(&[-1.0]).unwrap();
        let b = DiscreteMeasure::dirac(&[2.5]).unwrap();
        assert!((wasserstein_1d(&a, &b, 1.5).unwrap() - 3.5).abs() < 1e-12);
        assert!((wasserstein_1d(&mu, &nu, 2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_matches_1d_and_euclidean_diracs() {
        let mu = measure1(vec![0.0, 2.0], vec![0.5, 0.5]);
        let nu = measure1(vec![1.0, 3.0], vec![0.5, 0.5]);
        assert!((wasserstein_lp(&mu, &nu, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(wasserstein_lp(&mu, &mu, 2.0).unwrap() < 1e-9);
        let a = DiscreteMeasure::dirac(&[0.0, 0.0]).unwrap();
        let b = DiscreteMeasure::dirac(&[3.0, 4.0]).unwrap();
        assert!((wasserstein_lp(&a, &b, 2.0).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn lp_rejects_oversized_instances() {
        let atoms: Vec<f64> = (0..1001).map(|i| i as f64).collect();
        let w = vec![1.0 / 1001.0; 1001];
        let big = measure1(atoms, w);
        assert!(matches!(wasserstein_lp(&big, &big, 2.0), Err(Error::Resource(_))));
    }

    #[test]
    fn conjugate_examples() {
        let ball = Penalty::ball(2.0, 1.5).unwrap();
        assert!((phi_conjugate(&ball, 2.0).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(phi_conjugate(&ball, 0.0).unwrap(), 0.0);
        let power = Penalty::power(1.5, 0.5, 2.0).unwrap();
        assert!((phi_conjugate(&power, 3.0).unwrap() - 4.5).abs() < 1e-12);
        assert_eq!(phi_conjugate(&power, 0.0).unwrap(), 0.0);
        assert!(phi_conjugate(&power, -1.0).is_err());
    }

    #[test]
    fn fenchel_young_with_equality_at_the_maximizer() {
        let power = Penalty::power(2.0, 1.0, 4.0).unwrap();
        for &y in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let fy = power.conjugate(y).unwrap();
            for k in 0..50 {
                let x = 0.1 * k as f64;
                assert!(power.phi(x) + fy >= x * y - 1e-12);
            }
            let xstar = power.conjugate_slope(y);
            assert!((power.phi(xstar) + fy - xstar * y).abs() < 1e-6);
        }
    }

    #[test]
    fn penalty_validation() {
        assert!(Penalty::ball(1.0, 1.0).is_err());
        assert!(Penalty::ball(2.0, -0.5).is_err());
        assert!(Penalty::power(2.0, 0.0, 4.0).is_err());
        assert!(Penalty::power(2.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn ball_radius_zero_is_the_plain_expectation() {
        let spec = GridSpec::new(1, 4.0, 33).unwrap();
        let f = GridFunction::from_fn(spec, |p| (1.0 - p[0].abs() / 2.0).max(0.0)).unwrap();
        let mu = measure1(vec![-0.5, 0.5], vec![0.5, 0.5]);
        let v = robust_sup_ball(&f, &mu, 0.0, 2.0, &[0.0]).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
        assert!(robust_sup_ball(&f, &mu, -0.1, 2.0, &[0.0]).is_err());
    }

    #[test]
    fn constant_function_is_a_fixed_point_for_small_radii() {
        let spec = GridSpec::new(1, 4.0, 33).unwrap();
        let f = GridFunction::from_fn(spec, |_| 0.7).unwrap();
        let mu = DiscreteMeasure::dirac(&[0.0]).unwrap();
        let v = robust_sup_ball(&f, &mu, 0.5, 2.0, &[1.0]).unwrap();
        assert!((v - 0.7).abs() < 1e-9, "value {v}");
    }

    #[test]
    fn clipped_identity_full_translation() {
        let spec = GridSpec::new(1, 8.0, 1025).unwrap();
        let f = clipped_identity(spec, 4.0, 7.0).unwrap();
        let mu = DiscreteMeasure::dirac(&[0.0]).unwrap();
        let v = robust_sup_ball(&f, &mu, 0.5, 2.0, &[0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-9, "value {v}");
    }

    #[test]
    fn ball_is_monotone_in_radius() {
        let spec = GridSpec::new(1, 4.0, 65).unwrap();
        let f = GridFunction::from_fn(spec, |p| (p[0] * 1.3).sin()).unwrap();
        let mu = measure1(vec![-0.25, 0.5], vec![0.4, 0.6]);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=8 {
            let r = 0.25 * k as f64;
            let v = robust_sup_ball(&f, &mu, r, 2.0, &[0.0]).unwrap();
            assert!(v >= prev - 1e-9, "radius {r}: {v} < {prev}");
            assert!(v <= f.sup_norm() + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn penalty_ball_kind_decomposes_to_the_ball() {
        let spec = GridSpec::new(1, 4.0, 65).unwrap();
        let f = GridFunction::from_fn(spec, |p| (1.0 - p[0].abs() / 2.0).max(0.0)).unwrap();
        let mu = measure1(vec![-0.5, 0.25], vec![0.5, 0.5]);
        let pen = Penalty::ball(2.0, 1.0).unwrap();
        for &t in &[0.125, 0.5, 1.0] {
            let a = robust_sup_penalty(&f, &mu, &pen, t, &[0.5]).unwrap();
            let b = robust_sup_ball(&f, &mu, t, 2.0, &[0.5]).unwrap();
            assert!((a - b).abs() < 1e-9, "t={t}: {a} vs {b}");
        }
        // δ = 0 keeps the plain expectation
        let pen0 = Penalty::ball(2.0, 0.0).unwrap();
        let a = robust_sup_penalty(&f, &mu, &pen0, 0.5, &[0.0]).unwrap();
        let b = robust_sup_ball(&f, &mu, 0.0, 2.0, &[0.0]).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn zero_function_has_zero_robust_value() {
        let spec = GridSpec::new(1, 4.0, 65).unwrap();
        let f = GridFunction::zero(spec);
        let mu = measure1(vec![-0.5, 0.25], vec![0.5, 0.5]);
        for pen in [Penalty::ball(2.0, 1.0).unwrap(), Penalty::power(2.0, 1.0, 4.0).unwrap()] {
            let v = robust_sup_penalty(&f, &mu, &pen, 0.5, &[0.0]).unwrap();
            assert!(v.abs() < 1e-12, "value {v}");
        }
    }

    #[test]
    fn negative_time_is_rejected() {
        let spec = GridSpec::new(1, 4.0, 33).unwrap();
        let f = GridFunction::zero(spec);
        let mu = DiscreteMeasure::dirac(&[0.0]).unwrap();
        let pen = Penalty::ball(2.0, 1.0).unwrap();
        assert!(robust_sup_penalty(&f, &mu, &pen, -0.5, &[0.0]).is_err());
    }
}
