//! Dual solver for the worst-case expectation over a Wasserstein
//! neighborhood of a discrete measure.
//!
//! For a base point `x`, the candidate measures relocate the atoms `y_i` of
//! `μ` to grid points `z` (each atom may split); the value of the finite
//! program
//!
//! `sup { Σ_i Σ_z π_{iz} f(x+z) : Σ_z π_{iz} = w_i,  Σ π_{iz} |z-y_i|^p ≤ B }`
//!
//! equals `inf_{λ≥0} [ λB + Σ_i w_i max_z (f(x+z) - λ|z-y_i|^p) ]` by LP
//! duality. The penalized form replaces `λB` by the conjugate of the
//! rescaled penalty, which keeps the same one-dimensional convex search.
//!
//! The inner maxima are computed for all atoms at once: the score matrix
//! `(i, z) ↦ f(x+z) - λ|z-y_i|^p` is totally monotone for `p > 1`, so the
//! leftmost argmax is nondecreasing in the atom position and a divide &
//! conquer over the sorted atoms needs `O((A+N)·log A)` scores per `λ`.
//! Leftmost ties implement the smallest-z (lexicographic in 2-d) rule.

/// Budget term `ψ(λ) = sup_{s≥0} (λ s - Φ_t(s))` of the outer dual, where
/// `s` stands for the p-th power of the transport radius.
#[derive(Debug, Clone, Copy)]
pub(crate) enum BudgetTerm {
    /// Hard radius `r`: `ψ(λ) = λ r^p`.
    Ball { budget: f64 },
    /// `Φ_t(s) = K s^β` with `β > 1`: `ψ(λ) = (1 - 1/β) λ (λ/(Kβ))^{1/(β-1)}`.
    Power { coeff: f64, beta: f64 },
}

impl BudgetTerm {
    pub fn value(&self, lambda: f64) -> f64 {
        match *self {
            BudgetTerm::Ball { budget } => lambda * budget,
            BudgetTerm::Power { coeff, beta } => {
                if lambda <= 0.0 {
                    0.0
                } else {
                    let s = (lambda / (coeff * beta)).powf(1.0 / (beta - 1.0));
                    lambda * s * (1.0 - 1.0 / beta)
                }
            }
        }
    }

    /// `ψ'(λ)`, the radius-power the penalty is willing to buy at price λ.
    pub fn slope(&self, lambda: f64) -> f64 {
        match *self {
            BudgetTerm::Ball { budget } => budget,
            BudgetTerm::Power { coeff, beta } => {
                if lambda <= 0.0 {
                    0.0
                } else {
                    (lambda / (coeff * beta)).powf(1.0 / (beta - 1.0))
                }
            }
        }
    }
}

/// Per-measure data reused across base points and λ evaluations.
pub(crate) struct RobustEngine {
    dim: usize,
    p: f64,
    /// Sorted atom coordinates (d=1) or flat positions (d=2), plus weights.
    qpos: Vec<f64>,
    qw: Vec<f64>,
    /// Original atom index per sorted slot (stay values are per-atom).
    perm: Vec<usize>,
    /// Smallest nonzero shift any atom can make onto the grid.
    min_shift: f64,
}

/// Scratch buffers for the inner maximization.
pub(crate) struct EngineScratch {
    best: Vec<usize>,
}

impl EngineScratch {
    pub fn new() -> Self {
        EngineScratch { best: Vec::new() }
    }
}

pub(crate) const SEARCH_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 90;

fn cost_pow(d2: f64, p: f64) -> f64 {
    // d2 is the squared Euclidean distance
    if p == 2.0 {
        d2
    } else {
        d2.sqrt().powf(p)
    }
}

impl RobustEngine {
    /// `atoms` are row-major coordinates (`len = n·dim`), `axis` the grid
    /// coordinates of one axis.
    pub fn new(dim: usize, atoms: &[f64], weights: &[f64], axis: &[f64], p: f64) -> Self {
        let n = weights.len();
        let h = if axis.len() > 1 { axis[1] - axis[0] } else { 1.0 };
        let mut order: Vec<usize> = (0..n).collect();
        if dim == 1 {
            order.sort_by(|&a, &b| atoms[a].partial_cmp(&atoms[b]).unwrap());
        }
        let mut qpos = Vec::with_capacity(n * dim);
        let mut qw = Vec::with_capacity(n);
        for &i in &order {
            qpos.extend_from_slice(&atoms[i * dim..(i + 1) * dim]);
            qw.push(weights[i]);
        }
        let mut min_shift = f64::INFINITY;
        for i in 0..n {
            for k in 0..dim {
                let y = atoms[i * dim + k];
                let lo = axis[0];
                let snapped = ((y - lo) / h).round() * h + lo;
                let d0 = (y - snapped).abs();
                let shift = if d0 > 1e-12 * h { d0 } else { h };
                min_shift = min_shift.min(shift);
            }
        }
        if !min_shift.is_finite() {
            min_shift = h;
        }
        RobustEngine { dim, p, qpos, qw, perm: order, min_shift }
    }

    /// `Σ_i w_i · max_z (window[z] - λ·cost)` plus the cost of the chosen
    /// plan; `stays[i]` is the zero-cost value of atom `i` (original order).
    fn eval(
        &self,
        window: &[f64],
        zpos: &[f64],
        stays: &[f64],
        lambda: f64,
        scratch: &mut EngineScratch,
    ) -> (f64, f64) {
        let nq = self.qw.len();
        scratch.best.resize(nq, 0);
        if self.dim == 1 {
            self.argmax_dnc(window, zpos, lambda, 0, nq - 1, 0, window.len() - 1, scratch);
        } else {
            self.argmax_scan(window, zpos, lambda, scratch);
        }
        let mut value = 0.0;
        let mut cost = 0.0;
        for s in 0..nq {
            let z = scratch.best[s];
            let d2 = self.dist2(s, zpos, z);
            let c = cost_pow(d2, self.p);
            let v = window[z] - lambda * c;
            let stay = stays[self.perm[s]];
            if stay > v {
                value += self.qw[s] * stay;
            } else {
                value += self.qw[s] * v;
                cost += self.qw[s] * c;
            }
        }
        (value, cost)
    }

    fn dist2(&self, slot: usize, zpos: &[f64], z: usize) -> f64 {
        match self.dim {
            1 => {
                let d = zpos[z] - self.qpos[slot];
                d * d
            }
            _ => {
                let dx = zpos[z * 2] - self.qpos[slot * 2];
                let dy = zpos[z * 2 + 1] - self.qpos[slot * 2 + 1];
                dx * dx + dy * dy
            }
        }
    }

    fn argmax_dnc(
        &self,
        window: &[f64],
        zpos: &[f64],
        lambda: f64,
        qlo: usize,
        qhi: usize,
        zlo: usize,
        zhi: usize,
        scratch: &mut EngineScratch,
    ) {
        let qm = qlo + (qhi - qlo) / 2;
        let y = self.qpos[qm];
        let p_is_2 = self.p == 2.0;
        let mut best_z = zlo;
        let mut best_v = f64::NEG_INFINITY;
        for z in zlo..=zhi {
            let d = zpos[z] - y;
            let c = if p_is_2 { d * d } else { cost_pow(d * d, self.p) };
            let v = window[z] - lambda * c;
            if v > best_v {
                best_v = v;
                best_z = z;
            }
        }
        scratch.best[qm] = best_z;
        if qm > qlo {
            self.argmax_dnc(window, zpos, lambda, qlo, qm - 1, zlo, best_z, scratch);
        }
        if qm < qhi {
            self.argmax_dnc(window, zpos, lambda, qm + 1, qhi, best_z, zhi, scratch);
        }
    }

    fn argmax_scan(&self, window: &[f64], zpos: &[f64], lambda: f64, scratch: &mut EngineScratch) {
        for s in 0..self.qw.len() {
            let mut best_z = 0usize;
            let mut best_v = f64::NEG_INFINITY;
            for z in 0..window.len() {
                let v = window[z] - lambda * cost_pow(self.dist2(s, zpos, z), self.p);
                if v > best_v {
                    best_v = v;
                    best_z = z;
                }
            }
            scratch.best[s] = best_z;
        }
    }

    /// Minimize `ψ(λ) + D(λ)` over `λ ∈ [0, λ_max]`. Returns the value and
    /// a reusable bracket hint. `osc` is the oscillation of the window
    /// (zero exterior included), used for the λ bracket.
    pub fn solve(
        &self,
        window: &[f64],
        zpos: &[f64],
        stays: &[f64],
        budget: BudgetTerm,
        osc: f64,
        hint: Option<f64>,
        scratch: &mut EngineScratch,
    ) -> (f64, Option<f64>) {
        let baseline: f64 =
            (0..self.qw.len()).map(|s| self.qw[s] * stays[self.perm[s]]).sum();
        let max_f = window
            .iter()
            .copied()
            .chain(stays.iter().copied())
            .fold(f64::NEG_INFINITY, f64::max);
        let clamp = |v: f64| v.max(baseline).min(max_f);

        if osc <= 0.0 {
            // every candidate integrates the same value and the penalty infimum is zero
            return (clamp(baseline), None);
        }
        let (v0, c0) = self.eval(window, zpos, stays, 0.0, scratch);
        if c0 <= budget.slope(0.0) {
            return (clamp(v0), None);
        }
        let lambda_max = 2.0 * osc / self.min_shift.powf(self.p);

        let mut lo = 0.0f64;
        let mut hi = lambda_max;
        let mut cost_lo = c0;
        let mut best = v0; // g(0) = ψ(0) + D(0) = D(0)
        if let Some(hl) = hint {
            let cand_lo = (hl / 8.0).max(0.0);
            let cand_hi = (hl * 8.0).min(lambda_max);
            if cand_lo < cand_hi {
                let (vl, cl) = self.eval(window, zpos, stays, cand_lo, scratch);
                best = best.min(budget.value(cand_lo) + vl);
                if cl > budget.slope(cand_lo) {
                    let (vh, ch) = self.eval(window, zpos, stays, cand_hi, scratch);
                    best = best.min(budget.value(cand_hi) + vh);
                    if ch <= budget.slope(cand_hi) {
                        lo = cand_lo;
                        hi = cand_hi;
                        cost_lo = cl;
                    } else {
                        lo = cand_hi;
                        cost_lo = ch;
                    }
                } else {
                    hi = cand_lo;
                }
            }
        }
        let mut iterations = 0;
        while iterations < MAX_BISECTIONS {
            let err_bound = (hi - lo) * cost_lo.max(budget.slope(hi));
            if err_bound <= SEARCH_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (v, c) = self.eval(window, zpos, stays, mid, scratch);
            best = best.min(budget.value(mid) + v);
            if c > budget.slope(mid) {
                lo = mid;
                cost_lo = c;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        let hint = 0.5 * (lo + hi);
        (clamp(best), if hint > 0.0 { Some(hint) } else { None })
    }
}
