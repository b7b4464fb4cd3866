//! Independent reference computations.
//!
//! Everything here deliberately avoids the production solver paths: the
//! primal transport value is built from per-atom concave envelopes and a
//! greedy budget fill, the small-instance LP from exhaustive vertex
//! enumeration, and the Gaussian smoothing from its closed form. These are
//! the second routes that the duality-based implementations are checked
//! against, both in the test suites and in the runtime check harness.

use crate::error::Error;
use crate::grid::GridFunction;
use crate::measures::DiscreteMeasure;
use crate::transport::{robust_sup_ball, Penalty};
use crate::Result;

/// Exact primal value of the grid-restricted ball program, computed without
/// duality: each atom's relocation options form a concave value-of-budget
/// envelope (splitting an atom over two destinations realizes the chords),
/// and a single greedy pass allocates the shared budget by marginal slope.
pub fn robust_sup_ball_primal(
    f: &GridFunction,
    mu: &DiscreteMeasure,
    radius: f64,
    p: f64,
    x: &[f64],
) -> Result<f64> {
    if !(radius >= 0.0) {
        return Err(Error::domain("radius must be nonnegative"));
    }
    let spec = *f.spec();
    let d = spec.dim;
    if mu.dim() != d || x.len() != d {
        return Err(Error::domain("dimension mismatch"));
    }
    let budget = radius.powf(p);
    let mut total = 0.0f64;
    let mut segments: Vec<(f64, f64)> = Vec::new(); // (slope, mass-scaled capacity)
    for i in 0..mu.len() {
        let w = mu.weight(i);
        let y = mu.atom(i);
        let stay_pt = [x[0] + y[0], if d == 2 { x[1] + y[1] } else { 0.0 }];
        let mut options: Vec<(f64, f64)> = vec![(0.0, f.value_at(&stay_pt[..d]))];
        for zf in 0..spec.len() {
            let z = spec.position(zf);
            let mut d2 = 0.0;
            for k in 0..d {
                let dd = z[k] - y[k];
                d2 += dd * dd;
            }
            let cost = if p == 2.0 { d2 } else { d2.sqrt().powf(p) };
            let pt = [x[0] + z[0], if d == 2 { x[1] + z[1] } else { 0.0 }];
            options.push((cost, f.value_at(&pt[..d])));
        }
        options.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // Pareto filter: strictly better value for strictly higher cost
        let mut frontier: Vec<(f64, f64)> = Vec::new();
        for (c, v) in options {
            match frontier.last() {
                None => frontier.push((c, v)),
                Some(&(lc, lv)) => {
                    if (c - lc).abs() < 1e-15 {
                        if v > lv {
                            frontier.last_mut().unwrap().1 = v;
                        }
                    } else if v > lv {
                        frontier.push((c, v));
                    }
                }
            }
        }
        // upper concave hull over the frontier
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for pt in frontier {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let s_ab = (b.1 - a.1) / (b.0 - a.0);
                let s_ap = (pt.1 - a.1) / (pt.0 - a.0);
                if s_ap >= s_ab {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        total += w * hull[0].1;
        for pair in hull.windows(2) {
            let slope = (pair[1].1 - pair[0].1) / (pair[1].0 - pair[0].0);
            segments.push((slope, w * (pair[1].0 - pair[0].0)));
        }
    }
    segments.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut rem = budget;
    for (slope, cap) in segments {
        if slope <= 0.0 || rem <= 0.0 {
            break;
        }
        let take = cap.min(rem);
        total += slope * take;
        rem -= take;
    }
    Ok(total)
}

/// Exact small-instance transport LP by enumerating the vertices of the
/// transportation polytope (spanning-tree bases of the bipartite graph).
/// Returns `W_p`; instances are capped at `m·n ≤ 20` cells.
pub fn wasserstein_by_vertex_enumeration(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<f64> {
    let (m, n) = (mu.len(), nu.len());
    if m * n > 20 {
        return Err(Error::resource("vertex enumeration is limited to m·n ≤ 20"));
    }
    if mu.dim() != nu.dim() {
        return Err(Error::domain("measures must share a dimension"));
    }
    let d = mu.dim();
    let cells = m * n;
    let basis_size = m + n - 1;
    let mut cost = vec![0.0f64; cells];
    for i in 0..m {
        for j in 0..n {
            let mut d2 = 0.0;
            for k in 0..d {
                let dd = mu.atom(i)[k] - nu.atom(j)[k];
                d2 += dd * dd;
            }
            cost[i * n + j] = if p == 2.0 { d2 } else { d2.sqrt().powf(p) };
        }
    }
    let mut best = f64::INFINITY;
    let mut chosen = vec![0usize; basis_size];
    enumerate_combinations(cells, basis_size, &mut chosen, 0, 0, &mut |subset| {
        if let Some(value) = tree_solution_cost(subset, m, n, mu.weights(), nu.weights(), &cost) {
            if value < best {
                best = value;
            }
        }
    });
    if !best.is_finite() {
        return Err(Error::resource("no feasible basis found"));
    }
    Ok(best.max(0.0).powf(1.0 / p))
}

fn enumerate_combinations(
    cells: usize,
    k: usize,
    chosen: &mut Vec<usize>,
    depth: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        visit(chosen);
        return;
    }
    for c in start..cells {
        if cells - c < k - depth {
            break;
        }
        chosen[depth] = c;
        enumerate_combinations(cells, k, chosen, depth + 1, c + 1, visit);
    }
}

/// Flow on a candidate spanning tree by leaf elimination; `None` when the
/// subset is not a tree or yields negative flows.
fn tree_solution_cost(
    subset: &[usize],
    m: usize,
    n: usize,
    supply: &[f64],
    demand: &[f64],
    cost: &[f64],
) -> Option<f64> {
    let nodes = m + n;
    let mut degree = vec![0usize; nodes];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (e, &cell) in subset.iter().enumerate() {
        let (i, j) = (cell / n, cell % n);
        degree[i] += 1;
        degree[m + j] += 1;
        incident[i].push(e);
        incident[m + j].push(e);
    }
    if degree.iter().any(|&deg| deg == 0) {
        return None; // disconnected (and |E| = |V|-1, so not a tree)
    }
    let mut residual: Vec<f64> = supply.iter().chain(demand.iter()).copied().collect();
    let mut flow = vec![f64::NAN; subset.len()];
    let mut removed_edges = vec![false; subset.len()];
    let mut stack: Vec<usize> = (0..nodes).filter(|&v| degree[v] == 1).collect();
    let mut processed = 0usize;
    while let Some(v) = stack.pop() {
        let e = match incident[v].iter().find(|&&e| !removed_edges[e]) {
            Some(&e) => e,
            None => continue,
        };
        let cell = subset[e];
        let (i, j) = (cell / n, cell % n);
        let fl = residual[v];
        if fl < -1e-12 {
            return None;
        }
        flow[e] = fl;
        removed_edges[e] = true;
        processed += 1;
        let other = if v == i { m + j } else { i };
        residual[other] -= fl;
        residual[v] = 0.0;
        degree[v] -= 1;
        degree[other] -= 1;
        if degree[other] == 1 {
            stack.push(other);
        }
    }
    if processed != subset.len() {
        return None; // a cycle survived leaf elimination
    }
    Some(flow.iter().zip(subset).map(|(f, &cell)| f.max(0.0) * cost[cell]).sum())
}

/// Dense scan over the penalty radius, validating the one-dimensional
/// search layer of the penalized supremum (the ball values themselves come
/// from the shared ball routine).
pub fn robust_sup_penalty_dense_scan(
    f: &GridFunction,
    mu: &DiscreteMeasure,
    penalty: &Penalty,
    t: f64,
    x: &[f64],
    steps: usize,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("dense scan needs t > 0"));
    }
    let eps_max = penalty.radius_bracket(t, f.sup_norm());
    let mut best = f64::NEG_INFINITY;
    for k in 0..=steps {
        let eps = eps_max * k as f64 / steps as f64;
        let ball = robust_sup_ball(f, mu, eps, penalty.order(), x)?;
        let v = ball - penalty.phi_t(t, eps);
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// Largest `η·g` over deterministically sampled `η` in the ball
/// `{|η - γ| ≤ δ}`; compares against the closed form `γ·g + δ|g|`.
pub fn drift_ball_sampled_max(g: &[f64], gamma: &[f64], delta: f64, samples: usize) -> f64 {
    assert_eq!(g.len(), gamma.len());
    match g.len() {
        1 => {
            let mut best = f64::NEG_INFINITY;
            for k in 0..samples.max(2) {
                let s = 2.0 * k as f64 / (samples.max(2) - 1) as f64 - 1.0;
                best = best.max((gamma[0] + delta * s) * g[0]);
            }
            best
        }
        _ => {
            let mut best = f64::NEG_INFINITY;
            for k in 0..samples.max(4) {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / samples.max(4) as f64;
                let eta = [gamma[0] + delta * theta.cos(), gamma[1] + delta * theta.sin()];
                best = best.max(eta[0] * g[0] + eta[1] * g[1]);
            }
            best
        }
    }
}

/// Closed-form Gaussian smoothing of a Gaussian bump:
/// `∫ exp(-(x + y - center)²/(2 width²)) N(mean_shift, variance)(dy)`.
pub fn gaussian_smoothed_bump(
    x: f64,
    center: f64,
    width: f64,
    mean_shift: f64,
    variance: f64,
) -> f64 {
    let s2 = width * width + variance;
    let d = x + mean_shift - center;
    width / s2.sqrt() * (-d * d / (2.0 * s2)).exp()
}
