//! Exact discrete optimal transport via the transportation simplex.
//!
//! Small dense instances only (the callers cap `m·n`); costs are arbitrary
//! nonnegative reals. Pivoting is deterministic: most-negative reduced cost
//! with a first-negative (Bland) fallback against degenerate cycling.

use crate::error::Error;
use crate::Result;

pub(crate) struct Transportation<'a> {
    m: usize,
    n: usize,
    cost: &'a [f64],
    /// `Some(flow)` marks a basic cell.
    flow: Vec<Option<f64>>,
}

impl<'a> Transportation<'a> {
    pub fn new(supply: &[f64], demand: &[f64], cost: &'a [f64]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut t = Transportation { m, n, cost, flow: vec![None; m * n] };
        t.northwest_corner(supply, demand);
        t
    }

    fn northwest_corner(&mut self, supply: &[f64], demand: &[f64]) {
        let (m, n) = (self.m, self.n);
        let mut i = 0;
        let mut j = 0;
        let mut ra = supply[0];
        let mut rb = demand[0];
        loop {
            let t = ra.min(rb).max(0.0);
            self.flow[i * n + j] = Some(t);
            ra -= t;
            rb -= t;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if (ra <= rb && i + 1 < m) || j + 1 >= n {
                i += 1;
                ra = supply[i];
            } else {
                j += 1;
                rb = demand[j];
            }
        }
    }

    fn duals(&self) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        // propagate over the basis tree
        let mut stack: Vec<(bool, usize)> = vec![(true, 0)]; // (is_row, index)
        while let Some((is_row, k)) = stack.pop() {
            if is_row {
                for j in 0..n {
                    if self.flow[k * n + j].is_some() && v[j].is_nan() {
                        v[j] = self.cost[k * n + j] - u[k];
                        stack.push((false, j));
                    }
                }
            } else {
                for i in 0..m {
                    if self.flow[i * n + k].is_some() && u[i].is_nan() {
                        u[i] = self.cost[i * n + k] - v[k];
                        stack.push((true, i));
                    }
                }
            }
        }
        (u, v)
    }

    /// Unique cycle created by adding `(ei, ej)` to the basis tree, as an
    /// alternating list of cells starting with the entering one.
    fn cycle(&self, ei: usize, ej: usize) -> Vec<(usize, usize)> {
        let (m, n) = (self.m, self.n);
        // BFS from row ei to column ej over basic cells
        let nodes = m + n; // rows then cols
        let mut parent = vec![usize::MAX; nodes];
        let mut seen = vec![false; nodes];
        let start = ei;
        let goal = m + ej;
        seen[start] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(start);
        while let Some(node) = queue.pop_front() {
            if node == goal {
                break;
            }
            if node < m {
                let i = node;
                for j in 0..n {
                    if self.flow[i * n + j].is_some() && !seen[m + j] {
                        seen[m + j] = true;
                        parent[m + j] = node;
                        queue.push_back(m + j);
                    }
                }
            } else {
                let j = node - m;
                for i in 0..m {
                    if self.flow[i * n + j].is_some() && !seen[i] {
                        seen[i] = true;
                        parent[i] = node;
                        queue.push_back(i);
                    }
                }
            }
        }
        let mut cells = vec![(ei, ej)];
        let mut node = goal;
        while node != start {
            let par = parent[node];
            let (i, j) = if node < m { (node, par - m) } else { (par, node - m) };
            cells.push((i, j));
            node = par;
        }
        cells
    }

    /// Returns the optimal cost `Σ π_{ij} c_{ij}`.
    pub fn solve(&mut self) -> Result<f64> {
        let (m, n) = (self.m, self.n);
        let max_cost = self.cost.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let tol = 1e-12 * (1.0 + max_cost);
        let max_iters = 200 + 40 * (m + n) * (m + n);
        let bland_after = max_iters / 2;
        for iter in 0..max_iters {
            let (u, v) = self.duals();
            let mut enter: Option<(usize, usize)> = None;
            let mut best_r = -tol;
            'scan: for i in 0..m {
                for j in 0..n {
                    if self.flow[i * n + j].is_none() {
                        let r = self.cost[i * n + j] - u[i] - v[j];
                        if r < best_r {
                            best_r = r;
                            enter = Some((i, j));
                            if iter >= bland_after {
                                break 'scan; // first-negative rule
                            }
                        }
                    }
                }
            }
            let (ei, ej) = match enter {
                None => {
                    let total = self
                        .flow
                        .iter()
                        .enumerate()
                        .filter_map(|(k, f)| f.map(|fl| fl * self.cost[k]))
                        .sum();
                    return Ok(total);
                }
                Some(c) => c,
            };
            let cells = self.cycle(ei, ej);
            // odd positions in the list lose flow
            let mut theta = f64::INFINITY;
            let mut leave = None;
            for (pos, &(i, j)) in cells.iter().enumerate().skip(1).step_by(2) {
                let fl = self.flow[i * n + j].unwrap_or(0.0);
                if fl < theta {
                    theta = fl;
                    leave = Some(pos);
                }
            }
            let leave = leave.ok_or_else(|| Error::resource("degenerate transport basis"))?;
            for (pos, &(i, j)) in cells.iter().enumerate() {
                let cell = &mut self.flow[i * n + j];
                let old = cell.unwrap_or(0.0);
                if pos % 2 == 0 {
                    *cell = Some(old + theta);
                } else {
                    *cell = Some((old - theta).max(0.0));
                }
            }
            let (li, lj) = cells[leave];
            self.flow[li * n + lj] = None;
        }
        Err(Error::resource("transportation simplex did not converge"))
    }
}
