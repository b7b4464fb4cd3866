//! The one-step robust operator on grid functions and its dyadic iteration.
//!
//! `step` applies the penalized worst-case expectation against the
//! discretized increment law `μ_t` at every grid point; `iterate` composes
//! it along a dyadic partition of the horizon. The discrete operator
//! inherits the structural properties of its continuum counterpart
//! (contraction, monotonicity, convexity, ball-case sublinearity) up to the
//! search tolerance, and the lemma-style inequalities up to a grid
//! tolerance `τ_disc` that shrinks linearly with the spacing.

use crate::error::Error;
use crate::grid::GridFunction;
use crate::measures::{increment_measure, DiscreteMeasure, LevyModel};
use crate::parallel;
use crate::transport::{EngineScratch, Penalty, PreparedRobust};
use crate::Result;
use rayon::prelude::*;

/// Atoms below this fraction of the largest weight are dropped (and the
/// rest renormalized) before the per-point solves; the induced value error
/// is orders of magnitude below the search tolerance.
const ATOM_WEIGHT_CUTOFF: f64 = 1e-14;

/// Base points per warm-start block of the λ search.
const SWEEP_BLOCK: usize = 64;

/// Discrete tolerance for the lemma-style inequalities: `10·h·(1 + Lip f)`.
pub fn tau_disc(f: &GridFunction) -> f64 {
    10.0 * f.spec().spacing() * (1.0 + f.lipschitz_estimate())
}

/// Dyadic partition of `[0, T]`: the grid `2^{-n}·N_0` up to `T` plus the
/// remainder `T - t_n`, which is applied first.
#[derive(Debug, Clone)]
pub struct DyadicSchedule {
    level: u32,
    horizon: f64,
    steps: Vec<f64>,
}

impl DyadicSchedule {
    pub fn new(level: u32, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
        }
        if level > 32 {
            return Err(Error::domain(format!("dyadic level {level} is unreasonably deep")));
        }
        let dt = 0.5f64.powi(level as i32);
        let k = (horizon / dt).floor() as u64;
        let t_n = k as f64 * dt;
        let remainder = horizon - t_n;
        let mut steps = Vec::with_capacity(k as usize + 1);
        if remainder > 0.0 {
            steps.push(remainder);
        }
        steps.extend(std::iter::repeat(dt).take(k as usize));
        // compensated sum must reproduce the horizon
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &s in &steps {
            let y = s - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        if (sum - horizon).abs() > 1e-12 * horizon.max(1.0) {
            return Err(Error::domain("schedule does not sum to the horizon"));
        }
        Ok(DyadicSchedule { level, horizon, steps })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }
}

fn filtered_for_solver(mu: &DiscreteMeasure) -> DiscreteMeasure {
    let max_w = (0..mu.len()).map(|i| mu.weight(i)).fold(0.0f64, f64::max);
    let cutoff = max_w * ATOM_WEIGHT_CUTOFF;
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    for i in 0..mu.len() {
        if mu.weight(i) > cutoff {
            atoms.extend_from_slice(mu.atom(i));
            weights.push(mu.weight(i));
        }
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    DiscreteMeasure::new(mu.dim(), atoms, weights).expect("filtering preserves validity")
}

/// One application of the robust operator at horizon `t` against an
/// explicit increment measure.
pub fn step_with_measure(
    f: &GridFunction,
    mu: &DiscreteMeasure,
    penalty: &Penalty,
    t: f64,
) -> Result<GridFunction> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let spec = *f.spec();
    if mu.dim() != spec.dim {
        return Err(Error::domain("measure dimension does not match the grid"));
    }
    let solver_mu = filtered_for_solver(mu);
    let prep = PreparedRobust::new(&solver_mu, &spec, penalty.order());
    let budget = penalty.budget_term(t);
    let n = spec.len();
    let mut out = vec![0.0f64; n];
    parallel::pool().install(|| {
        out.par_chunks_mut(SWEEP_BLOCK).enumerate().for_each(|(block, slice)| {
            let mut scratch = EngineScratch::new();
            let mut window: Vec<f64> = Vec::new();
            let mut stays: Vec<f64> = Vec::new();
            let mut hint: Option<f64> = None;
            for (k, value) in slice.iter_mut().enumerate() {
                let flat = block * SWEEP_BLOCK + k;
                prep.fill_window(f, flat, &mut window);
                let x = spec.position(flat);
                prep.fill_stays(f, &x[..spec.dim], &mut stays);
                let (v, h) = prep.solve(&window, &stays, budget, hint, &mut scratch);
                hint = h;
                *value = v;
            }
        });
    });
    GridFunction::from_values(spec, out)
}

/// One application of the robust operator: builds `μ_t` from the model
/// (propagating its mass-leak check) and sweeps the grid.
pub fn step(
    f: &GridFunction,
    model: &LevyModel,
    penalty: &Penalty,
    t: f64,
) -> Result<GridFunction> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let mu = increment_measure(model, t, f.spec())?;
    step_with_measure(f, &mu, penalty, t)
}

/// Dyadically iterated operator: composes `step` along the schedule,
/// remainder step first.
pub fn iterate(
    f: &GridFunction,
    model: &LevyModel,
    penalty: &Penalty,
    schedule: &DyadicSchedule,
) -> Result<GridFunction> {
    let mut g = f.clone();
    let mut cache: Vec<(f64, DiscreteMeasure)> = Vec::new();
    for &dt in schedule.steps() {
        if dt == 0.0 {
            continue;
        }
        let mu = match cache.iter().find(|(s, _)| *s == dt) {
            Some((_, m)) => m.clone(),
            None => {
                let m = increment_measure(model, dt, f.spec())?;
                cache.push((dt, m.clone()));
                m
            }
        };
        g = step_with_measure(&g, &mu, penalty, dt)?;
    }
    Ok(g)
}

/// Per-level violations of the dyadic monotone decrease: entry `k` is
/// `max over the grid of (𝒮^{k+1}(T)f - 𝒮^k(T)f)`, for `k = 0..n_max-1`.
pub fn check_monotone_in_n(
    f: &GridFunction,
    model: &LevyModel,
    penalty: &Penalty,
    horizon: f64,
    n_max: u32,
) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::domain("need n_max ≥ 1"));
    }
    let mut prev = iterate(f, model, penalty, &DyadicSchedule::new(0, horizon)?)?;
    let mut violations = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let cur = iterate(f, model, penalty, &DyadicSchedule::new(n, horizon)?)?;
        violations.push(cur.max_excess_over(&prev));
        prev = cur;
    }
    Ok(violations)
}

/// Max violation of `S(s) S(t-s) f ≤ S(t) f` over the grid.
pub fn check_key_inequality(
    f: &GridFunction,
    model: &LevyModel,
    penalty: &Penalty,
    s: f64,
    t: f64,
) -> Result<f64> {
    if !(0.0 < s && s < t) {
        return Err(Error::domain(format!("need 0 < s < t, got s={s}, t={t}")));
    }
    let inner = step(f, model, penalty, t - s)?;
    let two = step(&inner, model, penalty, s)?;
    let one = step(f, model, penalty, t)?;
    Ok(two.max_excess_over(&one))
}

/// `‖step(f, t) - f‖∞` along a decreasing list of horizons.
pub fn strong_continuity_profile(
    f: &GridFunction,
    model: &LevyModel,
    penalty: &Penalty,
    t_list: &[f64],
) -> Result<Vec<f64>> {
    if t_list.is_empty() || t_list.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::domain("horizons must be positive"));
    }
    if t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("horizons must be strictly decreasing"));
    }
    t_list
        .iter()
        .map(|&t| Ok(step(f, model, penalty, t)?.sup_distance(f)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gaussian_bump, tent, GridSpec};
    use crate::oracles::gaussian_smoothed_bump;

    fn spec() -> GridSpec {
        GridSpec::new(1, 8.0, 129).unwrap()
    }

    fn brownian() -> LevyModel {
        LevyModel::standard_brownian(1).unwrap()
    }

    fn ball(delta: f64) -> Penalty {
        Penalty::ball(2.0, delta).unwrap()
    }

    #[test]
    fn zero_function_is_a_fixed_point() {
        let f = GridFunction::zero(spec());
        let out = step(&f, &brownian(), &ball(1.0), 0.25).unwrap();
        assert_eq!(out.sup_norm(), 0.0);
    }

    #[test]
    fn zero_time_is_the_identity() {
        let f = tent(spec(), &[0.0], 2.0).unwrap();
        let out = step(&f, &brownian(), &ball(1.0), 0.0).unwrap();
        assert_eq!(out.sup_distance(&f), 0.0);
    }

    #[test]
    fn delta_zero_step_is_discrete_convolution() {
        let s = spec();
        let f = tent(s, &[0.0], 2.0).unwrap();
        let t = 0.25;
        let mu = increment_measure(&brownian(), t, &s).unwrap();
        let out = step_with_measure(&f, &mu, &ball(0.0), t).unwrap();
        for flat in (0..s.len()).step_by(7) {
            let x = s.position(flat);
            let direct: f64 = (0..mu.len())
                .map(|i| mu.weight(i) * f.value_at(&[x[0] + mu.atom(i)[0]]))
                .sum();
            assert!((out.value(flat) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_laws_on_a_fixed_pair() {
        let s = spec();
        let f = tent(s, &[-1.0], 2.0).unwrap();
        let g = gaussian_bump(s, &[1.0], 1.0).unwrap().f;
        let model = brownian();
        let pen = ball(1.0);
        let t = 0.25;
        let sf = step(&f, &model, &pen, t).unwrap();
        let sg = step(&g, &model, &pen, t).unwrap();
        // contraction
        assert!(sf.sup_distance(&sg) <= f.sup_distance(&g) + 1e-9);
        // monotonicity: f ≤ f + g (both presets are nonnegative)
        let fg = f.add(&g);
        let sfg = step(&fg, &model, &pen, t).unwrap();
        assert!(sf.max_excess_over(&sfg) <= 1e-9);
        // convexity
        for &alpha in &[0.25, 0.5, 0.75] {
            let mix = f.linear_mix(alpha, &g);
            let smix = step(&mix, &model, &pen, t).unwrap();
            let bound = sf.scale(alpha).add(&sg.scale(1.0 - alpha));
            assert!(smix.max_excess_over(&bound) <= 1e-9);
        }
        // ball case: positive homogeneity and subadditivity
        let alpha = 1.7;
        let sfa = step(&f.scale(alpha), &model, &pen, t).unwrap();
        assert!(sfa.sup_distance(&sf.scale(alpha)) <= 1e-9);
        assert!(sfg.max_excess_over(&sf.add(&sg)) <= 1e-9);
    }

    #[test]
    fn modulus_of_continuity_does_not_grow() {
        let s = spec();
        let f = tent(s, &[0.0], 2.0).unwrap();
        let out = step(&f, &brownian(), &ball(1.0), 0.25).unwrap();
        for ((lag_in, w_in), (lag_out, w_out)) in
            f.modulus_table().iter().zip(out.modulus_table())
        {
            assert_eq!(lag_in, lag_out);
            assert!(w_out <= &(w_in + 1e-9), "lag {lag_in}: {w_out} > {w_in}");
        }
    }

    #[test]
    fn sandwich_between_convolution_and_single_step() {
        let s = spec();
        let f = tent(s, &[0.0], 2.0).unwrap();
        let model = brownian();
        let pen = ball(1.0);
        let horizon = 0.5;
        let iter2 = iterate(&f, &model, &pen, &DyadicSchedule::new(2, horizon).unwrap()).unwrap();
        let conv = {
            let mu = increment_measure(&model, horizon, &s).unwrap();
            step_with_measure(&f, &mu, &ball(0.0), horizon).unwrap()
        };
        let single = step(&f, &model, &pen, horizon).unwrap();
        let tau = tau_disc(&f);
        assert!(conv.max_excess_over(&iter2) <= tau);
        assert!(iter2.max_excess_over(&single) <= tau);
    }

    #[test]
    fn level_zero_iterate_is_a_single_step() {
        let s = spec();
        let f = tent(s, &[0.0], 2.0).unwrap();
        let model = brownian();
        let pen = ball(1.0);
        let sched = DyadicSchedule::new(0, 1.0).unwrap();
        assert_eq!(sched.steps(), &[1.0]);
        let a = iterate(&f, &model, &pen, &sched).unwrap();
        let b = step(&f, &model, &pen, 1.0).unwrap();
        assert_eq!(a.sup_distance(&b), 0.0);
    }

    #[test]
    fn delta_zero_iterates_match_the_closed_form_convolution() {
        let s = GridSpec::new(1, 8.0, 257).unwrap();
        let bump = gaussian_bump(s, &[0.0], 1.5).unwrap();
        let model = brownian();
        let pen = ball(0.0);
        let horizon = 1.0;
        for level in [0u32, 2, 4] {
            let out =
                iterate(&bump.f, &model, &pen, &DyadicSchedule::new(level, horizon).unwrap())
                    .unwrap();
            let mut err = 0.0f64;
            for flat in 0..s.len() {
                let x = s.position(flat)[0];
                let exact = gaussian_smoothed_bump(x, 0.0, 1.5, 0.0, horizon);
                err = err.max((out.value(flat) - exact).abs());
            }
            assert!(err < 5.0 * s.spacing(), "level {level}: error {err}");
        }
    }

    #[test]
    fn schedules_are_dyadic_with_remainder_first() {
        let sched = DyadicSchedule::new(2, 1.0).unwrap();
        assert_eq!(sched.steps(), &[0.25; 4]);
        let sched = DyadicSchedule::new(1, 0.3).unwrap();
        assert_eq!(sched.steps(), &[0.3]);
        let sched = DyadicSchedule::new(1, 0.75).unwrap();
        assert_eq!(sched.steps(), &[0.25, 0.5]);
        assert!(DyadicSchedule::new(1, 0.0).is_err());
    }

    #[test]
    fn key_inequality_and_monotone_levels_within_tolerance() {
        let s = GridSpec::new(1, 8.0, 257).unwrap();
        let f = tent(s, &[0.0], 2.0).unwrap();
        let model = brownian();
        let pen = ball(1.0);
        let tau = tau_disc(&f);
        let v = check_key_inequality(&f, &model, &pen, 0.25, 0.5).unwrap();
        assert!(v <= tau, "key inequality violation {v} > {tau}");
        let levels = check_monotone_in_n(&f, &model, &pen, 0.5, 3).unwrap();
        for (k, v) in levels.iter().enumerate() {
            assert!(*v <= tau, "level {k}: violation {v} > {tau}");
        }
    }

    #[test]
    fn strong_continuity_decreases() {
        let s = spec();
        let f = tent(s, &[0.0], 2.0).unwrap();
        let ts: Vec<f64> = (2..=8).map(|k| 0.5f64.powi(k)).collect();
        let profile = strong_continuity_profile(&f, &brownian(), &ball(1.0), &ts).unwrap();
        for w in profile.windows(2) {
            assert!(w[1] <= w[0] * 1.1, "profile not decreasing: {w:?}");
        }
        assert!(profile.last().unwrap() < &0.2);
    }
}
