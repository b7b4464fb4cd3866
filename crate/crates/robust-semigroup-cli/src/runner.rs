//! Experiment runners: the convergence study and the property-check suite.

use crate::config::ExperimentConfig;
use crate::report::{
    checks_csv, converge_csv, grid_function_csv, write_file, CheckRow, ConvergeRow,
    ConvergenceReport,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust_semigroup::grid::{gaussian_bump, GridFunction, GridSpec};
use robust_semigroup::measures::{increment_measure, moment_p, DiscreteMeasure};
use robust_semigroup::oracles::robust_sup_ball_primal;
use robust_semigroup::pde::{generator_limit_check, pde_solve, SchemeConfig};
use robust_semigroup::semigroup::{
    check_key_inequality, check_monotone_in_n, iterate, step, strong_continuity_profile, tau_disc,
    DyadicSchedule,
};
use robust_semigroup::transport::robust_sup_ball;
use std::path::PathBuf;
use std::time::Instant;

pub struct ConvergeOutcome {
    pub report: ConvergenceReport,
    pub summary: String,
    pub pass: bool,
    pub csv_path: PathBuf,
}

/// Restrict a solution on the refined grid (`2N-1` points) to the base grid.
fn restrict_to_coarse(fine: &GridFunction, coarse: GridSpec) -> GridFunction {
    let nf = fine.spec().points_per_axis;
    let values = match coarse.dim {
        1 => (0..coarse.points_per_axis).map(|i| fine.value(2 * i)).collect(),
        _ => {
            let mut v = Vec::with_capacity(coarse.len());
            for i in 0..coarse.points_per_axis {
                for j in 0..coarse.points_per_axis {
                    v.push(fine.value(2 * i * nf + 2 * j));
                }
            }
            v
        }
    };
    GridFunction::from_values(coarse, values).expect("restriction preserves validity")
}

fn cfl_product(scheme: &SchemeConfig) -> f64 {
    let h = scheme.spec.spacing();
    let mut diffusion = scheme.model.trace();
    if scheme.spec.dim == 2 {
        diffusion += 2.0 * scheme.model.covariance(0, 1).abs();
    }
    let slope = scheme.penalty.conjugate_slope(scheme.gradient_bound);
    let lambda_j = scheme.model.jumps().map(|j| j.intensity).unwrap_or(0.0);
    scheme.dt * (diffusion / (h * h) + (scheme.model.drift_norm() + slope) / h + lambda_j)
}

/// Convergence study: dyadic iterates per level against the refined-grid
/// scheme solution, with the structural flags of the run.
pub fn run_converge(cfg: &ExperimentConfig) -> anyhow::Result<ConvergeOutcome> {
    let v = cfg.validate()?;
    let spec = v.spec;
    let f = v.initial;

    // surface the mass-leak check at the largest step size up front
    let coarsest = DyadicSchedule::new(cfg.levels.min, cfg.horizon)?;
    let max_step = coarsest.steps().iter().cloned().fold(0.0f64, f64::max);
    increment_measure(&v.model, max_step, &spec)?;

    // reference solution, one refinement level above the semigroup grid
    let spec_pde = GridSpec::new(spec.dim, spec.half_width, 2 * spec.points_per_axis - 1)?;
    let f_pde = cfg.initial.build_on(spec_pde, &spec)?;
    let scheme =
        SchemeConfig::for_initial(spec_pde, v.model.clone(), v.penalty.clone(), cfg.horizon, &f_pde)?;
    let cfl = cfl_product(&scheme);
    let u = restrict_to_coarse(&pde_solve(&f_pde, &scheme)?, spec);

    let mut rows = Vec::new();
    let mut prev: Option<GridFunction> = None;
    let mut monotone_violation = 0.0f64;
    for level in cfg.levels.min..=cfg.levels.max {
        let schedule = DyadicSchedule::new(level, cfg.horizon)?;
        let started = Instant::now();
        let iter_n = iterate(&f, &v.model, &v.penalty, &schedule)?;
        let runtime_ms = if cfg.stable_timing { 0 } else { started.elapsed().as_millis() };
        let interlevel_gap = prev.as_ref().map(|p| iter_n.sup_distance(p));
        if let Some(p) = &prev {
            monotone_violation = monotone_violation.max(iter_n.max_excess_over(p));
        }
        rows.push(ConvergeRow {
            level,
            n_steps: schedule.n_steps(),
            interlevel_gap,
            gap_to_pde: iter_n.sup_distance(&u),
            runtime_ms,
        });
        prev = Some(iter_n);
    }

    let tau = tau_disc(&f);
    let checks = vec![
        CheckRow::new("boundary", f.boundary_max(), crate::config::BOUNDARY_TOLERANCE),
        CheckRow::new("cfl", cfl, 0.9),
        CheckRow::new("dyadic_monotone", monotone_violation, tau),
    ];
    let report = ConvergenceReport { rows, checks };
    let pass = report.all_pass();
    let csv_path = write_file(&cfg.output_dir, "converge.csv", &converge_csv(&report.rows))?;
    let summary = format!(
        "converge levels={}..{} final_gap={:e} checks={} out={}",
        cfg.levels.min,
        cfg.levels.max,
        report.final_gap(),
        if pass { "PASS" } else { "FAIL" },
        csv_path.display()
    );
    Ok(ConvergeOutcome { report, summary, pass, csv_path })
}

pub struct ChecksOutcome {
    pub rows: Vec<CheckRow>,
    pub summary: String,
    pub pass: bool,
    pub csv_path: PathBuf,
}

fn random_grid_function(rng: &mut ChaCha8Rng, spec: GridSpec) -> GridFunction {
    let values: Vec<f64> = (0..spec.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::from_values(spec, values).expect("random values are finite")
}

/// The full invariant suite; failures are reported, never thrown.
pub fn run_checks(cfg: &ExperimentConfig) -> anyhow::Result<ChecksOutcome> {
    let v = cfg.validate()?;
    let spec = v.spec;
    let model = v.model;
    let penalty = v.penalty;
    let f = v.initial;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows: Vec<CheckRow> = Vec::new();

    // operator laws over random grid-function pairs at a short horizon
    let t_law = cfg.horizon / 16.0;
    let mut contraction = 0.0f64;
    let mut monotonicity = 0.0f64;
    let mut convexity = 0.0f64;
    let mut homogeneity = 0.0f64;
    let mut subadditivity = 0.0f64;
    for _ in 0..cfg.check_pairs {
        let fa = random_grid_function(&mut rng, spec);
        let bump_values: Vec<f64> =
            fa.values().iter().map(|a| a + rng.gen_range(0.0..1.0)).collect();
        let fb = GridFunction::from_values(spec, bump_values).expect("finite");
        let sa = step(&fa, &model, &penalty, t_law)?;
        let sb = step(&fb, &model, &penalty, t_law)?;
        contraction = contraction.max(sa.sup_distance(&sb) - fa.sup_distance(&fb));
        monotonicity = monotonicity.max(sa.max_excess_over(&sb));
        for &alpha in &[0.25, 0.5, 0.75] {
            let mix = fa.linear_mix(alpha, &fb);
            let smix = step(&mix, &model, &penalty, t_law)?;
            let bound = sa.scale(alpha).add(&sb.scale(1.0 - alpha));
            convexity = convexity.max(smix.max_excess_over(&bound));
        }
        if penalty.is_ball() {
            let alpha = rng.gen_range(0.1..3.0);
            let salpha = step(&fa.scale(alpha), &model, &penalty, t_law)?;
            homogeneity = homogeneity.max(salpha.sup_distance(&sa.scale(alpha)));
            let sum = fa.add(&fb);
            let ssum = step(&sum, &model, &penalty, t_law)?;
            subadditivity = subadditivity.max(ssum.max_excess_over(&sa.add(&sb)));
        }
    }
    rows.push(CheckRow::new("contraction", contraction, 1e-9));
    rows.push(CheckRow::new("monotonicity", monotonicity, 1e-9));
    rows.push(CheckRow::new("convexity", convexity, 1e-9));
    if penalty.is_ball() {
        rows.push(CheckRow::new("homogeneity", homogeneity, 1e-9));
        rows.push(CheckRow::new("subadditivity", subadditivity, 1e-9));
    }
    let zero = GridFunction::zero(spec);
    let szero = step(&zero, &model, &penalty, t_law)?;
    rows.push(CheckRow::new("normalization", szero.sup_norm(), 0.0));

    // lemma-style inequalities on the configured initial function
    let tau = tau_disc(&f);
    let key = check_key_inequality(&f, &model, &penalty, cfg.horizon / 4.0, cfg.horizon / 2.0)?;
    rows.push(CheckRow::new("key_inequality", key, tau));
    let level_violations =
        check_monotone_in_n(&f, &model, &penalty, cfg.horizon, cfg.levels.max)?;
    let monotone_n = level_violations.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    rows.push(CheckRow::new("monotone_in_n", monotone_n, tau));

    // strong continuity at zero
    let ts: Vec<f64> = (2..=8).map(|k| 0.5f64.powi(k)).collect();
    let profile = strong_continuity_profile(&f, &model, &penalty, &ts)?;
    let sc_violation = profile
        .windows(2)
        .map(|w| w[1] - 1.1 * w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    rows.push(CheckRow::new("strong_continuity", sc_violation, 0.0));

    // generator limit on a smooth bump with analytic gradient
    let smooth = cfg
        .initial
        .build_smooth(spec)
        .map(Ok)
        .unwrap_or_else(|| gaussian_bump(spec, &vec![0.0; spec.dim], spec.half_width / 4.0))?;
    let tgen: Vec<f64> = (3..=9).map(|k| 0.5f64.powi(k)).collect();
    let gen_profile = generator_limit_check(&smooth, &model, &penalty, &tgen, None)?;
    let floor = gen_profile.iter().cloned().fold(f64::INFINITY, f64::min);
    let argmin = gen_profile
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let pre_floor_increase = gen_profile[..=argmin]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    rows.push(CheckRow::new("generator_limit_floor", floor, 5e-2));
    rows.push(CheckRow::new("generator_limit_monotone", pre_floor_increase, 0.0));

    // tail bound of the produced increment laws
    let mut tail = f64::NEG_INFINITY;
    for &t in &[cfg.horizon, cfg.horizon / 2.0, cfg.horizon / 8.0] {
        let mu = increment_measure(&model, t, &spec)?;
        let mp = moment_p(&mu, penalty.order())?.powf(1.0 / penalty.order());
        for &c in &[0.25, 0.5, 1.0, 2.0, 4.0] {
            tail = tail.max(mu.tail_mass(c) - mp / c);
        }
    }
    rows.push(CheckRow::new("tail_bound", tail, 1e-12));

    // dual vs primal on small random instances
    let oracle_spec = GridSpec::new(1, 2.0, 65)?;
    let mut dual_primal = f64::NEG_INFINITY;
    for _ in 0..50 {
        let fr = random_grid_function(&mut rng, oracle_spec);
        let n_atoms = rng.gen_range(1..=4usize);
        let atoms: Vec<f64> = (0..n_atoms)
            .map(|_| oracle_spec.axis_coord(rng.gen_range(0..oracle_spec.points_per_axis)))
            .collect();
        let raw: Vec<f64> = (0..n_atoms).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu = DiscreteMeasure::new(1, atoms, weights)?;
        let radius = rng.gen_range(0.0..2.0);
        let x = [oracle_spec.axis_coord(rng.gen_range(0..oracle_spec.points_per_axis))];
        let dual = robust_sup_ball(&fr, &mu, radius, penalty.order(), &x)?;
        let primal = robust_sup_ball_primal(&fr, &mu, radius, penalty.order(), &x)?;
        dual_primal = dual_primal.max((dual - primal).abs());
    }
    rows.push(CheckRow::new("dual_primal", dual_primal, 1e-6));

    let pass = rows.iter().all(|r| r.pass);
    let csv_path = write_file(&cfg.output_dir, "checks.csv", &checks_csv(&rows))?;
    let failed: Vec<&str> =
        rows.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let summary = format!(
        "check {} of {} passed{} out={}",
        rows.iter().filter(|r| r.pass).count(),
        rows.len(),
        if failed.is_empty() { String::new() } else { format!(" failing=[{}]", failed.join(",")) },
        csv_path.display()
    );
    Ok(ChecksOutcome { rows, summary, pass, csv_path })
}

/// Solve the limiting equation on the configured grid and dump `u(T, ·)`.
pub fn run_pde(cfg: &ExperimentConfig) -> anyhow::Result<(GridFunction, PathBuf, String)> {
    let v = cfg.validate()?;
    let scheme =
        SchemeConfig::for_initial(v.spec, v.model.clone(), v.penalty.clone(), cfg.horizon, &v.initial)?;
    let u = pde_solve(&v.initial, &scheme)?;
    let path = write_file(&cfg.output_dir, "pde.csv", &grid_function_csv(&u))?;
    let summary = format!(
        "pde T={} dt={:e} steps={} sup={:e} out={}",
        cfg.horizon,
        scheme.dt,
        scheme.n_steps(),
        u.sup_norm(),
        path.display()
    );
    Ok((u, path, summary))
}

/// Apply a single robust step at the configured horizon and dump it.
pub fn run_step(cfg: &ExperimentConfig) -> anyhow::Result<(GridFunction, PathBuf, String)> {
    let v = cfg.validate()?;
    let out = step(&v.initial, &v.model, &v.penalty, cfg.horizon)?;
    let path = write_file(&cfg.output_dir, "step.csv", &grid_function_csv(&out))?;
    let summary = format!(
        "step t={} sup={:e} out={}",
        cfg.horizon,
        out.sup_norm(),
        path.display()
    );
    Ok((out, path, summary))
}
