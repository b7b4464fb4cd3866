//! Scratch probe for calibrating experiment configurations.
//! Run with: cargo run -p robust-semigroup-cli --example probe -- <name>

use robust_semigroup::grid::{gaussian_bump, tent, GridFunction, GridSpec};
use robust_semigroup::measures::LevyModel;
use robust_semigroup::pde::{generator_limit_check, pde_solve, SchemeConfig};
use robust_semigroup::semigroup::{
    check_key_inequality, check_monotone_in_n, iterate, tau_disc, DyadicSchedule,
};
use robust_semigroup::transport::Penalty;
use std::time::Instant;

fn restrict(fine: &GridFunction, coarse: GridSpec) -> GridFunction {
    let values = (0..coarse.points_per_axis).map(|i| fine.value(2 * i)).collect();
    GridFunction::from_values(coarse, values).unwrap()
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "lemma".into());
    let model = LevyModel::standard_brownian(1).unwrap();
    match which.as_str() {
        "lemma" => {
            // key inequality + dyadic monotone violations at two resolutions
            for n in [513usize, 1025] {
                let spec = GridSpec::new(1, 8.0, n).unwrap();
                let f = tent(spec, &[0.0], 2.0).unwrap();
                let pen = Penalty::ball(2.0, 1.0).unwrap();
                let t0 = Instant::now();
                let key = check_key_inequality(&f, &model, &pen, 0.25, 0.5).unwrap();
                let mono = check_monotone_in_n(&f, &model, &pen, 1.0, 5).unwrap();
                println!(
                    "N={n}: tau={:.4e} key={:.4e} mono={:?} elapsed={:.1?}",
                    tau_disc(&f),
                    key,
                    mono.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>(),
                    t0.elapsed()
                );
            }
        }
        "genlimit" => {
            let spec = GridSpec::new(1, 8.0, 1025).unwrap();
            for width in [1.5f64, 2.0, 3.0] {
                let bump = gaussian_bump(spec, &[0.0], width).unwrap();
                let pen = Penalty::ball(2.0, 1.0).unwrap();
                let ts: Vec<f64> = (3..=9).map(|k| 0.5f64.powi(k)).collect();
                let t0 = Instant::now();
                let profile = generator_limit_check(&bump, &model, &pen, &ts, None).unwrap();
                println!(
                    "width={width}: profile={:?} elapsed={:.1?}",
                    profile.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>(),
                    t0.elapsed()
                );
            }
        }
        "cross" => {
            // gap to the scheme solution per level, for a named configuration
            let variant = std::env::args().nth(2).unwrap_or_else(|| "ball".into());
            let n = std::env::args()
                .nth(3)
                .and_then(|s| s.parse::<usize>().ok())
                .unwrap_or(1025);
            let spec = GridSpec::new(1, 8.0, n).unwrap();
            let (f, pen, m) = match variant.as_str() {
                "ball" => (
                    gaussian_bump(spec, &[0.0], 2.0).unwrap().f,
                    Penalty::ball(2.0, 1.0).unwrap(),
                    model.clone(),
                ),
                "power" => (
                    tent(spec, &[0.0], 0.25).unwrap(),
                    Penalty::power(2.0, 1.0, 4.0).unwrap(),
                    model.clone(),
                ),
                "powerbump" => (
                    gaussian_bump(spec, &[0.0], 2.0).unwrap().f,
                    Penalty::power(2.0, 1.0, 4.0).unwrap(),
                    model.clone(),
                ),
                "jumps" => {
                    let sizes = robust_semigroup::measures::DiscreteMeasure::new(
                        1,
                        vec![0.5, -0.5],
                        vec![0.5, 0.5],
                    )
                    .unwrap();
                    (
                        gaussian_bump(spec, &[0.0], 2.0).unwrap().f,
                        Penalty::ball(2.0, 1.0).unwrap(),
                        LevyModel::new(
                            1,
                            vec![0.0],
                            vec![1.0],
                            Some(robust_semigroup::measures::JumpSpec { intensity: 1.0, sizes }),
                        )
                        .unwrap(),
                    )
                }
                other => panic!("unknown variant {other}"),
            };
            let spec_pde = GridSpec::new(1, 8.0, 2 * n - 1).unwrap();
            let f_pde = match variant.as_str() {
                "power" => tent(spec_pde, &[0.0], 0.25).unwrap(),
                _ => gaussian_bump(spec_pde, &[0.0], 2.0).unwrap().f,
            };
            let t0 = Instant::now();
            let scheme = SchemeConfig::for_initial(spec_pde, m.clone(), pen.clone(), 1.0, &f_pde)
                .unwrap();
            let u = restrict(&pde_solve(&f_pde, &scheme).unwrap(), spec);
            println!("pde solved: dt={:e} steps={} in {:.1?}", scheme.dt, scheme.n_steps(), t0.elapsed());
            let mut prev: Option<GridFunction> = None;
            for level in 1..=6u32 {
                let t0 = Instant::now();
                let it = iterate(&f, &m, &pen, &DyadicSchedule::new(level, 1.0).unwrap()).unwrap();
                let gap = it.sup_distance(&u);
                let inter = prev.as_ref().map(|p| it.sup_distance(p)).unwrap_or(f64::NAN);
                println!(
                    "level {level}: gap_to_pde={gap:.4e} interlevel={inter:.4e} elapsed={:.1?}",
                    t0.elapsed()
                );
                prev = Some(it);
            }
        }
        "classical" => {
            let spec = GridSpec::new(1, 8.0, 1025).unwrap();
            let bump = gaussian_bump(spec, &[0.0], 2.0).unwrap();
            let pen = Penalty::ball(2.0, 0.0).unwrap();
            let exact = GridFunction::from_fn(spec, |p| {
                robust_semigroup::oracles::gaussian_smoothed_bump(p[0], 0.0, 2.0, 0.0, 1.0)
            })
            .unwrap();
            let t0 = Instant::now();
            for level in [1u32, 3, 6] {
                let it = iterate(&bump.f, &model, &pen, &DyadicSchedule::new(level, 1.0).unwrap())
                    .unwrap();
                println!("level {level}: err={:.4e}", it.sup_distance(&exact));
            }
            let scheme = SchemeConfig::for_initial(spec, model.clone(), pen, 1.0, &bump.f).unwrap();
            let u = pde_solve(&bump.f, &scheme).unwrap();
            println!("pde: err={:.4e} total elapsed={:.1?}", u.sup_distance(&exact), t0.elapsed());
        }
        "laws" => {
            use rand::Rng;
            use rand::SeedableRng;
            let spec = GridSpec::new(1, 8.0, 257).unwrap();
            let pen = Penalty::ball(2.0, 1.0).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            let t0 = Instant::now();
            let t_law = 1.0 / 16.0;
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..100 {
                let fa = GridFunction::from_values(
                    spec,
                    (0..spec.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                )
                .unwrap();
                let fb = GridFunction::from_values(
                    spec,
                    fa.values().iter().map(|a| a + rng.gen_range(0.0..1.0)).collect(),
                )
                .unwrap();
                let sa = robust_semigroup::semigroup::step(&fa, &model, &pen, t_law).unwrap();
                let sb = robust_semigroup::semigroup::step(&fb, &model, &pen, t_law).unwrap();
                worst = worst.max(sa.sup_distance(&sb) - fa.sup_distance(&fb));
                worst = worst.max(sa.max_excess_over(&sb));
                let mix = fa.linear_mix(0.5, &fb);
                let smix = robust_semigroup::semigroup::step(&mix, &model, &pen, t_law).unwrap();
                worst = worst.max(smix.max_excess_over(&sa.scale(0.5).add(&sb.scale(0.5))));
                let alpha = rng.gen_range(0.1..3.0f64);
                let salpha =
                    robust_semigroup::semigroup::step(&fa.scale(alpha), &model, &pen, t_law)
                        .unwrap();
                worst = worst.max(salpha.sup_distance(&sa.scale(alpha)));
            }
            println!("laws worst violation={worst:.3e} elapsed={:.1?}", t0.elapsed());
        }
        other => panic!("unknown probe {other}"),
    }
}
