//! Property tests of structural invariants against independent computations.

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vorstokes::config::parse_config_str;
use vorstokes::nekrasov::{kernel, nu_bound_check};
use vorstokes::pipeline::random_direction;
use vorstokes::shear_flow::{wave_speed, ShearFlow};
use vorstokes::strip::{StripGrid, StripProblem, WaveState};
use vorstokes::vorticity::VorticityModel;

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

fn model_strategy() -> impl Strategy<Value = VorticityModel> {
    prop_oneof![
        Just(VorticityModel::zero()),
        (-1.5f64..1.5, 0.3f64..3.0).prop_map(|(a, r)| VorticityModel::exp_decay(a, r).unwrap()),
        (0.0f64..0.95).prop_map(|m| VorticityModel::gerstner(m).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn big_gamma_is_the_integral_of_gamma(model in model_strategy(), p in -8.0f64..-0.01) {
        let direct = simpson(|t| model.gamma(-t).unwrap(), 0.0, p, 2000);
        let closed = model.big_gamma(p).unwrap();
        prop_assert!((direct - closed).abs() <= 1e-9 * (1.0 + direct.abs()), "{direct} vs {closed}");
    }

    #[test]
    fn functionals_bracket_big_gamma(model in model_strategy(), p in -40.0f64..0.0) {
        let f = model.functionals().unwrap();
        let v = model.big_gamma(p).unwrap();
        prop_assert!(f.gamma_inf_bound - 1e-12 <= v && v <= f.gamma_sup_bound + 1e-12);
        prop_assert!(f.gamma_inf_bound <= 0.0 && f.gamma_sup_bound >= 0.0);
    }

    #[test]
    fn gerstner_vorticity_is_nonpositive_and_nondecreasing(m in 0.0f64..0.95, r in 0.0f64..30.0) {
        let model = VorticityModel::gerstner(m).unwrap();
        prop_assert!(model.gamma(r).unwrap() <= 0.0);
        let h = 1e-6;
        let fd = (model.gamma(r + h).unwrap() - model.gamma(r).unwrap()) / h;
        prop_assert!(model.gamma_prime(r).unwrap() >= -1e-12);
        prop_assert!((fd - model.gamma_prime(r).unwrap()).abs() <= 1e-4 * (1.0 + fd.abs()));
        prop_assert!(model.sign_class().nonpositive);
    }

    #[test]
    fn trivial_profile_integrates_the_inverse_coefficient(
        model in model_strategy(),
        extra in 0.5f64..20.0,
        p in -10.0f64..-0.05,
    ) {
        let floor = -2.0 * model.functionals().unwrap().gamma_inf_bound;
        let lambda = floor + extra;
        let flow = ShearFlow::new(&model, lambda).unwrap();
        let g = 9.81;
        let direct = simpson(|t| 1.0 / (lambda + 2.0 * model.big_gamma(t).unwrap()).sqrt(), 0.0, p, 2000) - lambda / (2.0 * g);
        let h = flow.h_trivial(p, g).unwrap();
        prop_assert!((h - direct).abs() <= 1e-9 * (1.0 + h.abs()), "{h} vs {direct}");
        prop_assert!((flow.h_trivial(0.0, g).unwrap() + lambda / (2.0 * g)).abs() < 1e-15);
        let c = wave_speed(lambda, &flow.functionals).unwrap();
        prop_assert!((c * c - lambda - 2.0 * flow.functionals.gamma_total).abs() <= 1e-12 * (1.0 + lambda));
    }

    #[test]
    fn trivial_state_solves_the_strip_problem(
        model in model_strategy(),
        extra in 0.5f64..30.0,
        eps in 0.0f64..0.5,
    ) {
        let floor = -2.0 * model.functionals().unwrap().gamma_inf_bound;
        let lambda = floor.max(0.0) + extra;
        let grid = StripGrid::new(PI, 20.0, 12, 40).unwrap();
        let pb = StripProblem::new(&model, 9.81, 1e-3, grid).unwrap();
        let r = pb.residual(&WaveState::trivial(grid, lambda, eps)).unwrap();
        prop_assert!(r.iter().all(|v| v.abs() <= 1e-13));
    }

    #[test]
    fn amplitude_reads_the_first_cosine_coefficient(a in -0.5f64..0.5, b in -0.5f64..0.5, k in 0.1f64..1.0) {
        let grid = StripGrid::new(PI, 10.0, 33, 16).unwrap();
        let st = WaveState::from_fn(grid, 9.81, 0.0, |q, p| (a * q.cos() + b * (2.0 * q).cos()) * (k * p).exp());
        prop_assert!((st.amplitude() - a).abs() < 1e-12);
    }

    #[test]
    fn half_and_full_grids_round_trip(seed in 0u64..1000) {
        let grid = StripGrid::new(PI, 10.0, 9, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dir = random_direction(&grid, &mut rng);
        let st = WaveState { lambda: 9.0, epsilon: 0.0, grid, w: dir };
        prop_assert_eq!(st.to_full().to_half().w, st.w.clone());
    }

    #[test]
    fn jacobian_matches_differences(seed in 0u64..1000, amp in 0.0f64..0.05, eps in 0.0f64..0.1) {
        let model = VorticityModel::exp_decay(-0.3, 1.0).unwrap();
        let grid = StripGrid::new(PI, 15.0, 12, 40).unwrap();
        let pb = StripProblem::new(&model, 9.81, 1e-3, grid).unwrap();
        let st = WaveState::from_fn(grid, 8.0, eps, |q, p| amp * q.cos() * (0.3 * p).exp() * (p + 15.0) / 15.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dir = random_direction(&grid, &mut rng);
        let e5 = pb.directional_error(&st, &dir, 1e-5).unwrap();
        let e4 = pb.directional_error(&st, &dir, 1e-4).unwrap();
        prop_assert!(e5 < 1e-4, "{e5}");
        prop_assert!(e5 <= 0.2 * e4 || e5 < 1e-9, "{e5} {e4}");
    }

    #[test]
    fn nekrasov_kernel_is_symmetric_and_positive(s in 0.01f64..3.13, t in 0.01f64..3.13) {
        prop_assume!((s - t).abs() > 1e-6);
        let (a, b) = (kernel(s, t).unwrap(), kernel(t, s).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!(a > 0.0);
    }

    #[test]
    fn nu_bound_ratio_is_nu_over_three(nu in 3.0f64..10.0, amp in 0.01f64..0.5) {
        let n = 64;
        let s: Vec<f64> = (0..=n).map(|i| i as f64 * PI / n as f64).collect();
        let theta: Vec<f64> = s.iter().map(|x| amp * x.sin()).collect();
        let b = nu_bound_check(nu, &s, &theta).unwrap();
        prop_assert!((b.ratio - nu / 3.0).abs() < 1e-12);
    }

    #[test]
    fn env_overrides_replace_file_values(g in 1.0f64..20.0, nq in 8usize..64) {
        let text = "g = 9.81\n[vorticity]\nkind = \"zero\"\n[grid]\nnq = 48\n";
        let env = [("VORSTOKES_G".to_string(), format!("{g:?}")), ("VORSTOKES_GRID__NQ".to_string(), nq.to_string())];
        let cfg = parse_config_str(text, env).unwrap();
        prop_assert_eq!(cfg.g, g);
        prop_assert_eq!(cfg.grid.nq, nq);
    }
}
