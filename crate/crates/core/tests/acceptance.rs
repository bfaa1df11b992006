//! Acceptance suite. Runs without the libtest harness and prints one
//! `PASS`/`FAIL` line per criterion; exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vorstokes::config::{RunConfig, VorticityConfig, VorticityKindConfig};
use vorstokes::continuation::{epsilon_homotopy, initial_nontrivial_guess, solve_to_amplitude};
use vorstokes::nekrasov::{match_steepness, mean_on, scaled_profile, NekrasovOptions, NekrasovSolver};
use vorstokes::physics::{reconstruct, Check, StateReport};
use vorstokes::pipeline::{continue_and_verify, random_direction, BranchRun};
use vorstokes::strip::{CrestConstraint, NewtonOptions, StripGrid, StripProblem, WaveState};
use vorstokes::sturm_liouville::SlProblem;
use vorstokes::vorticity::VorticityModel;

const G: f64 = 9.81;
const L: f64 = PI;

struct Outcome {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: usize, title: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, title, pass, detail }
}

fn failed(id: usize, title: &'static str, err: impl std::fmt::Display) -> Outcome {
    outcome(id, title, false, format!("error: {err}"))
}

/// Independent root of `ελ³ + (π/L)²λ² = g²` by Newton's method from `λ = gL/π`.
fn cubic_root(eps: f64) -> f64 {
    let k2 = (PI / L).powi(2);
    let mut x = G / k2.sqrt();
    for _ in 0..100 {
        let f = eps * x * x * x + k2 * x * x - G * G;
        let df = 3.0 * eps * x * x + 2.0 * k2 * x;
        let dx = f / df;
        x -= dx;
        if dx.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

fn lambda_eps(eps: f64) -> vorstokes::Result<f64> {
    Ok(SlProblem::new(&VorticityModel::zero(), G, L, eps)?.find_bifurcation_point()?.lambda_star)
}

fn gerstner_config(m: f64) -> RunConfig {
    RunConfig::with_vorticity(VorticityConfig {
        kind: VorticityKindConfig::Gerstner,
        amplitude: None,
        rate: None,
        m: Some(m),
        knots: None,
        rho: None,
    })
}

fn criterion_1() -> Outcome {
    let title = "irrotational bifurcation point";
    let t = Instant::now();
    let lam = match lambda_eps(0.0) {
        Ok(v) => v,
        Err(e) => return failed(1, title, e),
    };
    let elapsed = t.elapsed();
    let exact = G * L / PI;
    let rel = (lam - exact).abs() / exact;
    outcome(
        1,
        title,
        rel < 1e-6 && elapsed < Duration::from_secs(1),
        format!("λ⁰ = {lam:.10}, gL/π = {exact}, rel {rel:.2e}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let title = "regularized bifurcation point and O(ε) convergence";
    let eps: Vec<f64> = (0..5).map(|k| 0.1 * 0.5f64.powi(k)).collect();
    let run = || -> vorstokes::Result<(f64, f64, Vec<f64>, f64)> {
        let l1 = lambda_eps(0.01)?;
        let l0 = lambda_eps(0.0)?;
        let d = eps.iter().map(|e| lambda_eps(*e).map(|l| (l0 - l).abs())).collect::<vorstokes::Result<Vec<_>>>()?;
        Ok((l1, l0, d, cubic_root(0.01)))
    };
    let (l1, _l0, d, root) = match run() {
        Ok(v) => v,
        Err(e) => return failed(2, title, e),
    };
    let rel = (l1 - root).abs() / root;
    // λ⁰ - λ^ε <= g²ε/2 for L = π: from λ = g/√(1+ελ) and 1 - (1+x)^{-1/2} <= x/2
    let bound_ok = d.iter().zip(&eps).all(|(d, e)| *d <= 0.5 * G * G * e);
    let local: Vec<f64> = d.windows(2).map(|w| (w[0] / w[1]).ln() / 2f64.ln()).collect();
    let rising = local.windows(2).all(|w| w[1] > w[0]);
    let (xs, ys): (Vec<f64>, Vec<f64>) = eps.iter().zip(&d).map(|(e, d)| (e.ln(), d.ln())).unzip();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum::<f64>()
        / xs.iter().map(|x| (x - xm).powi(2)).sum::<f64>();
    outcome(
        2,
        title,
        rel < 1e-6 && bound_ok && rising,
        format!(
            "λ^0.01 = {l1:.9} vs cubic root {root:.9} (rel {rel:.2e}); |λ^ε-λ⁰| <= g²ε/2: {bound_ok}; \
             local orders {local:.3?} rising: {rising}; least-squares slope {slope:.3}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let title = "trivial branch is exact";
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut kinds = Vec::new();
    for k in 0..5 {
        let model = match k % 3 {
            0 => VorticityModel::exp_decay(rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0)),
            1 => VorticityModel::gerstner(rng.random_range(0.1..0.9)),
            _ => Ok(VorticityModel::zero()),
        };
        let model = match model {
            Ok(m) => m,
            Err(e) => return failed(3, title, e),
        };
        let run = || -> vorstokes::Result<f64> {
            let floor = -2.0 * model.functionals()?.gamma_inf_bound;
            let lambda = floor.max(0.0) + rng.clone().random_range(1.0..20.0);
            let eps = 0.05 * (k as f64 + 1.0) / 5.0;
            let grid = StripGrid::new(L, StripGrid::default_depth(L, lambda), 24, 120)?;
            let pb = StripProblem::new(&model, G, 1e-3, grid)?;
            let r = pb.residual(&WaveState::trivial(grid, lambda, eps))?;
            Ok(r.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        };
        match run() {
            Ok(v) => worst = worst.max(v),
            Err(e) => return failed(3, title, e),
        }
        rng.random::<u64>();
        kinds.push(model.name());
    }
    outcome(3, title, worst <= 1e-13, format!("max nodal residual {worst:.2e} over {kinds:?}"))
}

/// Crest-anchored solve `w(0,0) = s`; returns the surface cosine amplitude and solve time.
fn crest_solve(pb: &StripProblem, bp: &vorstokes::sturm_liouville::BifurcationPoint, s: f64) -> vorstokes::Result<(f64, Duration)> {
    let t = Instant::now();
    let seed = initial_nontrivial_guess(bp, pb.grid, s);
    let rep = pb.bordered_newton(&seed, &CrestConstraint { target: s }, NewtonOptions::default())?;
    if rep.state.is_trivial() {
        return Err(vorstokes::Error::Divergence("collapsed to the trivial state".into()));
    }
    Ok((rep.state.amplitude(), t.elapsed()))
}

fn criterion_4() -> Outcome {
    let title = "local bifurcation theory";
    let run = || -> vorstokes::Result<String> {
        let bp = SlProblem::new(&VorticityModel::zero(), G, L, 0.01)?.find_bifurcation_point()?;
        let grid = StripGrid::new(L, StripGrid::default_depth(L, bp.lambda_star), 64, 200)?;
        let pb = StripProblem::new(&VorticityModel::zero(), G, 1e-3, grid)?;
        let s = 0.01;
        let phi0 = bp.phi_at(0.0);
        let (a1, t1) = crest_solve(&pb, &bp, s)?;
        let (a2, t2) = crest_solve(&pb, &bp, s / 2.0)?;
        let dev1 = (a1 - s * phi0).abs();
        let dev2 = (a2 - 0.5 * s * phi0).abs();
        let ratio = dev1 / dev2;
        let pass = dev1 <= 0.2 * s * phi0.abs() && (3.0..=5.0).contains(&ratio) && t1.max(t2) < Duration::from_secs(30);
        let msg = format!(
            "amplitude {a1:.6e} vs sΦ(0) = {:.6e} (rel dev {:.2e}); deviation ratio under halving {ratio:.3}; solves {t1:.2?}, {t2:.2?}",
            s * phi0,
            dev1 / (s * phi0).abs()
        );
        if pass {
            Ok(msg)
        } else {
            Err(vorstokes::Error::Divergence(msg))
        }
    };
    match run() {
        Ok(msg) => outcome(4, title, true, msg),
        Err(e) => failed(4, title, e),
    }
}

fn violations<'a>(reports: impl Iterator<Item = &'a StateReport>, pick: fn(&'a StateReport) -> Vec<&'a Check>) -> (usize, usize, Vec<String>) {
    let mut total = 0;
    let mut bad = 0;
    let mut names = Vec::new();
    for (k, r) in reports.enumerate() {
        for c in pick(r) {
            total += 1;
            if !c.pass {
                bad += 1;
                if names.len() < 5 {
                    names.push(format!("point {k}: {} (margin {:.2e})", c.name, c.margin));
                }
            }
        }
    }
    (total, bad, names)
}

fn criterion_5(runs: &[(&str, &BranchRun)]) -> Outcome {
    let title = "nodal properties along two 30-step branches";
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in runs {
        let (total, bad, names) = violations(run.verification.iter().map(|v| &v.report), |r| r.nodal.checks.iter().collect());
        let steps = run.branch.points.len() - 1;
        pass &= bad == 0 && steps == 30;
        parts.push(format!("{name}: {steps} steps, {total} checks, {bad} violations {names:?}"));
    }
    outcome(5, title, pass, parts.join("; "))
}

fn criterion_6(runs: &[(&str, &BranchRun)]) -> Outcome {
    let title = "physical bounds along two 30-step branches";
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in runs {
        let (total, bad, names) = violations(run.verification.iter().map(|v| &v.report), |r| {
            std::iter::once(&r.bernoulli)
                .chain(&r.velocity.checks)
                .chain(&r.pressure.checks)
                .chain(&r.amplitude_speed.checks)
                .collect()
        });
        let gated = run.verification.iter().all(|v| !v.report.pressure.checks.is_empty() && !v.report.amplitude_speed.checks.is_empty());
        pass &= bad == 0 && gated;
        parts.push(format!("{name}: {total} checks, {bad} violations {names:?}, sign-gated suites engaged: {gated}"));
    }
    outcome(6, title, pass, parts.join("; "))
}

fn criterion_7(run: &BranchRun) -> Outcome {
    let title = "exponential decay in depth";
    let mut worst = 0.0f64;
    let mut sigma_ok = true;
    let mut nondegenerate = 0;
    let mut missing = 0;
    for v in &run.verification {
        let d = &v.report.decay;
        match d.fitted_rate {
            Some(rate) => {
                worst = worst.max((rate - d.linear_rate).abs() / d.linear_rate);
                if let Some(sigma) = d.sigma {
                    nondegenerate += 1;
                    sigma_ok &= rate > sigma;
                }
            }
            None => missing += 1,
        }
    }
    outcome(
        7,
        title,
        missing == 0 && worst < 0.1 && sigma_ok,
        format!(
            "worst |fitted - π/(L√λ)|/(π/(L√λ)) = {worst:.3e} over {} points; nondegenerate σ at {nondegenerate} points, rate > σ: {sigma_ok}",
            run.verification.len()
        ),
    )
}

fn criterion_8(cfg: &RunConfig, run: &BranchRun) -> Outcome {
    let title = "Jacobian directional differences";
    let pts = &run.branch.points;
    let picks: Vec<usize> = (0..5).map(|k| k * (pts.len() - 1) / 4).collect();
    let problem = match cfg.strip_problem(run.branch.lambda_star) {
        Ok(p) => p,
        Err(e) => return failed(8, title, e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for &k in &picks {
        let st = &pts[k].state;
        for _ in 0..10 {
            let dir = random_direction(&problem.grid, &mut rng);
            let e = |t: f64| problem.directional_error(st, &dir, t);
            match (e(1e-5), e(1e-4)) {
                (Ok(a), Ok(b)) => {
                    worst = worst.max(a);
                    worst_ratio = worst_ratio.max(a / b);
                }
                (Err(e), _) | (_, Err(e)) => return failed(8, title, e),
            }
        }
    }
    // first order: the error shrinks tenfold with t
    outcome(
        8,
        title,
        worst < 1e-4 && worst_ratio < 0.2,
        format!("points {picks:?}, worst error at t=1e-5 {worst:.2e}, worst e(1e-5)/e(1e-4) {worst_ratio:.3}"),
    )
}

fn criterion_9(cfg: &RunConfig) -> Outcome {
    let title = "ε-homotopy differences decrease";
    let run = || -> vorstokes::Result<String> {
        let last = *cfg.epsilon_schedule.last().unwrap();
        let bp = SlProblem::new(&VorticityModel::zero(), G, L, last)?.with_cells(cfg.grid.sl_cells).find_bifurcation_point()?;
        let pb = cfg.strip_problem(bp.lambda_star)?;
        let h = epsilon_homotopy(&pb, &cfg.epsilon_schedule, 0.02, cfg.grid.sl_cells, cfg.newton())?;
        if let Some((k, msg)) = h.failure {
            return Err(vorstokes::Error::Divergence(format!("schedule entry {k}: {msg}")));
        }
        let dw = &h.w_differences;
        let ok = dw.len() + 1 == cfg.epsilon_schedule.len() && dw.windows(2).all(|w| w[1] < w[0]);
        let shown: Vec<String> = dw.iter().map(|v| format!("{v:.3e}")).collect();
        let msg = format!("ε {:?}, sup|w_k+1 - w_k| {shown:?}", cfg.epsilon_schedule);
        if ok {
            Ok(msg)
        } else {
            Err(vorstokes::Error::Divergence(msg))
        }
    };
    match run() {
        Ok(m) => outcome(9, title, true, m),
        Err(e) => failed(9, title, e),
    }
}

fn criterion_10() -> Outcome {
    let title = "cross-check against the Nekrasov equation";
    let t = Instant::now();
    let run = || -> vorstokes::Result<(String, bool)> {
        let model = VorticityModel::zero();
        let bp = SlProblem::new(&model, G, L, 0.01)?.find_bifurcation_point()?;
        let grid = StripGrid::new(L, StripGrid::default_depth(L, bp.lambda_star), 64, 200)?;
        let pb = StripProblem::new(&model, G, 1e-3, grid)?;
        let (st, _) = solve_to_amplitude(&pb, &bp, 0.02, 0.02, NewtonOptions::default())?;
        let wave = reconstruct(&pb, &st)?;
        let (xs, ys): (Vec<f64>, Vec<f64>) = wave.eta.iter().copied().filter(|(x, _)| *x <= 1e-12).unzip();
        let mean = mean_on(&xs, &ys);
        let steep = (ys[ys.len() - 1] - ys[0]) / L;
        let solver = NekrasovSolver::new(256)?;
        let opts = NekrasovOptions::default();
        let nk = match_steepness(&solver, steep, 8.0, &opts)?;
        let prof = scaled_profile(&nk, L)?;
        let mut diff = 0.0f64;
        let mut sup = 0.0f64;
        for (x, y) in xs.iter().zip(&ys) {
            diff = diff.max((y - mean - prof.eval(*x)).abs());
            sup = sup.max((y - mean).abs());
        }
        let rel = diff / sup;
        let mut ratios = vec![nk.nu_bound().map(|b| b.ratio).unwrap_or(f64::NAN)];
        let mut start: Vec<f64> = nk.theta.clone();
        for nu in [3.5, 4.0, 5.0, 6.0] {
            let s = solver.solve(nu, &start, &opts)?;
            ratios.push(s.nu_bound().map(|b| b.ratio).unwrap_or(f64::NAN));
            start = s.theta;
        }
        let ratios_ok = ratios.iter().all(|r| *r > 1.0);
        Ok((format!("profile rel sup diff {rel:.3e} at steepness {steep:.3e} (ν = {:.4}); ν-ratios {ratios:.3?}", nk.nu), rel <= 0.02 && ratios_ok))
    };
    match run() {
        Ok((msg, ok)) => {
            let el = t.elapsed();
            outcome(10, title, ok && el < Duration::from_secs(10), format!("{msg}; {el:.2?}"))
        }
        Err(e) => failed(10, title, e),
    }
}

fn criterion_11(cfg: &RunConfig) -> Outcome {
    let title = "grid robustness";
    let s = 0.1;
    let run = || -> vorstokes::Result<(String, f64)> {
        let bp = SlProblem::new(&VorticityModel::zero(), G, L, cfg.epsilon)?.find_bifurcation_point()?;
        let base = cfg.strip_grid(bp.lambda_star)?;
        let fine = StripGrid::new(L, 1.5 * base.depth, 2 * base.nq, 2 * base.np)?;
        let solve = |grid: StripGrid| -> vorstokes::Result<f64> {
            let pb = StripProblem::new(&VorticityModel::zero(), G, cfg.delta, grid)?;
            Ok(solve_to_amplitude(&pb, &bp, s, 0.02, NewtonOptions::default())?.0.lambda)
        };
        let (a, b) = rayon::join(|| solve(base), || solve(fine));
        let (a, b) = (a?, b?);
        let rel = (a - b).abs() / b;
        Ok((
            format!(
                "λ at s = {s}: {a:.8} ({}×{}, P = {:.1}) vs {b:.8} ({}×{}, P = {:.1}), rel {rel:.2e}",
                base.nq, base.np, base.depth, fine.nq, fine.np, fine.depth
            ),
            rel,
        ))
    };
    match run() {
        Ok((msg, rel)) => outcome(11, title, rel < 1e-3, msg),
        Err(e) => failed(11, title, e),
    }
}

fn main() -> ExitCode {
    // libtest flags such as `--nocapture` are accepted and ignored
    let zero = RunConfig::zero_vorticity();
    let gerstner = gerstner_config(0.5);
    // timed criteria run alone
    let mut early = vec![criterion_1(), criterion_10()];
    early.extend([criterion_2(), criterion_3(), criterion_4(), criterion_9(&zero), criterion_11(&zero)]);
    let branches = rayon::join(|| continue_and_verify(&zero, zero.epsilon, 0), || continue_and_verify(&gerstner, gerstner.epsilon, 0));
    let mut out = Vec::new();
    match branches {
        (Ok(z), Ok(gs)) => {
            let runs = [("γ = 0", &z), ("Gerstner m = 0.5", &gs)];
            out.push(criterion_5(&runs));
            out.push(criterion_6(&runs));
            out.push(criterion_7(&z));
            out.push(criterion_8(&zero, &z));
        }
        (z, gs) => {
            let msg = format!("{:?} / {:?}", z.err(), gs.err());
            for (id, title) in [(5, "nodal properties"), (6, "physical bounds"), (7, "decay"), (8, "Jacobian")] {
                out.push(failed(id, title, &msg));
            }
        }
    }
    out.append(&mut early);
    out.sort_by_key(|o| o.id);
    let mut all = true;
    for o in &out {
        all &= o.pass;
        println!("criterion {:>2} {} {}: {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.title, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", out.iter().filter(|o| o.pass).count(), out.len());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
