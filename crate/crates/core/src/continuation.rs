//! Pseudo-arclength continuation of the nontrivial branch, termination
//! classification, and the ε → 0 homotopy at a fixed branch coordinate.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Clause, Error, Result};
use crate::strip::{ArclengthConstraint, NewtonOptions, StripGrid, StripProblem, WaveState};
use crate::sturm_liouville::{BifurcationPoint, SlProblem};

/// How a branch trace ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    Running,
    MaxSteps,
    /// The branch coordinate reached the requested target.
    TargetReached,
    LambdaBlowup,
    SupWBlowup,
    SupWpBlowup,
    LambdaFloor,
    StagnationClause,
    SurfaceClause,
}

impl From<Clause> for Termination {
    fn from(c: Clause) -> Self {
        match c {
            Clause::LambdaFloor => Termination::LambdaFloor,
            Clause::Stagnation => Termination::StagnationClause,
            Clause::Surface => Termination::SurfaceClause,
        }
    }
}

/// Surrogates for "unbounded in ℝ × X".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Caps {
    pub lambda_cap: f64,
    pub w_cap: f64,
    pub wp_cap: f64,
}

impl Caps {
    /// `λ_cap = 100 gL/π`, `w_cap = wp_cap = 10³`.
    pub fn standard(g: f64, half_period: f64) -> Self {
        Self { lambda_cap: 100.0 * g * half_period / PI, w_cap: 1e3, wp_cap: 1e3 }
    }
}

/// Maps a state to the first termination alternative it meets.
pub fn classify_termination(problem: &StripProblem, state: &WaveState, caps: &Caps) -> Termination {
    let grid = &problem.grid;
    let delta = problem.delta;
    if state.lambda >= caps.lambda_cap {
        return Termination::LambdaBlowup;
    }
    if state.sup_norm() >= caps.w_cap {
        return Termination::SupWBlowup;
    }
    let mut sup_wp = f64::NEG_INFINITY;
    let mut min_hp = f64::INFINITY;
    let rows = problem.row_coeffs(state.lambda);
    for j in 0..grid.np {
        for i in 0..grid.nq {
            let wp = problem.derivs(state, i, j).wp;
            sup_wp = sup_wp.max(wp);
            if let Ok(rows) = &rows {
                min_hp = min_hp.min(rows[j].ainv + wp);
            }
        }
    }
    if sup_wp >= caps.wp_cap {
        return Termination::SupWpBlowup;
    }
    if state.lambda + 2.0 * problem.functionals.gamma_inf_bound <= delta {
        return Termination::LambdaFloor;
    }
    if rows.is_err() || min_hp <= delta {
        return Termination::StagnationClause;
    }
    let cap = (2.0 * state.lambda - delta) / (4.0 * problem.g);
    let top = grid.np - 1;
    if (0..grid.nq).any(|i| state.at(i, top) >= cap) {
        return Termination::SurfaceClause;
    }
    Termination::Running
}

/// `λ = λ^ε`, `w = s Φ^ε(p) cos(πq/L)` on `grid`.
pub fn initial_nontrivial_guess(bp: &BifurcationPoint, grid: StripGrid, s: f64) -> WaveState {
    if s == 0.0 {
        return WaveState::trivial(grid, bp.lambda_star, bp.epsilon);
    }
    let l = grid.half_period;
    let phi: Vec<f64> = (0..grid.np).map(|j| bp.phi_at(grid.p(j))).collect();
    let mut st = WaveState::trivial(grid, bp.lambda_star, bp.epsilon);
    for j in 1..grid.np {
        for i in 0..grid.nq {
            st.w[grid.idx(i, j)] = s * phi[j] * (PI * grid.q(i) / l).cos();
        }
    }
    st
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationOptions {
    pub steps: usize,
    /// Initial arclength step.
    pub step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Amplitude of the first nontrivial point.
    pub s0: f64,
    /// Stop once `|s|` reaches this value.
    pub target_s: Option<f64>,
    pub newton: NewtonOptions,
    pub caps: Caps,
}

impl ContinuationOptions {
    pub fn new(g: f64, half_period: f64) -> Self {
        Self {
            steps: 30,
            step: 0.01,
            min_step: 1e-6,
            max_step: 0.05,
            s0: 0.01,
            target_s: None,
            newton: NewtonOptions { tol: 1e-10, max_iter: 12, max_halvings: 30 },
            caps: Caps::standard(g, half_period),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchPoint {
    pub state: WaveState,
    /// First surface cosine coefficient.
    pub s: f64,
    pub newton_iterations: usize,
    pub residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub epsilon: f64,
    pub lambda_star: f64,
    pub points: Vec<BranchPoint>,
    #[serde(skip)]
    pub tangents: Vec<(Vec<f64>, f64)>,
    pub termination: Termination,
    pub diagnostic: Option<String>,
}

impl Branch {
    pub fn last(&self) -> &WaveState {
        &self.points.last().expect("branch has a first point").state
    }
}

/// Unit tangent at the first point, oriented along the local mode with growing amplitude.
fn initial_tangent(problem: &StripProblem, state: &WaveState) -> Result<(Vec<f64>, f64)> {
    let n = state.w.len() as f64;
    let norm = (state.w.iter().map(|v| v * v).sum::<f64>() / n).sqrt().max(f64::MIN_POSITIVE);
    let dir: Vec<f64> = state.w.iter().map(|v| v / norm).collect();
    problem.tangent(state, (&dir, 0.0))
}

/// One corrected pseudo-arclength step from the last branch point; halves the
/// step until the corrector converges or the floor is reached.
pub fn arclength_step(
    problem: &StripProblem,
    branch: &Branch,
    step: f64,
    opts: &ContinuationOptions,
) -> Result<(BranchPoint, f64)> {
    let base = branch.last();
    let (tw, tl) = branch.tangents.last().ok_or_else(|| Error::Domain("branch has no tangent".into()))?;
    let mut ds = step;
    let mut last_err = Error::Divergence("no step attempted".into());
    while ds >= opts.min_step {
        let mut pred = base.clone();
        pred.w.iter_mut().zip(tw).for_each(|(w, t)| *w += ds * t);
        pred.lambda += ds * tl;
        for i in 0..problem.grid.nq {
            pred.w[i] = 0.0;
        }
        let cons = ArclengthConstraint { base: base.clone(), tangent_w: tw.clone(), tangent_lambda: *tl, step: ds };
        match problem.bordered_newton(&pred, &cons, opts.newton) {
            Ok(rep) if rep.state.sup_norm() < 1e-3 * base.sup_norm() => {
                last_err = Error::Divergence("corrector fell back onto the trivial branch".into());
            }
            Ok(rep) => {
                let s = rep.state.amplitude();
                return Ok((
                    BranchPoint { s, newton_iterations: rep.iterations, residual: rep.residual, step: ds, state: rep.state },
                    ds,
                ));
            }
            Err(e) => last_err = e,
        }
        ds *= 0.5;
    }
    Err(last_err)
}

/// Traces the branch emanating from `bp`.
pub fn continue_branch(problem: &StripProblem, bp: &BifurcationPoint, opts: &ContinuationOptions) -> Result<Branch> {
    let guess = initial_nontrivial_guess(bp, problem.grid, opts.s0);
    let first = problem.solve_at_amplitude(&guess, opts.s0, opts.newton)?;
    let tangent = initial_tangent(problem, &first.state)?;
    let mut branch = Branch {
        epsilon: bp.epsilon,
        lambda_star: bp.lambda_star,
        points: vec![BranchPoint {
            s: first.state.amplitude(),
            newton_iterations: first.iterations,
            residual: first.residual,
            step: 0.0,
            state: first.state,
        }],
        tangents: vec![tangent],
        termination: Termination::Running,
        diagnostic: None,
    };
    branch.termination = classify_termination(problem, branch.last(), &opts.caps);
    let mut ds = opts.step;
    while branch.termination == Termination::Running {
        if branch.points.len() > opts.steps {
            branch.termination = Termination::MaxSteps;
            break;
        }
        match arclength_step(problem, &branch, ds, opts) {
            Ok((pt, used)) => {
                let prev = branch.tangents.last().unwrap().clone();
                let tangent = problem.tangent(&pt.state, (&prev.0, prev.1))?;
                ds = if pt.newton_iterations <= 3 { (used * 1.5).min(opts.max_step) } else { used };
                branch.termination = classify_termination(problem, &pt.state, &opts.caps);
                if branch.termination == Termination::Running && opts.target_s.is_some_and(|t| pt.s.abs() >= t.abs()) {
                    branch.termination = Termination::TargetReached;
                }
                branch.points.push(pt);
                branch.tangents.push(tangent);
            }
            Err(Error::Admissibility { clause, i, j, value }) => {
                branch.termination = clause.into();
                branch.diagnostic = Some(format!("corrector left the admissible set at node ({i}, {j}), value {value:.3e}"));
            }
            Err(e) => {
                branch.termination = Termination::MaxSteps;
                branch.diagnostic = Some(format!("step floor reached: {e}"));
            }
        }
    }
    Ok(branch)
}

/// Solves along the local branch up to amplitude `target`, ramping `s`.
pub fn solve_to_amplitude(
    problem: &StripProblem,
    bp: &BifurcationPoint,
    target: f64,
    ramp: f64,
    opts: NewtonOptions,
) -> Result<(WaveState, usize)> {
    if target == 0.0 {
        return Ok((WaveState::trivial(problem.grid, bp.lambda_star, bp.epsilon), 0));
    }
    let sign = target.signum();
    let first = sign * target.abs().min(ramp);
    let rep = problem.solve_at_amplitude(&initial_nontrivial_guess(bp, problem.grid, first), first, opts)?;
    let mut state = rep.state;
    let mut s = first;
    let mut iterations = rep.iterations;
    while s.abs() < target.abs() {
        s = sign * (s.abs() + ramp).min(target.abs());
        let rep = problem.solve_at_amplitude(&state, s, opts)?;
        iterations = rep.iterations;
        state = rep.state;
    }
    Ok((state, iterations))
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotopyPoint {
    pub epsilon: f64,
    pub lambda_star: f64,
    pub lambda: f64,
    pub newton_iterations: usize,
    pub state: WaveState,
}

#[derive(Debug, Clone, Serialize)]
pub struct Homotopy {
    pub target_s: f64,
    pub points: Vec<HomotopyPoint>,
    /// `sup |w_{k+1} - w_k|`
    pub w_differences: Vec<f64>,
    /// `|λ_{k+1} - λ_k|`
    pub lambda_differences: Vec<f64>,
    /// Index into the schedule and message of the first failure, if any.
    pub failure: Option<(usize, String)>,
}

impl Homotopy {
    pub fn differences_decrease(&self) -> bool {
        self.w_differences.windows(2).all(|d| d[1] < d[0])
    }

    /// Observed convergence orders `log(Δ_k/Δ_{k+1}) / log(ε_k/ε_{k+1})` of λ.
    pub fn lambda_orders(&self) -> Vec<f64> {
        let eps: Vec<f64> = self.points.iter().map(|p| p.epsilon).collect();
        self.lambda_differences
            .windows(2)
            .enumerate()
            .map(|(k, d)| (d[0] / d[1]).ln() / (eps[k + 1] / eps[k + 2]).ln())
            .collect()
    }
}

/// Default schedule `0.1 · 2^{-k}`, `k = 0..n`.
pub fn geometric_schedule(first: f64, ratio: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| first * ratio.powi(k as i32)).collect()
}

/// For each ε in the decreasing `schedule`, solves at the fixed branch coordinate
/// `target_s`; the first ε starts from the local guess, later ones from the
/// previous solution.
pub fn epsilon_homotopy(
    problem: &StripProblem,
    schedule: &[f64],
    target_s: f64,
    sl_cells: usize,
    opts: NewtonOptions,
) -> Result<Homotopy> {
    if schedule.is_empty() || schedule[0] >= 1.0 || schedule.windows(2).any(|w| !(w[1] < w[0])) || schedule.iter().any(|e| *e < 0.0) {
        return Err(Error::Config("ε schedule must be strictly decreasing within [0, 1)".into()));
    }
    let mut out = Homotopy {
        target_s,
        points: Vec::new(),
        w_differences: Vec::new(),
        lambda_differences: Vec::new(),
        failure: None,
    };
    for (k, &eps) in schedule.iter().enumerate() {
        let sl = SlProblem::new(&problem.model, problem.g, problem.grid.half_period, eps)?.with_cells(sl_cells);
        let bp = match sl.find_bifurcation_point() {
            Ok(bp) => bp,
            Err(e) => {
                out.failure = Some((k, e.to_string()));
                break;
            }
        };
        let attempt = match out.points.last() {
            None => solve_to_amplitude(problem, &bp, target_s, 0.02, opts),
            Some(prev) if target_s == 0.0 => {
                let _ = prev;
                Ok((WaveState::trivial(problem.grid, bp.lambda_star, eps), 0))
            }
            Some(prev) => {
                let mut start = prev.state.clone();
                start.epsilon = eps;
                problem.solve_at_amplitude(&start, target_s, opts).map(|r| (r.state, r.iterations))
            }
        };
        match attempt {
            Ok((state, iterations)) => {
                if let Some(prev) = out.points.last() {
                    let dw = state.w.iter().zip(&prev.state.w).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    out.w_differences.push(dw);
                    out.lambda_differences.push((state.lambda - prev.lambda).abs());
                }
                out.points.push(HomotopyPoint { epsilon: eps, lambda_star: bp.lambda_star, lambda: state.lambda, newton_iterations: iterations, state });
            }
            Err(e) => {
                out.failure = Some((k, e.to_string()));
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vorticity::VorticityModel;

    fn setup(eps: f64, nq: usize, np: usize) -> (StripProblem, BifurcationPoint) {
        let model = VorticityModel::zero();
        let bp = SlProblem::new(&model, 9.81, PI, eps).unwrap().with_cells(1000).find_bifurcation_point().unwrap();
        let grid = StripGrid::new(PI, StripGrid::default_depth(PI, bp.lambda_star), nq, np).unwrap();
        (StripProblem::new(&model, 9.81, 1e-3, grid).unwrap(), bp)
    }

    #[test]
    fn guess_examples() {
        let (pb, bp) = setup(0.0, 16, 80);
        assert!(initial_nontrivial_guess(&bp, pb.grid, 0.0).is_trivial());
        let st = initial_nontrivial_guess(&bp, pb.grid, 0.01);
        let top = pb.grid.np - 1;
        for i in 0..pb.grid.nq {
            assert!((st.at(i, top) - 0.01 * pb.grid.q(i).cos()).abs() < 1e-12);
        }
        let k = 1.0 / 9.81f64.sqrt();
        let j = pb.grid.np - 11;
        let ratio = st.at(15, j) / st.at(15, top);
        assert!((ratio - (k * pb.grid.p(j)).exp()).abs() < 1e-4);
    }

    #[test]
    fn classification_examples() {
        let (pb, bp) = setup(0.0, 16, 80);
        let caps = Caps::standard(9.81, PI);
        let triv = WaveState::trivial(pb.grid, bp.lambda_star, 0.0);
        assert_eq!(classify_termination(&pb, &triv, &caps), Termination::Running);
        let at_cap = WaveState::trivial(pb.grid, caps.lambda_cap, 0.0);
        assert_eq!(classify_termination(&pb, &at_cap, &caps), Termination::LambdaBlowup);
        // surface row pulled down at the crest column so that h_p drops below δ there
        let mut stag = triv.clone();
        let top = pb.grid.np - 1;
        let dp = pb.grid.dp();
        let ainv = 1.0 / bp.lambda_star.sqrt();
        let crest = pb.grid.crest();
        stag.w[pb.grid.idx(crest, top)] = -(ainv - 5e-4) * 6.0 * dp / 11.0;
        assert_eq!(classify_termination(&pb, &stag, &caps), Termination::StagnationClause);
    }

    #[test]
    fn short_branch_is_supercritical_and_monotone() {
        let (pb, bp) = setup(0.01, 24, 100);
        let mut opts = ContinuationOptions::new(9.81, PI);
        opts.steps = 5;
        let br = continue_branch(&pb, &bp, &opts).unwrap();
        assert_eq!(br.termination, Termination::MaxSteps);
        let lams: Vec<f64> = br.points.iter().map(|p| p.state.lambda).collect();
        assert!(lams.windows(2).all(|w| w[1] > w[0]), "{lams:?}");
        let ss: Vec<f64> = br.points.iter().map(|p| p.s).collect();
        assert!(ss.windows(2).all(|w| w[1] > w[0]), "{ss:?}");
    }

    #[test]
    fn zero_target_homotopy_is_trivial() {
        let (pb, _) = setup(0.1, 12, 60);
        let h = epsilon_homotopy(&pb, &[0.1, 0.05, 0.025], 0.0, 500, NewtonOptions::default()).unwrap();
        assert!(h.failure.is_none());
        assert!(h.points.iter().all(|p| p.state.is_trivial() && p.lambda == p.lambda_star));
        assert!(h.w_differences.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn schedule_validation() {
        let (pb, _) = setup(0.1, 12, 60);
        assert!(epsilon_homotopy(&pb, &[0.05, 0.1], 0.01, 500, NewtonOptions::default()).is_err());
        assert_eq!(geometric_schedule(0.1, 0.5, 3), vec![0.1, 0.05, 0.025]);
    }
}
