use std::f64::consts::PI;

use serde::Serialize;

use super::{reconstruct, PhysicalWave};
use crate::error::Result;
use crate::strip::{node_derivs, StripProblem, WaveState};
use crate::sturm_liouville::fit_tail_slope;
use crate::vorticity::VorticityModel;

/// One numerical inequality. `margin` is the signed slack (positive when the
/// inequality holds) and the check passes when `margin >= -tolerance`; sign
/// conditions use zero tolerance and need `margin > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub formula: &'static str,
    pub pass: bool,
    pub margin: f64,
    pub tolerance: f64,
    /// Node `(i, j)` where the margin is attained.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<(usize, usize)>,
}

impl Check {
    fn slack(name: &'static str, formula: &'static str, margin: f64, tolerance: f64) -> Self {
        Self { name, formula, pass: margin >= -tolerance, margin, tolerance, node: None }
    }

    fn strict(name: &'static str, formula: &'static str, margin: f64) -> Self {
        Self { name, formula, pass: margin > 0.0, margin, tolerance: 0.0, node: None }
    }

    fn at(mut self, node: (usize, usize)) -> Self {
        self.node = Some(node);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub name: &'static str,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub trivial: bool,
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn skip(&mut self, name: &'static str, reason: impl Into<String>) {
        self.skipped.push(Skipped { name, reason: reason.into() });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Residual tolerance the state was solved to.
    pub solver_tol: f64,
    /// Overrides the norm bound `M` of the decay estimate.
    pub decay_m: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { solver_tol: 1e-10, decay_m: None }
    }
}

impl VerifyOptions {
    fn tol(&self, err: f64) -> f64 {
        (10.0 * self.solver_tol).max(10.0 * err)
    }
}

// min over the given nodes of f, with the arg-min
fn min_over(nodes: impl Iterator<Item = (usize, usize)>, f: impl Fn(usize, usize) -> f64) -> (f64, (usize, usize)) {
    nodes.fold((f64::INFINITY, (0, 0)), |best, (i, j)| {
        let v = f(i, j);
        if v < best.0 {
            (v, (i, j))
        } else {
            best
        }
    })
}

fn all_nodes(nq: usize, np: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..np).flat_map(move |j| (0..nq).map(move |i| (i, j)))
}

/// Sign pattern of a crest-centred wave on the half period: `w_q > 0` inside
/// and on the open surface segment, `w_qq > 0` down the trough line, `w_qq < 0`
/// down the crest line, and the same signs at the two surface corners.
/// A one-node collar along the bottom and the side lines is excluded.
pub fn verify_nodal(state: &WaveState) -> Report {
    let mut rep = Report::default();
    if state.is_trivial() {
        rep.trivial = true;
        rep.skip("nodal", "trivial state: sign conditions hold vacuously");
        return rep;
    }
    let st = state.to_half();
    let (nq, np) = (st.grid.nq, st.grid.np);
    let top = np - 1;
    let d = |i, j| node_derivs(&st, i, j);
    let inner = (2..=top).flat_map(|j| (1..nq - 1).map(move |i| (i, j)));
    let (m, at) = min_over(inner, |i, j| d(i, j).wq);
    rep.checks.push(Check::strict("w_q positive", "w_q > 0 for -L < q < 0, p > -P", m).at(at));
    let (m, at) = min_over((2..top).map(|j| (0, j)), |i, j| d(i, j).wqq);
    rep.checks.push(Check::strict("w_qq positive on trough line", "w_qq(-L, p) > 0", m).at(at));
    let (m, at) = min_over((2..top).map(|j| (nq - 1, j)), |i, j| -d(i, j).wqq);
    rep.checks.push(Check::strict("w_qq negative on crest line", "w_qq(0, p) < 0", m).at(at));
    rep.checks.push(Check::strict("w_qq at surface trough", "w_qq(-L, 0) > 0", d(0, top).wqq).at((0, top)));
    rep.checks.push(Check::strict("w_qq at surface crest", "w_qq(0, 0) < 0", -d(nq - 1, top).wqq).at((nq - 1, top)));
    let (crest, trough) = (st.at(nq - 1, top), st.at(0, top));
    let (m, at) = min_over((1..nq - 1).map(|i| (i, top)), |i, j| (crest - st.at(i, j)).min(st.at(i, j) - trough));
    rep.checks.push(Check::strict("surface ordering", "η(0) > η(x) > η(-L) for -L < x < 0", m).at(at));
    rep
}

/// Exponential decay estimate `|w_q| <= M (2 - e^{βq}) e^{σp}` and the observed tail rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// `K` with `|b₁|, |b₂| <= K M²`
    pub k: f64,
    pub m: f64,
    pub beta: f64,
    /// `None` when no positive σ exists
    pub sigma: Option<f64>,
    /// Least-squares rate of `max_q |w_q(·, p)|` over `window`.
    pub fitted_rate: Option<f64>,
    pub window: (f64, f64),
    /// `π / (L √λ)`
    pub linear_rate: f64,
    /// `(ε + π²/(L²λ))^{1/2}`, the rate of the regularized linear problem.
    pub regularized_rate: f64,
    pub report: Report,
}

impl DecayReport {
    pub fn degenerate(&self) -> bool {
        self.sigma.is_none()
    }
}

/// Largest σ with `2σ²(1+M²) + 2(β+1)σKM² - ½e^{-βL}KM² < 0`, by bisection.
fn decay_sigma(k: f64, m: f64, beta: f64, half_period: f64) -> Option<f64> {
    let km2 = k * m * m;
    let f = |s: f64| 2.0 * s * s * (1.0 + m * m) + 2.0 * (beta + 1.0) * s * km2 - 0.5 * (-beta * half_period).exp() * km2;
    if !(f(0.0) < 0.0) {
        return None;
    }
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    (lo > 0.0).then_some(lo)
}

pub fn verify_decay(problem: &StripProblem, state: &WaveState, opts: &VerifyOptions) -> Result<DecayReport> {
    let st = state.to_half();
    let grid = st.grid;
    let (nq, np) = (grid.nq, grid.np);
    let rows = problem.row_coeffs(st.lambda)?;
    let mut norm = 0.0f64;
    let mut bmax = 0.0f64;
    let mut tail = vec![0.0f64; np];
    for (i, j) in all_nodes(nq, np) {
        let d = node_derivs(&st, i, j);
        norm = [d.w, d.wq, d.wp, d.wqq, d.wpp, d.wpq].iter().fold(norm, |m, v| m.max(v.abs()));
        let r = rows[j];
        let h = r.ainv + d.wp;
        let b1 = -2.0 * d.wq * d.wpq + 3.0 * r.gamma * h * h;
        let b2 = 2.0 * d.wq * d.wpp - 2.0 * r.gamma * r.ainv3 * d.wq;
        bmax = bmax.max(b1.abs()).max(b2.abs());
        tail[j] = tail[j].max(d.wq.abs());
    }
    let m = opts.decay_m.unwrap_or(st.lambda.abs() + norm);
    let k = bmax / (m * m);
    let delta = problem.delta;
    let beta = (k * m * m / (2.0 * delta * delta)).max(1.0);
    let half_period = grid.half_period;
    let sigma = decay_sigma(k, m, beta, half_period);

    let mut report = Report { trivial: st.is_trivial(), ..Report::default() };
    let s = sigma.unwrap_or(0.0);
    let (margin, at) = min_over(all_nodes(nq, np), |i, j| {
        let q = grid.q(i);
        m * (2.0 - (beta * q).exp()) * (s * grid.p(j)).exp() - node_derivs(&st, i, j).wq.abs()
    });
    report.checks.push(Check::slack("decay envelope", "|w_q| <= M (2 - e^{βq}) e^{σp}", margin, opts.tol(0.0)).at(at));
    if sigma.is_none() {
        report.skip("decay rate", "no positive σ: envelope reduces to |w_q| <= M (2 - e^{βq})");
    }

    let depth = grid.depth;
    let window = (-0.7 * depth, -0.2 * depth);
    let p: Vec<f64> = (0..np).map(|j| grid.p(j)).collect();
    let fitted_rate = if report.trivial { None } else { fit_tail_slope(&p, &tail, window) };
    if let (Some(sig), Some(rate)) = (sigma, fitted_rate) {
        report.checks.push(Check::strict("tail rate exceeds σ", "fitted rate > σ", rate - sig));
    }
    let linear_rate = PI / (half_period * st.lambda.sqrt());
    Ok(DecayReport {
        k,
        m,
        beta,
        sigma,
        fitted_rate,
        window,
        linear_rate,
        regularized_rate: (st.epsilon + linear_rate * linear_rate).sqrt(),
        report,
    })
}

/// Surface Bernoulli identity `|∇ψ|² + 2gη = 0`.
pub fn verify_bernoulli(wave: &PhysicalWave, opts: &VerifyOptions) -> Check {
    let top = wave.top();
    let (worst, at) = min_over((0..wave.nq).map(|i| (i, top)), |i, j| {
        -(wave.speed2(i, j) + 2.0 * wave.g * wave.y[wave.idx(i, j)]).abs()
    });
    Check::slack("Bernoulli surface identity", "|∇ψ|² + 2gη = 0 on the surface", worst, 10.0 * opts.solver_tol).at(at)
}

/// Velocity sandwich `ψ_y²(crest) <= |∇ψ|² - 2Γ(-ψ) <= ψ_y²(trough)`, the crest
/// and trough speeds against λ, and absence of stagnation.
pub fn verify_velocity_bounds(wave: &PhysicalWave, opts: &VerifyOptions) -> Report {
    let mut rep = Report { trivial: wave.source.is_trivial(), ..Report::default() };
    let top = wave.top();
    let crest = wave.psi_y[wave.idx(wave.crest(), top)].powi(2);
    let trough = wave.psi_y[wave.idx(wave.trough(), top)].powi(2);
    let q = |i, j| wave.speed2(i, j) - 2.0 * wave.big_gamma[j];
    let tol = opts.tol(wave.error.speed2);
    let nodes = || all_nodes(wave.nq, wave.np);
    let (m, at) = min_over(nodes(), |i, j| q(i, j) - crest);
    rep.checks.push(Check::slack("velocity lower bound", "ψ_y²(0, η(0)) <= |∇ψ|² - 2Γ(-ψ)", m, tol).at(at));
    let (m, at) = min_over(nodes(), |i, j| trough - q(i, j));
    rep.checks.push(Check::slack("velocity upper bound", "|∇ψ|² - 2Γ(-ψ) <= ψ_y²(-L, η(-L))", m, tol).at(at));
    rep.checks.push(Check::slack("crest speed", "ψ_y²(0, η(0)) < λ", wave.lambda - crest, tol));
    rep.checks.push(Check::slack("trough speed", "ψ_y²(-L, η(-L)) > λ", trough - wave.lambda, tol));
    let (m, at) = min_over(nodes(), |i, j| -wave.psi_y[wave.idx(i, j)]);
    rep.checks.push(Check::strict("no stagnation", "ψ_y < 0", m).at(at));
    rep
}

fn sup_gamma(wave: &PhysicalWave) -> f64 {
    wave.gamma.iter().fold(0.0f64, |m, v| m.max(*v))
}

/// Pressure estimates on `B = ½|∇ψ|² + gy - Γ(-ψ)`, routed by the hypotheses
/// the vorticity satisfies, plus surface speed monotonicity when
/// `g + γ(ψ)ψ_y >= 0` holds at every node.
pub fn verify_pressure(wave: &PhysicalWave, model: &VorticityModel, opts: &VerifyOptions) -> Report {
    let mut rep = Report { trivial: wave.source.is_trivial(), ..Report::default() };
    let tol = opts.tol(0.5 * wave.error.speed2);
    let nodes = || all_nodes(wave.nq, wave.np);
    let b = |i, j| wave.bernoulli_function(i, j);
    let half_sup = 0.5 * sup_gamma(wave);
    let (m, at) = min_over(nodes(), |i, j| -(b(i, j) - half_sup * wave.psi(j)));
    rep.checks.push(Check::slack("pressure bound", "B - ½ max(0, sup γ) ψ <= 0", m, tol).at(at));

    let (cneg, at) = min_over(nodes(), |i, j| wave.g + wave.gamma[j] * wave.psi_y[wave.idx(i, j)]);
    if cneg >= 0.0 {
        let (m, at) = min_over(nodes(), |i, j| -b(i, j));
        rep.checks.push(Check::slack("negative B", "B <= 0", m, tol).at(at));
        let top = wave.top();
        let psi_y = |i| wave.psi_y[wave.idx(i, top)];
        let (lo, hi) = (psi_y(wave.trough()), psi_y(wave.crest()));
        let ptol = opts.tol(wave.error.psi_y);
        let surface = || (0..wave.nq).map(|i| (i, top));
        let (m, at) = min_over(surface(), |i, _| psi_y(i) - lo);
        rep.checks.push(Check::slack("surface speed lower", "ψ_y(-L, η(-L)) <= ψ_y(x, η(x))", m, ptol).at(at));
        let (m, at) = min_over(surface(), |i, _| hi - psi_y(i));
        rep.checks.push(Check::slack("surface speed upper", "ψ_y(x, η(x)) <= ψ_y(0, η(0))", m, ptol).at(at));
        rep.checks.push(Check::strict("crest speed sign", "ψ_y(0, η(0)) < 0", -hi));
    } else {
        rep.skip("negative B", format!("g + γ(ψ)ψ_y = {cneg:.3e} < 0 at node {at:?}"));
    }

    if model.sign_class().nonneg_nonincreasing {
        let (m, at) = min_over(nodes(), |i, j| -(b(i, j) + wave.big_gamma[j]));
        rep.checks.push(Check::slack("pressure bound, γ >= 0", "B + Γ(-ψ) <= 0", m, tol).at(at));
    } else {
        rep.skip("pressure bound, γ >= 0", "needs γ >= 0 and γ' <= 0");
    }
    rep
}

/// Amplitude–speed chain for `γ <= 0`:
/// `0 <= (2g)^{3/2}(|η(-L)|^{3/2} - |η(0)|^{3/2}) = |ψ_y(-L)|³ - |ψ_y(0)|³ <= cL`,
/// and the interior maximum bound `ψ_y <= ψ_y(0, η(0))` when also `γ' >= 0`.
pub fn verify_amplitude_speed(wave: &PhysicalWave, model: &VorticityModel, opts: &VerifyOptions) -> Report {
    let mut rep = Report { trivial: wave.source.is_trivial(), ..Report::default() };
    let class = model.sign_class();
    if !class.nonpositive {
        rep.skip("amplitude-speed chain", "needs γ <= 0");
        rep.skip("interior ψ_y maximum", "needs γ <= 0 and γ' >= 0");
        return rep;
    }
    let top = wave.top();
    let (eta_c, eta_t) = wave.crest_trough();
    let g2 = (2.0 * wave.g).powf(1.5);
    let left = g2 * (eta_t.abs().powf(1.5) - eta_c.abs().powf(1.5));
    let psi_c = wave.psi_y[wave.idx(wave.crest(), top)];
    let psi_t = wave.psi_y[wave.idx(wave.trough(), top)];
    let mid = psi_t.abs().powi(3) - psi_c.abs().powi(3);
    let cl = 3.0 * wave.g * wave.c * wave.source.grid.half_period;
    let eq_tol = 10.0 * opts.solver_tol * (1.0 + psi_t.abs().powi(3));
    rep.checks.push(Check::slack("amplitude nonnegative", "(2g)^{3/2}(|η(-L)|^{3/2} - |η(0)|^{3/2}) >= 0", left, eq_tol));
    rep.checks.push(Check::slack(
        "amplitude Bernoulli equality",
        "(2g)^{3/2}(|η(-L)|^{3/2} - |η(0)|^{3/2}) = |ψ_y(-L, η(-L))|³ - |ψ_y(0, η(0))|³",
        -(left - mid).abs(),
        eq_tol,
    ));
    rep.checks.push(Check::slack("amplitude below cL", "|ψ_y(-L, η(-L))|³ - |ψ_y(0, η(0))|³ <= 3g cL", cl - mid, eq_tol));

    if class.nonpos_nondecreasing {
        let tol = opts.tol(wave.error.psi_y);
        let nodes = || all_nodes(wave.nq, wave.np);
        let (m, at) = min_over(nodes(), |i, j| psi_c - wave.psi_y[wave.idx(i, j)]);
        rep.checks.push(Check::slack("interior ψ_y maximum", "ψ_y <= ψ_y(0, η(0))", m, tol).at(at));
    } else {
        rep.skip("interior ψ_y maximum", "needs γ' >= 0");
    }
    rep
}

/// Everything known about one solved state.
#[derive(Debug, Clone, Serialize)]
pub struct StateReport {
    pub lambda: f64,
    pub epsilon: f64,
    /// first-cosine surface coefficient
    pub s: f64,
    pub c: f64,
    pub eta_crest: f64,
    pub eta_trough: f64,
    pub min_rel_speed: f64,
    pub min_rel_speed_at: &'static str,
    pub bernoulli: Check,
    pub nodal: Report,
    pub velocity: Report,
    pub pressure: Report,
    pub amplitude_speed: Report,
    pub decay: DecayReport,
    pub passed: bool,
}

impl StateReport {
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        std::iter::once(&self.bernoulli).chain(
            [&self.nodal, &self.velocity, &self.pressure, &self.amplitude_speed, &self.decay.report]
                .into_iter()
                .flat_map(|r| r.checks.iter()),
        )
    }

    pub fn pass_count(&self) -> usize {
        self.checks().filter(|c| c.pass).count()
    }
}

/// Runs the full suite on one state.
pub fn verify_state(problem: &StripProblem, state: &WaveState, opts: &VerifyOptions) -> Result<StateReport> {
    let wave = reconstruct(problem, state)?;
    let (eta_crest, eta_trough) = wave.crest_trough();
    let (min_rel_speed, min_rel_speed_at) = wave.min_relative_speed();
    let mut out = StateReport {
        lambda: state.lambda,
        epsilon: state.epsilon,
        s: state.amplitude(),
        c: wave.c,
        eta_crest,
        eta_trough,
        min_rel_speed,
        min_rel_speed_at,
        bernoulli: verify_bernoulli(&wave, opts),
        nodal: verify_nodal(state),
        velocity: verify_velocity_bounds(&wave, opts),
        pressure: verify_pressure(&wave, &problem.model, opts),
        amplitude_speed: verify_amplitude_speed(&wave, &problem.model, opts),
        decay: verify_decay(problem, state, opts)?,
        passed: false,
    };
    let passed = out.checks().all(|c| c.pass);
    out.passed = passed;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strip::StripGrid;

    fn problem(model: VorticityModel) -> StripProblem {
        StripProblem::new(&model, 9.81, 1e-3, StripGrid::new(PI, 40.0, 33, 161).unwrap()).unwrap()
    }

    fn ansatz(pb: &StripProblem, s: f64) -> WaveState {
        let lam = 9.81;
        WaveState::from_fn(pb.grid, lam, 0.0, |q, p| s * (p / lam.sqrt()).exp() * q.cos())
    }

    #[test]
    fn nodal_trivial_is_vacuous() {
        let pb = problem(VorticityModel::zero());
        let rep = verify_nodal(&WaveState::trivial(pb.grid, 9.81, 0.0));
        assert!(rep.trivial && rep.passed() && rep.checks.is_empty() && rep.skipped.len() == 1);
    }

    #[test]
    fn nodal_ansatz_signs() {
        let pb = problem(VorticityModel::zero());
        let rep = verify_nodal(&ansatz(&pb, 0.01));
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        let flipped = verify_nodal(&ansatz(&pb, -0.01));
        assert!(!flipped.get("w_qq at surface crest").unwrap().pass);
        assert!(!flipped.get("w_q positive").unwrap().pass);
    }

    #[test]
    fn decay_degenerate_for_trivial_irrotational() {
        let pb = problem(VorticityModel::zero());
        let rep = verify_decay(&pb, &WaveState::trivial(pb.grid, 9.81, 0.0), &VerifyOptions::default()).unwrap();
        assert_eq!(rep.k, 0.0);
        assert!(rep.degenerate());
        assert!(rep.report.passed());
        assert!(rep.report.get("decay envelope").unwrap().margin >= 0.0);
    }

    #[test]
    fn decay_k_for_trivial_rotational() {
        let model = VorticityModel::exp_decay(0.5, 1.0).unwrap();
        let pb = problem(model);
        let rep = verify_decay(&pb, &WaveState::trivial(pb.grid, 9.81, 0.0), &VerifyOptions::default()).unwrap();
        // b₁ = 3γ a^{-2} is largest at the surface
        let expected = 3.0 * 0.5 / 9.81 / (9.81f64 * 9.81);
        assert!((rep.k - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn sigma_solves_the_quadratic() {
        let (k, m, beta, l) = (0.3, 2.0, 1.5, 1.0);
        let s = decay_sigma(k, m, beta, l).unwrap();
        let km2 = k * m * m;
        let f = |s: f64| 2.0 * s * s * (1.0 + m * m) + 2.0 * (beta + 1.0) * s * km2 - 0.5 * (-beta * l).exp() * km2;
        let a = 2.0 * (1.0 + m * m);
        let b = 2.0 * (beta + 1.0) * km2;
        let c = -0.5 * (-beta * l).exp() * km2;
        let root = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        assert!((s - root).abs() < 1e-12 * root);
        assert!(f(s) < 0.0);
        assert!(decay_sigma(0.0, m, beta, l).is_none());
    }

    #[test]
    fn trivial_velocity_equality_case() {
        for model in [VorticityModel::zero(), VorticityModel::gerstner(0.6).unwrap()] {
            let pb = problem(model.clone());
            let st = WaveState::trivial(pb.grid, 9.81, 0.0);
            let wave = reconstruct(&pb, &st).unwrap();
            let opts = VerifyOptions::default();
            let rep = verify_velocity_bounds(&wave, &opts);
            assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
            for name in ["velocity lower bound", "velocity upper bound", "crest speed", "trough speed"] {
                assert!(rep.get(name).unwrap().margin.abs() < 1e-12, "{name}");
            }
            assert!(verify_bernoulli(&wave, &opts).pass);
            let pr = verify_pressure(&wave, &model, &opts);
            assert!(pr.passed(), "{:?}", pr.failures().collect::<Vec<_>>());
            let amp = verify_amplitude_speed(&wave, &model, &opts);
            assert!(amp.passed());
            assert_eq!(amp.get("amplitude nonnegative").unwrap().margin, 0.0);
        }
    }

    #[test]
    fn positive_vorticity_routes_to_the_other_pressure_bound() {
        let model = VorticityModel::exp_decay(0.4, 1.0).unwrap();
        let pb = problem(model.clone());
        let wave = reconstruct(&pb, &WaveState::trivial(pb.grid, 9.81, 0.0)).unwrap();
        let opts = VerifyOptions::default();
        let pr = verify_pressure(&wave, &model, &opts);
        assert!(pr.get("pressure bound, γ >= 0").is_some());
        let amp = verify_amplitude_speed(&wave, &model, &opts);
        assert!(amp.checks.is_empty() && amp.skipped.len() == 2);
    }
}
