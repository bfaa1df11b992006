//! Run orchestration behind the command line: one function per subcommand and
//! the full `bifurcate → continue → verify → homotopy` pipeline, writing JSON
//! for structured data and CSV for tables into one directory per run.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::continuation::{classify_termination, continue_branch, epsilon_homotopy, Branch, ContinuationOptions, Termination};
use crate::error::{Error, Result};
use crate::nekrasov::{solve_nekrasov, NekrasovState};
use crate::physics::{reconstruct, verify_state, Check, PhysicalWave, StateReport};
use crate::shear_flow::{ShearFlow, TrivialSample};
use crate::strip::{StripGrid, StripProblem, WaveState};
use crate::sturm_liouville::{eigenfunction_decay_rate, BifurcationPoint, SlProblem};

/// Relative error allowed in the directional Jacobian check at `t = 1e-5`.
pub const JACOBIAN_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct TrivialReport {
    pub lambda: f64,
    pub c: f64,
    /// Flat surface elevation `-λ/2g`.
    pub eta: f64,
    pub samples: Vec<TrivialSample>,
}

/// Shear flow at `lambda` sampled on `n` levels of `[-P, 0]`.
pub fn trivial(cfg: &RunConfig, lambda: f64, n: usize) -> Result<TrivialReport> {
    let flow = ShearFlow::new(&cfg.model()?, lambda).map_err(|e| e.in_module("shear_flow"))?;
    let depth = cfg.strip_grid(lambda)?.depth;
    let n = n.max(2);
    let samples = (0..n)
        .map(|k| flow.sample(-depth * (n - 1 - k) as f64 / (n - 1) as f64, cfg.g))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_module("shear_flow"))?;
    Ok(TrivialReport { lambda, c: flow.c, eta: -lambda / (2.0 * cfg.g), samples })
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationReport {
    pub epsilon: f64,
    pub lambda_star: f64,
    pub mu: f64,
    /// Guaranteed lower bound on the eigenfunction decay rate.
    pub decay_rate: f64,
    /// `[p, Φ(p)]` pairs.
    pub phi: Vec<[f64; 2]>,
}

pub fn bifurcation_point(cfg: &RunConfig, epsilon: f64) -> Result<BifurcationPoint> {
    SlProblem::new(&cfg.model()?, cfg.g, cfg.half_period, epsilon)
        .map(|p| p.with_cells(cfg.grid.sl_cells))
        .and_then(|p| p.find_bifurcation_point())
        .map_err(|e| e.in_module("bifurcation_sl"))
}

pub fn bifurcate(cfg: &RunConfig, epsilon: f64) -> Result<BifurcationReport> {
    let bp = bifurcation_point(cfg, epsilon)?;
    let functionals = cfg.model()?.functionals()?;
    Ok(BifurcationReport {
        epsilon,
        lambda_star: bp.lambda_star,
        mu: bp.mu,
        decay_rate: eigenfunction_decay_rate(bp.lambda_star, &functionals),
        phi: bp.p.iter().zip(&bp.phi).map(|(p, v)| [*p, *v]).collect(),
    })
}

/// One row of the branch table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRecord {
    pub s: f64,
    pub lambda: f64,
    pub c: f64,
    pub eta_crest: f64,
    pub eta_trough: f64,
    pub min_rel_speed: f64,
    pub verify_pass_count: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointVerification {
    pub report: StateReport,
    pub jacobian: Check,
}

impl PointVerification {
    pub fn passed(&self) -> bool {
        self.report.passed && self.jacobian.pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRun {
    pub branch: Branch,
    pub verification: Vec<PointVerification>,
    pub records: Vec<BranchRecord>,
    /// Worst `|c² - (λ + 2Γ_∞)|` over the rows.
    pub speed_identity_error: f64,
}

impl BranchRun {
    pub fn passed(&self) -> bool {
        self.verification.iter().all(PointVerification::passed) && self.speed_identity_error <= 1e-12 * (1.0 + self.max_c2())
    }

    fn max_c2(&self) -> f64 {
        self.records.iter().fold(0.0f64, |m, r| m.max(r.c * r.c))
    }
}

/// Smooth random direction: random coefficients in `[-1/2, 1/2]` on the modes
/// `cos(kπq/L) sin(mπ(p + P)/2P)`, `k < 4`, `1 <= m <= 4`, so the bottom row is zero.
pub fn random_direction(grid: &StripGrid, rng: &mut impl Rng) -> Vec<f64> {
    let coeffs: Vec<f64> = (0..16).map(|_| rng.random::<f64>() - 0.5).collect();
    let (l, depth) = (grid.half_period, grid.depth);
    let mut dir = vec![0.0; grid.len()];
    for j in 0..grid.np {
        let z = (grid.p(j) + depth) / (2.0 * depth);
        for i in 0..grid.nq {
            let x = grid.q(i) / l;
            dir[grid.idx(i, j)] = coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * (PI * (n % 4) as f64 * x).cos() * (PI * (n / 4 + 1) as f64 * z).sin())
                .sum();
        }
    }
    dir
}

/// Directional finite-difference check of the Jacobian along a random direction.
pub fn jacobian_check(problem: &StripProblem, state: &WaveState, rng: &mut impl Rng) -> Result<Check> {
    let dir = random_direction(&problem.grid, rng);
    let err = problem.directional_error(state, &dir, 1e-5)?;
    Ok(Check {
        name: "jacobian directional difference",
        formula: "sup|(F(w + tφ) - F(w))/t - Jφ| / sup|Jφ| at t = 1e-5",
        pass: err < JACOBIAN_TOL,
        margin: JACOBIAN_TOL - err,
        tolerance: 0.0,
        node: None,
    })
}

/// Traces the branch at `epsilon` and verifies every point in parallel.
pub fn continue_and_verify(cfg: &RunConfig, epsilon: f64, seed: u64) -> Result<BranchRun> {
    continue_and_verify_to(cfg, epsilon, None, seed)
}

/// As [`continue_and_verify`], stopping once `|s|` reaches `target_s`.
pub fn continue_and_verify_to(cfg: &RunConfig, epsilon: f64, target_s: Option<f64>, seed: u64) -> Result<BranchRun> {
    let bp = bifurcation_point(cfg, epsilon)?;
    let problem = cfg.strip_problem(bp.lambda_star)?;
    let opts = ContinuationOptions { target_s, ..cfg.continuation() };
    let branch = continue_branch(&problem, &bp, &opts).map_err(|e| e.in_module("branch_continuation"))?;
    let opts = cfg.verify();
    let verification = branch
        .points
        .par_iter()
        .enumerate()
        .map(|(k, pt)| {
            let report = verify_state(&problem, &pt.state, &opts).map_err(|e| e.in_module("wave_physics"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let jacobian = jacobian_check(&problem, &pt.state, &mut rng).map_err(|e| e.in_module("strip_solver"))?;
            Ok(PointVerification { report, jacobian })
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma_total = problem.functionals.gamma_total;
    let caps = cfg.caps();
    let last = branch.points.len() - 1;
    let mut speed_identity_error = 0.0f64;
    let records = branch
        .points
        .iter()
        .zip(&verification)
        .enumerate()
        .map(|(k, (pt, v))| {
            let r = &v.report;
            speed_identity_error = speed_identity_error.max((r.c * r.c - (r.lambda + 2.0 * gamma_total)).abs());
            BranchRecord {
                s: pt.s,
                lambda: pt.state.lambda,
                c: r.c,
                eta_crest: r.eta_crest,
                eta_trough: r.eta_trough,
                min_rel_speed: r.min_rel_speed,
                verify_pass_count: r.pass_count() + usize::from(v.jacobian.pass),
                termination: if k == last { branch.termination } else { classify_termination(&problem, &pt.state, &caps) },
            }
        })
        .collect();
    Ok(BranchRun { branch, verification, records, speed_identity_error })
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotopySummary {
    pub target_s: f64,
    pub epsilon: Vec<f64>,
    pub lambda_star: Vec<f64>,
    pub lambda: Vec<f64>,
    pub newton_iterations: Vec<usize>,
    pub w_differences: Vec<f64>,
    pub lambda_differences: Vec<f64>,
    pub differences_decrease: bool,
    pub failure: Option<(usize, String)>,
}

pub fn homotopy(cfg: &RunConfig) -> Result<HomotopySummary> {
    // the smallest ε has the largest λ and so the deepest decay length
    let last = *cfg.epsilon_schedule.last().expect("validated schedule");
    let bp = bifurcation_point(cfg, last)?;
    let problem = cfg.strip_problem(bp.lambda_star)?;
    let h = epsilon_homotopy(&problem, &cfg.epsilon_schedule, cfg.branch.target_s, cfg.grid.sl_cells, cfg.newton())
        .map_err(|e| e.in_module("branch_continuation"))?;
    Ok(HomotopySummary {
        target_s: h.target_s,
        epsilon: h.points.iter().map(|p| p.epsilon).collect(),
        lambda_star: h.points.iter().map(|p| p.lambda_star).collect(),
        lambda: h.points.iter().map(|p| p.lambda).collect(),
        newton_iterations: h.points.iter().map(|p| p.newton_iterations).collect(),
        differences_decrease: h.differences_decrease(),
        w_differences: h.w_differences,
        lambda_differences: h.lambda_differences,
        failure: h.failure,
    })
}

/// Problem on the grid the state was computed on.
pub fn problem_for(cfg: &RunConfig, state: &WaveState) -> Result<StripProblem> {
    StripProblem::new(&cfg.model()?, cfg.g, cfg.delta, state.grid)
}

pub fn verify(cfg: &RunConfig, state: &WaveState) -> Result<StateReport> {
    verify_state(&problem_for(cfg, state)?, state, &cfg.verify()).map_err(|e| e.in_module("wave_physics"))
}

pub fn reconstruct_state(cfg: &RunConfig, state: &WaveState) -> Result<PhysicalWave> {
    reconstruct(&problem_for(cfg, state)?, state).map_err(|e| e.in_module("wave_physics"))
}

#[derive(Debug, Clone, Serialize)]
pub struct NekrasovReport {
    pub nu: f64,
    pub iterations: usize,
    /// `[s, θ(s)]` pairs on `[0, π]`.
    pub theta: Vec<[f64; 2]>,
    /// `(ν/3)∫θ sin / ∫θ sin`; absent for the trivial solution.
    pub bound_ratio: Option<f64>,
    pub bound_holds: Option<bool>,
}

impl From<&NekrasovState> for NekrasovReport {
    fn from(st: &NekrasovState) -> Self {
        let b = st.nu_bound();
        Self {
            nu: st.nu,
            iterations: st.iterations,
            theta: st.s.iter().zip(&st.theta).map(|(s, t)| [*s, *t]).collect(),
            bound_ratio: b.map(|b| b.ratio),
            bound_holds: b.map(|b| b.holds),
        }
    }
}

pub fn nekrasov(cfg: &RunConfig) -> Result<NekrasovReport> {
    let st = solve_nekrasov(cfg.nekrasov.nu, cfg.nekrasov.n, &cfg.nekrasov_options()).map_err(|e| e.in_module("nekrasov_baseline"))?;
    Ok(NekrasovReport::from(&st))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<WaveState> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a headed CSV of numeric rows.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        // adding zero turns -0 into 0
        w.write_record(r.iter().map(|v| (v + 0.0).to_string())).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `eta.csv` and `field.csv` for a reconstructed wave.
pub fn write_reconstruction(dir: &Path, wave: &PhysicalWave, levels: usize) -> Result<Vec<PathBuf>> {
    let eta = dir.join("eta.csv");
    write_table(&eta, &["x", "eta"], wave.eta.iter().map(|(x, e)| vec![*x, *e]))?;
    let field = dir.join("field.csv");
    let samples = wave.resample(levels)?;
    write_table(&field, &["x", "y", "psi", "psi_x", "psi_y", "pressure"], samples.rows.iter().map(|r| r.to_vec()))?;
    Ok(vec![eta, field])
}

/// Writes a branch run under `dir`: per-point states and reports plus `branch.csv`.
pub fn write_branch(dir: &Path, run: &BranchRun) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for (k, (pt, v)) in run.branch.points.iter().zip(&run.verification).enumerate() {
        let state = dir.join(format!("points/point_{k:03}.json"));
        write_json(&state, &pt.state)?;
        let report = dir.join(format!("reports/point_{k:03}.json"));
        write_json(&report, v)?;
        files.extend([state, report]);
    }
    let table = dir.join("branch.csv");
    write_csv(&table, &run.records)?;
    let summary = dir.join("branch.json");
    write_json(
        &summary,
        &serde_json::json!({
            "epsilon": run.branch.epsilon,
            "lambda_star": run.branch.lambda_star,
            "points": run.branch.points.len(),
            "termination": run.branch.termination,
            "diagnostic": run.branch.diagnostic,
            "speed_identity_error": run.speed_identity_error,
            "passed": run.passed(),
        }),
    )?;
    files.extend([table, summary]);
    Ok(files)
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchOutcome {
    pub epsilon: f64,
    pub points: usize,
    pub termination: Termination,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub seed: u64,
    pub bifurcation: Vec<BifurcationReport>,
    pub branches: Vec<BranchOutcome>,
    pub homotopy_decreasing: bool,
    pub passed: bool,
    pub files: Vec<String>,
}

/// Full run: bifurcation points and verified branches for every ε of the
/// schedule, then the homotopy at the fixed branch coordinate.
/// `manifest.passed` is false iff a mandatory verification failed.
pub fn run_pipeline(cfg: &RunConfig, out: &Path, seed: u64) -> Result<Manifest> {
    fs::create_dir_all(out)?;
    let runs = cfg
        .epsilon_schedule
        .par_iter()
        .map(|&eps| Ok((bifurcate(cfg, eps)?, continue_and_verify(cfg, eps, seed)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut files = Vec::new();
    let mut bifurcation = Vec::new();
    let mut branches = Vec::new();
    for (k, (bif, run)) in runs.into_iter().enumerate() {
        let dir = out.join(format!("eps_{k}"));
        let path = dir.join("bifurcation.json");
        write_json(&path, &bif)?;
        files.push(path);
        files.extend(write_branch(&dir, &run)?);
        branches.push(BranchOutcome {
            epsilon: bif.epsilon,
            points: run.branch.points.len(),
            termination: run.branch.termination,
            passed: run.passed(),
        });
        bifurcation.push(bif);
    }
    let h = homotopy(cfg)?;
    let path = out.join("homotopy.json");
    write_json(&path, &h)?;
    files.push(path);
    let passed = branches.iter().all(|b| b.passed) && h.failure.is_none();
    let rel = |p: &PathBuf| p.strip_prefix(out).unwrap_or(p).to_string_lossy().replace('\\', "/");
    let mut manifest = Manifest {
        config: cfg.clone(),
        seed,
        bifurcation,
        branches,
        homotopy_decreasing: h.differences_decrease,
        passed,
        files: files.iter().map(rel).collect(),
    };
    manifest.files.push("manifest.json".into());
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
