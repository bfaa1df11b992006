//! Run configuration: a TOML key-value file with `VORSTOKES_` environment overrides.
//!
//! Dotted keys map to environment variables by upper-casing and replacing `.`
//! with `__`, e.g. `grid.nq` ↔ `VORSTOKES_GRID__NQ`. Override values are read as
//! TOML literals, falling back to bare strings.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::continuation::{geometric_schedule, Caps, ContinuationOptions};
use crate::error::{Error, Result};
use crate::nekrasov::NekrasovOptions;
use crate::physics::VerifyOptions;
use crate::strip::{NewtonOptions, StripGrid, StripProblem};
use crate::vorticity::VorticityModel;

pub const ENV_PREFIX: &str = "VORSTOKES_";

/// Environment variables read by the command line itself rather than the config.
const RESERVED_ENV: [&str; 4] = ["CONFIG", "OUT", "JOBS", "SEED"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "GridConfig::default_nq")]
    pub nq: usize,
    #[serde(default = "GridConfig::default_np")]
    pub np: usize,
    /// Truncation depth; derived from λ when absent.
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    /// Cells of the half-line eigenvalue grid.
    #[serde(default = "GridConfig::default_sl_cells")]
    pub sl_cells: usize,
}

impl GridConfig {
    fn default_nq() -> usize {
        48
    }
    fn default_np() -> usize {
        300
    }
    fn default_sl_cells() -> usize {
        2000
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { nq: Self::default_nq(), np: Self::default_np(), depth: None, sl_cells: Self::default_sl_cells() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsConfig {
    /// Defaults to `100 gL/π`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wp_cap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VorticityKindConfig {
    Zero,
    ExpDecay,
    Gerstner,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VorticityConfig {
    pub kind: VorticityKindConfig,
    /// `A` of `γ(r) = A e^{-r/r₀}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// `r₀` of the exponential model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Gerstner parameter `m ∈ [0, 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// `(r, γ(r))` pairs of a tabulated model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

impl VorticityConfig {
    pub fn model(&self) -> Result<VorticityModel> {
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| Error::Config(format!("missing required key vorticity.{key}")));
        let model = match self.kind {
            VorticityKindConfig::Zero => VorticityModel::zero(),
            VorticityKindConfig::ExpDecay => VorticityModel::exp_decay(need(self.amplitude, "amplitude")?, need(self.rate, "rate")?)?,
            VorticityKindConfig::Gerstner => VorticityModel::gerstner(need(self.m, "m")?)?,
            VorticityKindConfig::Tabulated => {
                let knots = self.knots.as_ref().ok_or_else(|| Error::Config("missing required key vorticity.knots".into()))?;
                VorticityModel::tabulated(knots)?
            }
        };
        match self.rho {
            Some(rho) => model.with_rho(rho),
            None => Ok(model),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedsConfig {
    /// Amplitude of the first nontrivial point.
    pub s0: f64,
    /// Initial arclength step.
    pub step: f64,
}

impl Default for SeedsConfig {
    fn default() -> Self {
        Self { s0: 0.01, step: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BranchConfig {
    pub steps: usize,
    pub min_step: f64,
    pub max_step: f64,
    /// Fixed branch coordinate of the ε homotopy.
    pub target_s: f64,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self { steps: 30, min_step: 1e-6, max_step: 0.05, target_s: 0.02 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub newton: f64,
    pub quadrature: f64,
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { newton: 1e-10, quadrature: 1e-13, verify: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NekrasovConfig {
    pub nu: f64,
    pub n: usize,
    pub tol: f64,
    pub newton: bool,
}

impl Default for NekrasovConfig {
    fn default() -> Self {
        Self { nu: 4.0, n: 256, tol: 1e-12, newton: false }
    }
}

fn default_g() -> f64 {
    9.81
}
fn default_l() -> f64 {
    PI
}
fn default_delta() -> f64 {
    1e-3
}
fn default_epsilon() -> f64 {
    0.01
}
fn default_schedule() -> Vec<f64> {
    geometric_schedule(0.1, 0.5, 5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(rename = "L", default = "default_l")]
    pub half_period: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Regularization used by single-ε runs.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_schedule")]
    pub epsilon_schedule: Vec<f64>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub caps: CapsConfig,
    pub vorticity: VorticityConfig,
    #[serde(default)]
    pub seeds: SeedsConfig,
    #[serde(default)]
    pub branch: BranchConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub nekrasov: NekrasovConfig,
}

impl RunConfig {
    /// Defaults around the given vorticity block.
    pub fn with_vorticity(vorticity: VorticityConfig) -> Self {
        Self {
            g: default_g(),
            half_period: default_l(),
            delta: default_delta(),
            epsilon: default_epsilon(),
            epsilon_schedule: default_schedule(),
            grid: GridConfig::default(),
            caps: CapsConfig::default(),
            vorticity,
            seeds: SeedsConfig::default(),
            branch: BranchConfig::default(),
            tolerances: Tolerances::default(),
            nekrasov: NekrasovConfig::default(),
        }
    }

    pub fn zero_vorticity() -> Self {
        Self::with_vorticity(VorticityConfig {
            kind: VorticityKindConfig::Zero,
            amplitude: None,
            rate: None,
            m: None,
            knots: None,
            rho: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, key: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{key} must be positive, got {v}")))
            }
        };
        positive(self.g, "g")?;
        positive(self.half_period, "L")?;
        positive(self.delta, "delta")?;
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon must lie in [0, 1), got {}", self.epsilon)));
        }
        let sched = &self.epsilon_schedule;
        if sched.is_empty() {
            return Err(Error::Config("epsilon_schedule is empty".into()));
        }
        if sched.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(Error::Config(format!("epsilon_schedule entries must lie in (0, 1): {sched:?}")));
        }
        if sched.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config(format!("epsilon_schedule must be strictly decreasing: {sched:?}")));
        }
        if self.grid.nq < 8 || self.grid.np < 8 {
            return Err(Error::Config(format!("grid needs nq, np >= 8, got {} x {}", self.grid.nq, self.grid.np)));
        }
        if let Some(p) = self.grid.depth {
            positive(p, "grid.P")?;
        }
        if self.grid.sl_cells < 16 {
            return Err(Error::Config(format!("grid.sl_cells must be at least 16, got {}", self.grid.sl_cells)));
        }
        for (v, key) in [(self.caps.lambda_cap, "caps.lambda_cap"), (self.caps.w_cap, "caps.w_cap"), (self.caps.wp_cap, "caps.wp_cap")] {
            if let Some(v) = v {
                positive(v, key)?;
            }
        }
        if self.seeds.s0 == 0.0 || !self.seeds.s0.is_finite() {
            return Err(Error::Config("seeds.s0 must be nonzero".into()));
        }
        positive(self.seeds.step, "seeds.step")?;
        positive(self.branch.min_step, "branch.min_step")?;
        positive(self.branch.max_step, "branch.max_step")?;
        if self.branch.min_step > self.branch.max_step {
            return Err(Error::Config("branch.min_step exceeds branch.max_step".into()));
        }
        if !self.branch.target_s.is_finite() {
            return Err(Error::Config("branch.target_s must be finite".into()));
        }
        positive(self.tolerances.newton, "tolerances.newton")?;
        positive(self.tolerances.quadrature, "tolerances.quadrature")?;
        positive(self.tolerances.verify, "tolerances.verify")?;
        positive(self.nekrasov.nu, "nekrasov.nu")?;
        positive(self.nekrasov.tol, "nekrasov.tol")?;
        if self.nekrasov.n < 8 {
            return Err(Error::Config(format!("nekrasov.n must be at least 8, got {}", self.nekrasov.n)));
        }
        self.vorticity.model()?;
        Ok(())
    }

    pub fn model(&self) -> Result<VorticityModel> {
        self.vorticity.model()?.with_quad_tol(self.tolerances.quadrature)
    }

    pub fn caps(&self) -> Caps {
        let d = Caps::standard(self.g, self.half_period);
        Caps {
            lambda_cap: self.caps.lambda_cap.unwrap_or(d.lambda_cap),
            w_cap: self.caps.w_cap.unwrap_or(d.w_cap),
            wp_cap: self.caps.wp_cap.unwrap_or(d.wp_cap),
        }
    }

    pub fn newton(&self) -> NewtonOptions {
        NewtonOptions { tol: self.tolerances.newton, ..NewtonOptions::default() }
    }

    pub fn continuation(&self) -> ContinuationOptions {
        let mut o = ContinuationOptions::new(self.g, self.half_period);
        o.steps = self.branch.steps;
        o.step = self.seeds.step;
        o.s0 = self.seeds.s0;
        o.min_step = self.branch.min_step;
        o.max_step = self.branch.max_step;
        o.newton.tol = self.tolerances.newton;
        o.caps = self.caps();
        o
    }

    pub fn verify(&self) -> VerifyOptions {
        VerifyOptions { solver_tol: self.tolerances.verify, ..VerifyOptions::default() }
    }

    pub fn nekrasov_options(&self) -> NekrasovOptions {
        NekrasovOptions { tol: self.nekrasov.tol, newton: self.nekrasov.newton, ..NekrasovOptions::default() }
    }

    /// Strip grid for waves near `lambda`.
    pub fn strip_grid(&self, lambda: f64) -> Result<StripGrid> {
        let depth = self.grid.depth.unwrap_or_else(|| StripGrid::default_depth(self.half_period, lambda));
        StripGrid::new(self.half_period, depth, self.grid.nq, self.grid.np)
    }

    pub fn strip_problem(&self, lambda: f64) -> Result<StripProblem> {
        StripProblem::new(&self.model()?, self.g, self.delta, self.strip_grid(lambda)?)
    }
}

/// Parses config text, then applies `(name, value)` environment overrides.
pub fn parse_config_str<I, K, V>(text: &str, env: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut table: Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
    let mut overrides: Vec<(String, String)> = env
        .into_iter()
        .filter_map(|(k, v)| {
            let rest = k.as_ref().strip_prefix(ENV_PREFIX)?;
            (!RESERVED_ENV.contains(&rest)).then(|| (rest.to_string(), v.as_ref().to_string()))
        })
        .collect();
    overrides.sort();
    for (name, raw) in overrides {
        apply_override(&mut table, &name, &raw)?;
    }
    let cfg: RunConfig = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads `path` and applies the process environment.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text, std::env::vars())
}

/// Key segment spelled as in the file (`L` and `grid.P` are upper case).
fn key_segment(path: &[String], seg: &str) -> String {
    let lower = seg.to_ascii_lowercase();
    match (path.len(), lower.as_str()) {
        (0, "l") => "L".into(),
        (1, "p") if path[0] == "grid" => "P".into(),
        _ => lower,
    }
}

fn apply_override(table: &mut Table, name: &str, raw: &str) -> Result<()> {
    let mut keys: Vec<String> = Vec::new();
    for seg in name.split("__") {
        if seg.is_empty() {
            return Err(Error::Config(format!("malformed override {ENV_PREFIX}{name}")));
        }
        let k = key_segment(&keys, seg);
        keys.push(k);
    }
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let (last, parents) = keys.split_last().expect("at least one segment");
    let mut cur = table;
    for k in parents {
        let entry = cur.entry(k.clone()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| Error::Config(format!("override {ENV_PREFIX}{name}: {k} is not a table")))?;
    }
    cur.insert(last.clone(), value);
    Ok(())
}
