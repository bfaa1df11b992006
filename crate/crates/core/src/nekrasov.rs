//! Irrotational surface-angle integral equation
//!
//! `θ(s) = (1/3π) ∫₀^π K(s, t) sin θ(t) / (ν^{-1} + ∫₀^t sin θ) dt`,
//! `K(s, t) = log|sin ½(s+t) / sin ½(s-t)|`,
//!
//! solved by product integration on a uniform grid `s_i = iπ/n`, and the
//! bound `ν > 3` that any nontrivial solution must obey.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::linalg::SparseMatrix;
use crate::quadrature::gauss_legendre;

/// `log|sin ½(s+t) / sin ½(s-t)|` for `s, t ∈ (0, π)`, `s ≠ t`.
pub fn kernel(s: f64, t: f64) -> Result<f64> {
    if s == t {
        return Err(Error::Domain(format!("kernel is singular at s = t = {s}")));
    }
    Ok(((0.5 * (s + t)).sin() / (0.5 * (s - t)).sin()).abs().ln())
}

/// `∫_{t0}^{t1} (α + βt) log|t - a| dt` in closed form.
fn linear_times_log(alpha: f64, beta: f64, a: f64, t0: f64, t1: f64) -> f64 {
    // with u = t - a: ∫ (α + βa + βu) log|u| du
    let c = alpha + beta * a;
    let prim = |u: f64| {
        if u == 0.0 {
            0.0
        } else {
            let l = u.abs().ln();
            c * (u * l - u) + beta * (0.5 * u * u * l - 0.25 * u * u)
        }
    };
    prim(t1 - a) - prim(t0 - a)
}

/// Product-integration weights `W[i][j]` with `∫₀^π K(s_i, t) f(t) dt ≈ Σ_j W[i][j] f(s_j)`
/// for `f` piecewise linear on the nodes. The logarithmic singularities at
/// `t = s`, `t = -s` and `t = 2π - s` are integrated exactly; the smooth
/// remainders use 8-point Gauss–Legendre per cell.
fn product_weights(n: usize) -> Vec<Vec<f64>> {
    let h = PI / n as f64;
    let (gx, gw) = gauss_legendre(8);
    let mut weights = vec![vec![0.0; n + 1]; n + 1];
    for (i, row) in weights.iter_mut().enumerate().take(n).skip(1) {
        let s = i as f64 * h;
        // K(s, t) = log|t + s| + log|t - (2π - s)| - log|t - s| + r(t), r smooth on [0, π]
        let r = |t: f64| {
            (0.5 * (s + t)).sin().ln() - (t + s).ln() - (2.0 * PI - s - t).ln() - (0.5 * (s - t)).sin().abs().ln()
                + (t - s).abs().ln()
        };
        for k in 0..n {
            let (t0, t1) = (k as f64 * h, (k + 1) as f64 * h);
            // hat pieces on the cell: φ_k = (t1 - t)/h, φ_{k+1} = (t - t0)/h
            for (node, alpha, beta) in [(k, t1 / h, -1.0 / h), (k + 1, -t0 / h, 1.0 / h)] {
                let mut v = linear_times_log(alpha, beta, -s, t0, t1) + linear_times_log(alpha, beta, 2.0 * PI - s, t0, t1)
                    - linear_times_log(alpha, beta, s, t0, t1);
                let mut acc = 0.0;
                for (x, w) in gx.iter().zip(&gw) {
                    let t = 0.5 * (t0 + t1) + 0.5 * h * x;
                    acc += w * (alpha + beta * t) * r(t);
                }
                v += 0.5 * h * acc;
                row[node] += v;
            }
        }
    }
    weights
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NekrasovOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Picard relaxation; ignored by Newton.
    pub damping: f64,
    pub newton: bool,
}

impl Default for NekrasovOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 20_000, damping: 0.5, newton: false }
    }
}

/// Solution samples `θ(s_i)`, `s_i = iπ/n`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NekrasovState {
    pub nu: f64,
    pub n_quad: usize,
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
    pub iterations: usize,
    /// Sup-norm of the last update.
    pub update: f64,
}

impl NekrasovState {
    pub fn is_trivial(&self) -> bool {
        self.theta.iter().all(|v| v.abs() < 1e-13)
    }

    pub fn max_angle(&self) -> f64 {
        self.theta.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Odd 2π-periodic extension sampled on `s_i - π`, `i = 0..=2n`.
    pub fn odd_extension(&self) -> Vec<(f64, f64)> {
        let n = self.n_quad;
        let mut out: Vec<(f64, f64)> = (1..=n).rev().map(|i| (-self.s[i], -self.theta[i])).collect();
        out.extend(self.s.iter().copied().zip(self.theta.iter().copied()));
        out
    }

    /// `(ν^{-1} + ∫₀^{s_i} sin θ)` at the nodes.
    fn denominators(&self) -> Vec<f64> {
        denominators(self.nu, &self.theta, PI / self.n_quad as f64)
    }

    /// Surface shape up to scale: `x̃ = ∫₀^s cos θ D^{-1/3}`, `ỹ = -∫₀^s sin θ D^{-1/3}`,
    /// `D = ν^{-1} + ∫₀^s sin θ`, from the crest (`s = 0`) to the trough (`s = π`).
    pub fn profile(&self) -> Vec<(f64, f64)> {
        let h = PI / self.n_quad as f64;
        let d = self.denominators();
        let fx: Vec<f64> = self.theta.iter().zip(&d).map(|(t, d)| t.cos() * d.powf(-1.0 / 3.0)).collect();
        let fy: Vec<f64> = self.theta.iter().zip(&d).map(|(t, d)| -t.sin() * d.powf(-1.0 / 3.0)).collect();
        let (x, y) = (cumulative_trapezoid(&fx, h), cumulative_trapezoid(&fy, h));
        x.into_iter().zip(y).collect()
    }

    /// Crest-to-trough height over half wavelength, `(ỹ(0) - ỹ(π)) / x̃(π)`.
    pub fn steepness(&self) -> f64 {
        let p = self.profile();
        let (xe, ye) = *p.last().unwrap();
        -ye / xe
    }
}

fn cumulative_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for k in 1..f.len() {
        out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
    }
    out
}

fn denominators(nu: f64, theta: &[f64], h: f64) -> Vec<f64> {
    let sines: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    cumulative_trapezoid(&sines, h).into_iter().map(|i| 1.0 / nu + i).collect()
}

/// Discrete Nekrasov operator on one grid.
#[derive(Debug, Clone)]
pub struct NekrasovSolver {
    pub n_quad: usize,
    weights: Vec<Vec<f64>>,
}

impl NekrasovSolver {
    pub fn new(n_quad: usize) -> Result<Self> {
        if n_quad < 8 {
            return Err(Error::Grid(format!("need at least 8 quadrature cells, got {n_quad}")));
        }
        Ok(Self { n_quad, weights: product_weights(n_quad) })
    }

    fn h(&self) -> f64 {
        PI / self.n_quad as f64
    }

    /// `∫₀^π K(s_i, t) f(t) dt` at interior nodes (zero at the ends).
    pub fn apply_kernel(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_quad;
        let mut out = vec![0.0; n + 1];
        for (i, o) in out.iter_mut().enumerate().take(n).skip(1) {
            *o = self.weights[i].iter().zip(f).map(|(w, v)| w * v).sum();
        }
        out
    }

    /// Right-hand side of the fixed-point equation.
    pub fn operator(&self, nu: f64, theta: &[f64]) -> Vec<f64> {
        let d = denominators(nu, theta, self.h());
        let f: Vec<f64> = theta.iter().zip(&d).map(|(t, d)| t.sin() / d).collect();
        self.apply_kernel(&f).into_iter().map(|v| v / (3.0 * PI)).collect()
    }

    /// Solves from `start` (samples on the `n_quad + 1` nodes, odd data so the ends are zero).
    pub fn solve(&self, nu: f64, start: &[f64], opts: &NekrasovOptions) -> Result<NekrasovState> {
        let n = self.n_quad;
        if !(nu > 0.0) {
            return Err(Error::Domain(format!("ν must be positive, got {nu}")));
        }
        if start.len() != n + 1 {
            return Err(Error::Grid(format!("start has {} samples, expected {}", start.len(), n + 1)));
        }
        let mut theta = start.to_vec();
        theta[0] = 0.0;
        theta[n] = 0.0;
        let s: Vec<f64> = (0..=n).map(|i| i as f64 * self.h()).collect();
        let mut update = f64::INFINITY;
        for it in 0..opts.max_iter {
            let next = if opts.newton { self.newton_step(nu, &theta)? } else {
                let t = self.operator(nu, &theta);
                theta.iter().zip(&t).map(|(a, b)| (1.0 - opts.damping) * a + opts.damping * b).collect()
            };
            update = next.iter().zip(&theta).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if !update.is_finite() || next.iter().any(|v| v.abs() >= 0.5 * PI) {
                return Err(Error::Divergence(format!(
                    "surface angle iteration diverged at step {it} (max |θ| = {:.3e})",
                    next.iter().fold(0.0f64, |m, v| m.max(v.abs()))
                )));
            }
            theta = next;
            if update < opts.tol {
                return Ok(NekrasovState { nu, n_quad: n, s, theta, iterations: it + 1, update });
            }
        }
        Err(Error::Divergence(format!("no convergence in {} iterations (last update {update:.3e})", opts.max_iter)))
    }

    fn newton_step(&self, nu: f64, theta: &[f64]) -> Result<Vec<f64>> {
        let n = self.n_quad;
        let h = self.h();
        let d = denominators(nu, theta, h);
        let t = self.operator(nu, theta);
        // ∂f_j/∂θ_m with f_j = sin θ_j / D_j and D_j = ν^{-1} + trapezoid(sin θ)_j
        let trap = |j: usize, m: usize| -> f64 {
            if m > j || j == 0 {
                0.0
            } else if m == 0 || m == j {
                0.5 * h
            } else {
                h
            }
        };
        let mut jac = SparseMatrix::with_capacity(n - 1, (n - 1) * (n - 1));
        for i in 1..n {
            for m in 1..n {
                let mut v = 0.0;
                for j in 1..n {
                    let mut df = -theta[j].sin() / (d[j] * d[j]) * trap(j, m) * theta[m].cos();
                    if j == m {
                        df += theta[j].cos() / d[j];
                    }
                    v += self.weights[i][j] * df;
                }
                let mut e = -v / (3.0 * PI);
                if i == m {
                    e += 1.0;
                }
                jac.push(i - 1, m - 1, e);
            }
        }
        let rhs: Vec<f64> = (1..n).map(|i| t[i] - theta[i]).collect();
        let dx = jac.solve(&rhs)?;
        let mut out = theta.to_vec();
        for i in 1..n {
            out[i] += dx[i - 1];
        }
        Ok(out)
    }
}

/// Solves with the default starting guess `0.1 sin s` (or from zero when `start_zero`).
pub fn solve_nekrasov(nu: f64, n_quad: usize, opts: &NekrasovOptions) -> Result<NekrasovState> {
    let solver = NekrasovSolver::new(n_quad)?;
    let start: Vec<f64> = (0..=n_quad).map(|i| 0.1 * (i as f64 * PI / n_quad as f64).sin()).collect();
    solver.solve(nu, &start, opts)
}

/// Both sides of `∫θ sin s ds = (1/3)∫ sin θ sin t / D dt < (ν/3) ∫θ sin t dt`,
/// obtained by multiplying the equation by `sin s`, integrating, and using
/// `∫₀^π K(s, t) sin s ds = π sin t` and `sin θ / D < ν θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuBound {
    pub nu: f64,
    /// `∫θ(s) sin s ds`
    pub left: f64,
    /// `(1/3) ∫ sin θ(t) sin t / D(t) dt`
    pub middle: f64,
    /// `(ν/3) ∫θ(t) sin t dt`
    pub right: f64,
    /// `right / left`, equal to `ν/3`
    pub ratio: f64,
    pub holds: bool,
}

/// `None` for the trivial solution.
pub fn nu_bound_check(nu: f64, s: &[f64], theta: &[f64]) -> Option<NuBound> {
    if theta.iter().all(|v| v.abs() < 1e-13) {
        return None;
    }
    let n = s.len() - 1;
    let h = PI / n as f64;
    let d = denominators(nu, theta, h);
    let trap = |f: &dyn Fn(usize) -> f64| (0..=n).map(|i| if i == 0 || i == n { 0.5 * f(i) } else { f(i) }).sum::<f64>() * h;
    let left = trap(&|i| theta[i] * s[i].sin());
    let middle = trap(&|i| theta[i].sin() * s[i].sin() / d[i]) / 3.0;
    let right = nu / 3.0 * left;
    Some(NuBound { nu, left, middle, right, ratio: right / left, holds: middle < right && left < right })
}

impl NekrasovState {
    pub fn nu_bound(&self) -> Option<NuBound> {
        nu_bound_check(self.nu, &self.s, &self.theta)
    }
}

/// Mean-removed elevation `η(x)` on `[-L, 0]` (trough at `-L`, crest at `0`)
/// from a Nekrasov solution scaled to half wavelength `L`.
pub fn scaled_profile(state: &NekrasovState, half_period: f64) -> Result<MonotoneCubic> {
    let p = state.profile();
    let span = p.last().unwrap().0;
    let scale = half_period / span;
    // crest at s = 0 maps to x = 0, the trough at s = π to x = -L
    let mut pts: Vec<(f64, f64)> = p.iter().map(|(x, y)| (-x * scale, y * scale)).collect();
    pts.reverse();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let mean = mean_on(&xs, &ys);
    MonotoneCubic::new(xs, ys.into_iter().map(|y| y - mean).collect())
}

/// Trapezoid mean of samples `y(x)` over `[x_0, x_n]`.
pub fn mean_on(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 1..x.len() {
        acc += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
    }
    acc / (x[x.len() - 1] - x[0])
}

/// Solves for the ν whose profile has the given steepness (height over half
/// wavelength), by bisection on `(3, nu_hi]`.
pub fn match_steepness(solver: &NekrasovSolver, target: f64, nu_hi: f64, opts: &NekrasovOptions) -> Result<NekrasovState> {
    let n = solver.n_quad;
    let mut start: Vec<f64> = (0..=n).map(|i| 0.1 * (i as f64 * PI / n as f64).sin()).collect();
    let top = solver.solve(nu_hi, &start, opts)?;
    if top.steepness() < target {
        return Err(Error::Domain(format!("steepness {target:.4e} exceeds the ν = {nu_hi} solution")));
    }
    let (mut lo, mut hi) = (3.0, nu_hi);
    let mut best = top;
    start = best.theta.clone();
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match solver.solve(mid, &start, opts) {
            Ok(st) if !st.is_trivial() => {
                let sp = st.steepness();
                if sp > target {
                    hi = mid;
                } else {
                    lo = mid;
                }
                start = st.theta.clone();
                best = st;
                if (sp - target).abs() <= 1e-10 * target {
                    break;
                }
            }
            _ => lo = mid,
        }
    }
    Ok(best)
}
