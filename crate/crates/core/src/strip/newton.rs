//! Newton iterations for `F^ε(λ, w) = 0`, at fixed λ or with λ as an extra
//! unknown closed by one scalar constraint (bordered system).

use serde::Serialize;

use super::grid::{amplitude_weights, WaveState};
use super::operator::StripProblem;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Maximum number of step halvings to stay admissible.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 20, max_halvings: 30 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonReport {
    pub state: WaveState,
    pub iterations: usize,
    pub residual: f64,
    /// Residual history including the initial value.
    pub history: Vec<f64>,
}

/// Scalar side condition `c(w, λ) = 0` for the bordered system.
pub trait Constraint {
    fn value(&self, state: &WaveState) -> f64;
    /// Gradient in `w` (indexed like `w`) and derivative in λ.
    fn gradient(&self, state: &WaveState) -> (Vec<f64>, f64);
}

/// Fixes the first-cosine surface coefficient at `target`.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeConstraint {
    pub target: f64,
}

impl Constraint for AmplitudeConstraint {
    fn value(&self, state: &WaveState) -> f64 {
        state.amplitude() - self.target
    }

    fn gradient(&self, state: &WaveState) -> (Vec<f64>, f64) {
        let (c, row) = amplitude_weights(&state.grid);
        let mut g = vec![0.0; state.grid.len()];
        for (i, ci) in c.iter().enumerate() {
            g[state.grid.idx(i, row)] = *ci;
        }
        (g, 0.0)
    }
}

/// Fixes the surface value at the crest, `w(0, 0) = target`.
#[derive(Debug, Clone, Copy)]
pub struct CrestConstraint {
    pub target: f64,
}

impl Constraint for CrestConstraint {
    fn value(&self, state: &WaveState) -> f64 {
        state.at(state.grid.crest(), state.grid.np - 1) - self.target
    }

    fn gradient(&self, state: &WaveState) -> (Vec<f64>, f64) {
        let mut g = vec![0.0; state.grid.len()];
        g[state.grid.idx(state.grid.crest(), state.grid.np - 1)] = 1.0;
        (g, 0.0)
    }
}

/// Pseudo-arclength condition `θ_λ (λ - λ₀) + (1/N) Σ θ_w (w - w₀) = ds`.
#[derive(Debug, Clone)]
pub struct ArclengthConstraint {
    pub base: WaveState,
    pub tangent_w: Vec<f64>,
    pub tangent_lambda: f64,
    pub step: f64,
}

impl Constraint for ArclengthConstraint {
    fn value(&self, state: &WaveState) -> f64 {
        let n = state.w.len() as f64;
        let dw: f64 = state.w.iter().zip(&self.base.w).zip(&self.tangent_w).map(|((a, b), t)| (a - b) * t).sum();
        self.tangent_lambda * (state.lambda - self.base.lambda) + dw / n - self.step
    }

    fn gradient(&self, state: &WaveState) -> (Vec<f64>, f64) {
        let n = state.w.len() as f64;
        (self.tangent_w.iter().map(|t| t / n).collect(), self.tangent_lambda)
    }
}

impl StripProblem {
    fn damped_update(
        &self,
        state: &WaveState,
        dw: &[f64],
        dl: f64,
        halvings: usize,
    ) -> Result<(WaveState, Vec<f64>)> {
        let mut t = 1.0;
        let mut last_err = None;
        for _ in 0..=halvings {
            let mut trial = state.clone();
            trial.w.iter_mut().zip(dw).for_each(|(w, d)| *w += t * d);
            trial.lambda += t * dl;
            match self.residual(&trial) {
                Ok(r) if r.iter().all(|v| v.is_finite()) => return Ok((trial, r)),
                Ok(_) => last_err = Some(Error::Divergence("non-finite residual".into())),
                Err(e @ (Error::Admissibility { .. } | Error::Stagnation(_))) => last_err = Some(e),
                Err(e) => return Err(e),
            }
            t *= 0.5;
        }
        Err(last_err.unwrap_or_else(|| Error::Divergence("no admissible damped step".into())))
    }

    /// Newton's method at fixed λ.
    pub fn newton_solve(&self, initial: &WaveState, opts: NewtonOptions) -> Result<NewtonReport> {
        let mut res = self.residual(initial)?;
        let mut state = initial.clone();
        let mut norm = self.residual_norm(&res);
        let mut history = vec![norm];
        for it in 0..=opts.max_iter {
            if norm <= opts.tol {
                return Ok(NewtonReport { state, iterations: it, residual: norm, history });
            }
            if it == opts.max_iter {
                break;
            }
            let jac = self.jacobian(&state)?;
            let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
            let dw = jac.solve(&rhs)?;
            let (next, r) = self.damped_update(&state, &dw, 0.0, opts.max_halvings)?;
            state = next;
            res = r;
            norm = self.residual_norm(&res);
            history.push(norm);
        }
        Err(Error::Divergence(format!("no convergence in {} iterations (residual {norm:.3e})", opts.max_iter)))
    }

    /// Assembles `[[J, F_λ], [∇c, c_λ]]`.
    pub fn bordered_matrix(&self, state: &WaveState, grad_w: &[f64], grad_lambda: f64) -> Result<SparseMatrix> {
        let n = self.grid.len();
        let jac = self.jacobian(state)?;
        let fl = self.lambda_derivative(state)?;
        let mut m = SparseMatrix::with_capacity(n + 1, jac.entries().len() + 2 * n + 1);
        for &(i, j, v) in jac.entries() {
            m.push(i, j, v);
        }
        for (i, v) in fl.iter().enumerate() {
            m.push(i, n, *v);
        }
        for (j, v) in grad_w.iter().enumerate() {
            m.push(n, j, *v);
        }
        m.push(n, n, grad_lambda);
        Ok(m)
    }

    /// Solves the bordered system with constraint row `(grad_w, grad_lambda)`.
    ///
    /// A dense constraint row ruins the sparsity of the LU factors, so the
    /// row is split into its surface part, which stays in the matrix, and
    /// an interior remainder handled as a rank-one update of the last row.
    pub fn bordered_solve(&self, state: &WaveState, grad_w: &[f64], grad_lambda: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.len();
        let top = self.grid.np - 1;
        let mut surface = vec![0.0; n];
        for i in 0..self.grid.nq {
            let k = self.grid.idx(i, top);
            surface[k] = grad_w[k];
        }
        let rest: Vec<(usize, f64)> =
            grad_w.iter().zip(&surface).enumerate().filter(|(_, (g, s))| *g != *s).map(|(k, (g, s))| (k, g - s)).collect();
        if rest.is_empty() {
            return self.bordered_matrix(state, grad_w, grad_lambda)?.solve(rhs);
        }
        let full = || self.bordered_matrix(state, grad_w, grad_lambda)?.solve(rhs);
        let base = self.bordered_matrix(state, &surface, grad_lambda)?;
        let Ok(lu) = base.factor() else { return full() };
        let mut e = vec![0.0; n + 1];
        e[n] = 1.0;
        let (Ok(y), Ok(z)) = (lu.solve(rhs), lu.solve(&e)) else { return full() };
        let dot = |v: &[f64]| rest.iter().map(|&(k, d)| d * v[k]).sum::<f64>();
        let denom = 1.0 + dot(&z);
        let zscale = z.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if denom.abs() < 1e-10 * zscale {
            return full();
        }
        let f = dot(&y) / denom;
        Ok(y.iter().zip(&z).map(|(a, b)| a - f * b).collect())
    }

    /// Newton's method for `(w, λ)` with `F^ε = 0` and one scalar constraint.
    pub fn bordered_newton(
        &self,
        initial: &WaveState,
        constraint: &dyn Constraint,
        opts: NewtonOptions,
    ) -> Result<NewtonReport> {
        let n = self.grid.len();
        let mut state = initial.clone();
        let mut res = self.residual(&state)?;
        let mut cval = constraint.value(&state);
        let mut norm = self.residual_norm(&res).max(cval.abs());
        let mut history = vec![norm];
        for it in 0..=opts.max_iter {
            if norm <= opts.tol {
                return Ok(NewtonReport { state, iterations: it, residual: norm, history });
            }
            if it == opts.max_iter {
                break;
            }
            let (gw, gl) = constraint.gradient(&state);
            let mut rhs: Vec<f64> = res.iter().map(|v| -v).collect();
            rhs.push(-cval);
            let x = self.bordered_solve(&state, &gw, gl, &rhs)?;
            let (next, r) = self.damped_update(&state, &x[..n], x[n], opts.max_halvings)?;
            state = next;
            res = r;
            cval = constraint.value(&state);
            norm = self.residual_norm(&res).max(cval.abs());
            history.push(norm);
        }
        Err(Error::Divergence(format!("bordered Newton did not converge in {} iterations (residual {norm:.3e})", opts.max_iter)))
    }

    /// Solves for the wave whose first surface cosine coefficient equals `target`.
    pub fn solve_at_amplitude(&self, initial: &WaveState, target: f64, opts: NewtonOptions) -> Result<NewtonReport> {
        self.bordered_newton(initial, &AmplitudeConstraint { target }, opts)
    }

    /// Unit tangent `(θ_w, θ_λ)` to the solution curve at `state` in the
    /// inner product `dλ² + (1/N) Σ dw²`, oriented so that `⟨θ, prev⟩ > 0`.
    pub fn tangent(&self, state: &WaveState, prev: (&[f64], f64)) -> Result<(Vec<f64>, f64)> {
        let n = self.grid.len();
        let nn = n as f64;
        let (pw, pl) = prev;
        let gw: Vec<f64> = pw.iter().map(|t| t / nn).collect();
        let mut rhs = vec![0.0; n + 1];
        rhs[n] = 1.0;
        let x = self.bordered_solve(state, &gw, pl, &rhs)?;
        let (tw, tl) = (&x[..n], x[n]);
        let norm = (tl * tl + tw.iter().map(|v| v * v).sum::<f64>() / nn).sqrt();
        Ok((tw.iter().map(|v| v / norm).collect(), tl / norm))
    }
}
