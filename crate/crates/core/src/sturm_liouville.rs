//! Half-line Sturm–Liouville problem locating the bifurcation point.
//!
//! For fixed λ the problem is
//! `-(a³ v')' + ε a³ v = μ a v` on `p < 0`, `λ^{3/2} v'(0) = g v(0)`, `v → 0` at depth,
//! truncated to `[-P, 0]` with `v(-P) = 0`. The discretization is the
//! stationarity condition of a discrete Rayleigh quotient with edge-midpoint
//! fluxes and trapezoidal mass, which yields a symmetric tridiagonal pencil
//! `K v = μ M v` with diagonal `M`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::vorticity::{VorticityFunctionals, VorticityModel};

#[derive(Debug, Clone)]
pub struct SlProblem {
    pub model: VorticityModel,
    pub functionals: VorticityFunctionals,
    pub g: f64,
    pub half_period: f64,
    pub epsilon: f64,
    /// Number of grid cells on the coarse level (the fine level doubles it).
    pub cells: usize,
    /// Truncation depth; `None` picks twenty decay lengths of the slowest admissible mode.
    pub depth: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationPoint {
    pub epsilon: f64,
    pub lambda_star: f64,
    /// Depths `p_j`, increasing from `-P` to 0.
    pub p: Vec<f64>,
    /// Eigenfunction samples normalized so the surface value is 1.
    pub phi: Vec<f64>,
    /// `-(π/L)²`
    pub mu: f64,
}

impl BifurcationPoint {
    /// `Φ(p)` by monotone cubic interpolation, zero below the truncation depth.
    pub fn phi_at(&self, p: f64) -> f64 {
        if p <= self.p[0] {
            return 0.0;
        }
        let j = self.p.partition_point(|&x| x <= p).min(self.p.len() - 1).max(1);
        // quadratic interpolation through three neighbouring nodes
        let j0 = if j + 1 < self.p.len() { j - 1 } else { j - 2 };
        let (x0, x1, x2) = (self.p[j0], self.p[j0 + 1], self.p[j0 + 2]);
        let (y0, y1, y2) = (self.phi[j0], self.phi[j0 + 1], self.phi[j0 + 2]);
        y0 * (p - x1) * (p - x2) / ((x0 - x1) * (x0 - x2))
            + y1 * (p - x0) * (p - x2) / ((x1 - x0) * (x1 - x2))
            + y2 * (p - x0) * (p - x1) / ((x2 - x0) * (x2 - x1))
    }

    pub fn to_interpolant(&self) -> Result<MonotoneCubic> {
        MonotoneCubic::new(self.p.clone(), self.phi.clone())
    }
}

/// Guaranteed decay rate `(λ + 2Γ_inf)^{1/2} / (λ + 2Γ_sup)^{3/2}` of the eigenfunction.
pub fn eigenfunction_decay_rate(lambda_star: f64, functionals: &VorticityFunctionals) -> f64 {
    let lo = (lambda_star + 2.0 * functionals.gamma_inf_bound).max(0.0);
    let hi = lambda_star + 2.0 * functionals.gamma_sup_bound;
    lo.sqrt() / hi.powf(1.5)
}

/// Least-squares slope of `ln|v|` against `p` over `window = (p_lo, p_hi)`.
pub fn fit_tail_slope(p: &[f64], v: &[f64], window: (f64, f64)) -> Option<f64> {
    let pts: Vec<(f64, f64)> = p
        .iter()
        .zip(v)
        .filter(|(x, y)| **x >= window.0 && **x <= window.1 && y.abs() > 1e-300)
        .map(|(x, y)| (*x, y.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|q| q.0).sum::<f64>() / n;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

struct Pencil {
    h: f64,
    /// symmetrized tridiagonal `M^{-1/2} K M^{-1/2}`
    diag: Vec<f64>,
    off: Vec<f64>,
    mass: Vec<f64>,
}

impl SlProblem {
    pub fn new(model: &VorticityModel, g: f64, half_period: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Domain(format!("ε must lie in [0, 1), got {epsilon}")));
        }
        if !(g > 0.0 && half_period > 0.0) {
            return Err(Error::Domain("g and L must be positive".into()));
        }
        Ok(Self {
            model: model.clone(),
            functionals: model.functionals()?,
            g,
            half_period,
            epsilon,
            cells: 4000,
            depth: None,
        })
    }

    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells = cells;
        self
    }

    pub fn with_depth(mut self, depth: f64) -> Self {
        self.depth = Some(depth);
        self
    }

    fn k(&self) -> f64 {
        PI / self.half_period
    }

    fn lambda_floor(&self) -> f64 {
        -2.0 * self.functionals.gamma_inf_bound
    }

    /// Default search ceiling `10 gL/π` above the critical floor.
    pub fn lambda_max(&self) -> f64 {
        10.0 * self.g * self.half_period / PI + self.lambda_floor().max(0.0)
    }

    fn depth_for(&self, lambda_hi: f64) -> f64 {
        self.depth.unwrap_or_else(|| {
            let k_est = self.k() / (lambda_hi + 2.0 * self.functionals.gamma_sup_bound).sqrt();
            20.0 / k_est.max(1e-12)
        })
    }

    fn a2(&self, lambda: f64, p: f64) -> Result<f64> {
        let v = lambda + 2.0 * self.model.big_gamma(p)?;
        if !(v > 0.0) {
            return Err(Error::Stagnation(format!("λ + 2Γ(p) = {v:.3e} at p = {p}")));
        }
        Ok(v)
    }

    fn pencil(&self, lambda: f64, cells: usize, depth: f64) -> Result<Pencil> {
        let h = depth / cells as f64;
        // unknowns v_1..v_N at p_j = -P + j h; v_0 = 0
        let n = cells;
        let node_a = |j: usize| self.a2(lambda, (-depth + j as f64 * h).min(0.0)).map(f64::sqrt);
        let mid_a3 = |j: usize| self.a2(lambda, -depth + (j as f64 + 0.5) * h).map(|v| v.powf(1.5));
        let mut k_diag = vec![0.0; n];
        let mut k_off = vec![0.0; n.saturating_sub(1)];
        let mut mass = vec![0.0; n];
        let mut flux_below = mid_a3(0)? / h;
        for idx in 0..n {
            let j = idx + 1;
            let aj = node_a(j)?;
            let top = j == n;
            let w = if top { 0.5 * h } else { h };
            let flux_above = if top { 0.0 } else { mid_a3(j)? / h };
            k_diag[idx] = flux_below + flux_above + self.epsilon * w * aj.powi(3);
            if top {
                k_diag[idx] -= self.g;
            } else {
                k_off[idx] = -flux_above;
            }
            mass[idx] = w * aj;
            flux_below = flux_above;
        }
        let s: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let diag = (0..n).map(|i| k_diag[i] * s[i] * s[i]).collect();
        let off = (0..n - 1).map(|i| k_off[i] * s[i] * s[i + 1]).collect();
        Ok(Pencil { h, diag, off, mass })
    }

    // Number of eigenvalues of the symmetric tridiagonal matrix below x.
    fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
        let mut count = 0;
        let mut d = diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..diag.len() {
            let dd = if d == 0.0 { f64::EPSILON * (off[i - 1].abs() + 1e-300) } else { d };
            d = diag[i] - x - off[i - 1] * off[i - 1] / dd;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn smallest(p: &Pencil) -> f64 {
        // Gershgorin bounds
        let n = p.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { p.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { p.off[i].abs() } else { 0.0 };
            lo = lo.min(p.diag[i] - r);
            hi = hi.max(p.diag[i] + r);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || (hi - lo) <= 1e-15 * mid.abs().max(1e-3) {
                break;
            }
            if Self::count_below(&p.diag, &p.off, mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    // Eigenvector of the pencil for the eigenvalue `mu` by inverse iteration;
    // returned in the original (unsymmetrized) variables.
    fn eigenvector(p: &Pencil, mu: f64) -> Vec<f64> {
        let n = p.diag.len();
        let shift = mu - 1e-10 * (1.0 + mu.abs());
        let mut x = vec![1.0; n];
        for _ in 0..4 {
            // Thomas algorithm on (T - shift I) y = x
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            let mut b0 = p.diag[0] - shift;
            c[0] = if n > 1 { p.off[0] / b0 } else { 0.0 };
            d[0] = x[0] / b0;
            for i in 1..n {
                b0 = p.diag[i] - shift - p.off[i - 1] * c[i - 1];
                c[i] = if i + 1 < n { p.off[i] / b0 } else { 0.0 };
                d[i] = (x[i] - p.off[i - 1] * d[i - 1]) / b0;
            }
            let mut y = vec![0.0; n];
            y[n - 1] = d[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = d[i] - c[i] * y[i + 1];
            }
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            x = y.into_iter().map(|v| v / norm).collect();
        }
        let v: Vec<f64> = x.iter().zip(&p.mass).map(|(x, m)| x / m.sqrt()).collect();
        let top = v[n - 1];
        v.into_iter().map(|e| e / top).collect()
    }

    fn raw_eigenvalue(&self, lambda: f64, cells: usize, depth: f64) -> Result<f64> {
        Ok(Self::smallest(&self.pencil(lambda, cells, depth)?))
    }

    // Richardson combination of the N- and 2N-cell eigenvalues.
    fn extrapolated_eigenvalue(&self, lambda: f64, depth: f64) -> Result<f64> {
        let coarse = self.raw_eigenvalue(lambda, self.cells, depth)?;
        let fine = self.raw_eigenvalue(lambda, 2 * self.cells, depth)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// Lowest generalized eigenvalue `Λ^ε(λ)`, returned only when it lies
    /// below the continuous spectrum `[ε, ∞)`.
    pub fn lowest_eigenvalue(&self, lambda: f64) -> Result<f64> {
        if !(lambda > self.lambda_floor()) {
            return Err(Error::Domain(format!("λ = {lambda} must exceed -2Γ_inf = {}", self.lambda_floor())));
        }
        let depth = self.depth_for(self.lambda_max().max(lambda));
        let mu = self.extrapolated_eigenvalue(lambda, depth)?;
        if mu >= self.epsilon {
            return Err(Error::NoDiscreteEigenvalue { lowest: mu, threshold: self.epsilon });
        }
        Ok(mu)
    }

    /// Rayleigh quotient of the samples `v` at nodes `p` (any order, p <= 0),
    /// with trapezoidal integrals and midpoint fluxes; `v` must vanish at the deepest node.
    pub fn rayleigh_quotient(&self, lambda: f64, p: &[f64], v: &[f64]) -> Result<f64> {
        if p.len() != v.len() || p.len() < 2 {
            return Err(Error::Domain("rayleigh quotient needs matching samples".into()));
        }
        let mut idx: Vec<usize> = (0..p.len()).collect();
        idx.sort_by(|&i, &j| p[i].total_cmp(&p[j]));
        let (ps, vs): (Vec<f64>, Vec<f64>) = idx.iter().map(|&i| (p[i], v[i])).unzip();
        if *ps.last().unwrap() != 0.0 {
            return Err(Error::Domain("rayleigh quotient needs a sample at p = 0".into()));
        }
        let mut num = -self.g * vs.last().unwrap().powi(2);
        let mut den = 0.0;
        for k in 0..ps.len() - 1 {
            let h = ps[k + 1] - ps[k];
            let am = self.a2(lambda, 0.5 * (ps[k] + ps[k + 1]))?.sqrt();
            num += am.powi(3) * ((vs[k + 1] - vs[k]) / h).powi(2) * h;
            let a0 = self.a2(lambda, ps[k])?.sqrt();
            let a1 = self.a2(lambda, ps[k + 1])?.sqrt();
            num += self.epsilon * 0.5 * h * (a0.powi(3) * vs[k] * vs[k] + a1.powi(3) * vs[k + 1] * vs[k + 1]);
            den += 0.5 * h * (a0 * vs[k] * vs[k] + a1 * vs[k + 1] * vs[k + 1]);
        }
        if den == 0.0 {
            return Err(Error::Domain("rayleigh quotient of the zero function".into()));
        }
        Ok(num / den)
    }

    /// Locates `λ^ε` with `Λ^ε(λ^ε) = -(π/L)²` and the normalized eigenfunction.
    pub fn find_bifurcation_point(&self) -> Result<BifurcationPoint> {
        let target = -self.k().powi(2);
        let floor = self.lambda_floor();
        let lmax = self.lambda_max();
        // bracket with a coarse depth, then refine on the final depth
        let coarse_depth = self.depth_for(lmax);
        let f = |lam: f64, depth: f64| self.extrapolated_eigenvalue(lam, depth).map(|m| m - target);
        let mut lo = floor + 0.1;
        if f(lo, coarse_depth)? >= 0.0 {
            return Err(Error::BifurcationAbsent { lo: floor, hi: lo });
        }
        let mut step = 0.1;
        let mut hi;
        loop {
            step *= 2.0;
            let cand = (floor + step).min(lmax);
            if f(cand, coarse_depth)? >= 0.0 {
                hi = cand;
                break;
            }
            lo = cand;
            if cand >= lmax {
                return Err(Error::BifurcationAbsent { lo: floor, hi: lmax });
            }
        }
        let depth = self.depth_for(hi);
        let (mut flo, mut fhi) = (f(lo, depth)?, f(hi, depth)?);
        // widen if the depth change moved the root outside the bracket
        while flo >= 0.0 && lo > floor + 1e-9 {
            lo = floor + 0.5 * (lo - floor);
            flo = f(lo, depth)?;
        }
        while fhi < 0.0 && hi < lmax {
            hi = (2.0 * hi).min(lmax);
            fhi = f(hi, depth)?;
        }
        if flo >= 0.0 || fhi < 0.0 {
            return Err(Error::BifurcationAbsent { lo: floor, hi: lmax });
        }
        // Illinois regula falsi
        let mut side = 0i32;
        for _ in 0..200 {
            if (hi - lo) <= 1e-12 * hi.abs().max(1.0) {
                break;
            }
            let mut x = (lo * fhi - hi * flo) / (fhi - flo);
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let fx = f(x, depth)?;
            if fx == 0.0 {
                lo = x;
                hi = x;
                break;
            }
            if fx < 0.0 {
                lo = x;
                flo = fx;
                if side == -1 {
                    fhi *= 0.5;
                }
                side = -1;
            } else {
                hi = x;
                fhi = fx;
                if side == 1 {
                    flo *= 0.5;
                }
                side = 1;
            }
        }
        let lambda_star = 0.5 * (lo + hi);
        let cells = 2 * self.cells;
        let pencil = self.pencil(lambda_star, cells, depth)?;
        let mu = Self::smallest(&pencil);
        let v = Self::eigenvector(&pencil, mu);
        let mut p = vec![-depth];
        let mut phi = vec![0.0];
        for (j, vj) in v.into_iter().enumerate() {
            p.push(if j + 1 == cells { 0.0 } else { -depth + (j + 1) as f64 * pencil.h });
            phi.push(vj);
        }
        Ok(BifurcationPoint { epsilon: self.epsilon, lambda_star, p, phi, mu: target })
    }
}

/// Closed-form `λ^ε` for zero vorticity: the positive root of `ελ³ + (π/L)²λ² = g²`.
pub fn irrotational_lambda(epsilon: f64, g: f64, half_period: f64) -> f64 {
    let k2 = (PI / half_period).powi(2);
    let f = |l: f64| epsilon * l * l * l + k2 * l * l - g * g;
    let (mut lo, mut hi) = (0.0, g / k2.sqrt() + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}
