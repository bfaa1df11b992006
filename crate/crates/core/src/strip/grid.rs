use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which part of the period the grid covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `q ∈ [-L, 0]`, evenness imposed by reflection at both ends.
    #[default]
    Half,
    /// `q ∈ [-L, L)` periodic, with explicit evenness rows for `q > 0`.
    Full,
}

/// Uniform grid on the truncated strip `[-L, 0] × [-P, 0]` (or the full period).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripGrid {
    #[serde(rename = "L")]
    pub half_period: f64,
    #[serde(rename = "P")]
    pub depth: f64,
    pub nq: usize,
    pub np: usize,
    #[serde(default)]
    pub domain: Domain,
}

impl StripGrid {
    pub fn new(half_period: f64, depth: f64, nq: usize, np: usize) -> Result<Self> {
        let g = Self { half_period, depth, nq, np, domain: Domain::Half };
        g.validate()?;
        Ok(g)
    }

    /// Full-period grid with `nq` nodes per period (`nq` even so `q = 0` is a node).
    pub fn full(half_period: f64, depth: f64, nq: usize, np: usize) -> Result<Self> {
        let g = Self { half_period, depth, nq, np, domain: Domain::Full };
        g.validate()?;
        Ok(g)
    }

    /// Depth `max(4L, 20 √λ L / π)`, about twenty decay lengths of the first mode.
    pub fn default_depth(half_period: f64, lambda: f64) -> f64 {
        (4.0 * half_period).max(20.0 * lambda.max(0.0).sqrt() * half_period / PI)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_period > 0.0 && self.depth > 0.0) {
            return Err(Error::Grid("L and P must be positive".into()));
        }
        if self.nq < 8 || self.np < 8 {
            return Err(Error::Grid(format!("need nq, np >= 8 (got {} x {})", self.nq, self.np)));
        }
        if self.domain == Domain::Full && !self.nq.is_multiple_of(2) {
            return Err(Error::Grid("full-period grids need an even nq".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dq(&self) -> f64 {
        match self.domain {
            Domain::Half => self.half_period / (self.nq - 1) as f64,
            Domain::Full => 2.0 * self.half_period / self.nq as f64,
        }
    }

    pub fn dp(&self) -> f64 {
        self.depth / (self.np - 1) as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        -self.half_period + i as f64 * self.dq()
    }

    pub fn p(&self, j: usize) -> f64 {
        if j + 1 == self.np {
            0.0
        } else {
            -self.depth + j as f64 * self.dp()
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nq + i
    }

    /// Column index of the crest `q = 0`.
    pub fn crest(&self) -> usize {
        match self.domain {
            Domain::Half => self.nq - 1,
            Domain::Full => self.nq / 2,
        }
    }

    /// Column index of the trough `q = -L`.
    pub fn trough(&self) -> usize {
        0
    }

    /// Neighbor column `i + di` with the domain's boundary treatment.
    #[inline]
    pub fn shift(&self, i: usize, di: isize) -> usize {
        let n = self.nq as isize;
        let k = i as isize + di;
        match self.domain {
            Domain::Half => {
                let m = n - 1;
                let mut k = k;
                if k < 0 {
                    k = -k;
                }
                if k > m {
                    k = 2 * m - k;
                }
                k as usize
            }
            Domain::Full => k.rem_euclid(n) as usize,
        }
    }

    /// For full grids, the mirror column of a node with `q > 0`.
    pub fn mirror_of(&self, i: usize) -> Option<usize> {
        match self.domain {
            Domain::Full if i > self.nq / 2 => Some(self.nq - i),
            _ => None,
        }
    }

    /// Columns on `[-L, 0]` (all of them for half grids).
    pub fn half_columns(&self) -> usize {
        match self.domain {
            Domain::Half => self.nq,
            Domain::Full => self.nq / 2 + 1,
        }
    }

    /// Same physical grid with the other domain type.
    pub fn with_domain(&self, domain: Domain) -> Self {
        let half_nodes = self.half_columns();
        let nq = match domain {
            Domain::Half => half_nodes,
            Domain::Full => 2 * (half_nodes - 1),
        };
        Self { nq, domain, ..*self }
    }
}

/// One point `(λ, w)` in hodograph variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    pub lambda: f64,
    pub epsilon: f64,
    pub grid: StripGrid,
    /// Row-major samples, `w[j * nq + i]` at `(q_i, p_j)`.
    pub w: Vec<f64>,
}

impl WaveState {
    pub fn trivial(grid: StripGrid, lambda: f64, epsilon: f64) -> Self {
        Self { lambda, epsilon, grid, w: vec![0.0; grid.len()] }
    }

    /// Samples `f(q, p)` on the grid; the bottom row is set to zero.
    pub fn from_fn(grid: StripGrid, lambda: f64, epsilon: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut w = vec![0.0; grid.len()];
        for j in 1..grid.np {
            for i in 0..grid.nq {
                w[grid.idx(i, j)] = f(grid.q(i), grid.p(j));
            }
        }
        Self { lambda, epsilon, grid, w }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.w[self.grid.idx(i, j)]
    }

    /// Surface trace `w(q_i, 0)` over the columns in `[-L, 0]`.
    pub fn surface(&self) -> Vec<(f64, f64)> {
        let top = self.grid.np - 1;
        (0..self.grid.half_columns()).map(|i| (self.grid.q(i), self.at(i, top))).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.w.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_trivial(&self) -> bool {
        self.w.iter().all(|v| *v == 0.0)
    }

    /// Copy on the reduced half grid (full grids drop the `q > 0` columns).
    pub fn to_half(&self) -> Self {
        if self.grid.domain == Domain::Half {
            return self.clone();
        }
        let half = self.grid.with_domain(Domain::Half);
        let mut w = vec![0.0; half.len()];
        for j in 0..half.np {
            for i in 0..half.nq {
                w[half.idx(i, j)] = self.at(i, j);
            }
        }
        Self { lambda: self.lambda, epsilon: self.epsilon, grid: half, w }
    }

    /// Copy on the full period, reflecting the half-grid samples.
    pub fn to_full(&self) -> Self {
        if self.grid.domain == Domain::Full {
            return self.clone();
        }
        let full = self.grid.with_domain(Domain::Full);
        let mut w = vec![0.0; full.len()];
        for j in 0..full.np {
            for i in 0..full.nq {
                let src = full.mirror_of(i).unwrap_or(i);
                w[full.idx(i, j)] = self.at(src, j);
            }
        }
        Self { lambda: self.lambda, epsilon: self.epsilon, grid: full, w }
    }

    /// Surface trace shifted by half a period, `q ↦ q + L`, on the half grid.
    pub fn half_period_shift(&self) -> Self {
        let half = self.to_half();
        let n = half.grid.nq;
        let mut w = half.w.clone();
        for j in 0..half.grid.np {
            for i in 0..n {
                // q_i + L reflects to column n - 1 - i by evenness
                w[half.grid.idx(i, j)] = half.at(n - 1 - i, j);
            }
        }
        Self { w, ..half }
    }

    /// Signed first-cosine coefficient of the surface trace,
    /// `(2/L) ∫_{-L}^0 w(q, 0) cos(πq/L) dq` by the trapezoid rule.
    pub fn amplitude(&self) -> f64 {
        let (weights, _) = amplitude_weights(&self.grid);
        let top = self.grid.np - 1;
        weights.iter().enumerate().map(|(i, c)| c * self.at(i, top)).sum()
    }
}

/// Trapezoid weights `c_i` such that the amplitude is `Σ c_i w(q_i, 0)`, and the
/// matching row index.
pub fn amplitude_weights(grid: &StripGrid) -> (Vec<f64>, usize) {
    let n = grid.half_columns();
    let dq = grid.dq();
    let l = grid.half_period;
    let c = (0..n)
        .map(|i| {
            let trap = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            2.0 / l * trap * dq * (PI * grid.q(i) / l).cos()
        })
        .collect();
    (c, grid.np - 1)
}
