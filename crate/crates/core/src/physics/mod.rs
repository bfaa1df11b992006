//! Physical variables `(c, η, ψ, P)` recovered from a hodograph state, and the
//! checks of the velocity, pressure and shape bounds a solution must satisfy.

mod verify;

pub use verify::{
    verify_amplitude_speed, verify_bernoulli, verify_decay, verify_nodal, verify_pressure, verify_state,
    verify_velocity_bounds, Check, DecayReport, Report, Skipped, StateReport, VerifyOptions,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::shear_flow::{wave_speed, ShearFlow};
use crate::strip::{node_derivs, StripProblem, WaveState};

/// Physical fields sampled at the hodograph nodes of the half period `x ∈ [-L, 0]`.
///
/// Node `(i, j)` sits at `x = q_i`, `y = h_tr(p_j) + w(q_i, p_j)` and carries
/// `ψ = -p_j`. Fields are row-major like [`WaveState::w`].
#[derive(Debug, Clone, Serialize)]
pub struct PhysicalWave {
    pub c: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub g: f64,
    pub nq: usize,
    pub np: usize,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub y: Vec<f64>,
    pub psi_x: Vec<f64>,
    pub psi_y: Vec<f64>,
    /// `Γ(p_j)`
    pub big_gamma: Vec<f64>,
    /// `γ(-p_j) = γ(ψ)`
    pub gamma: Vec<f64>,
    /// `P - P_atm = -½|∇ψ|² - gy + Γ(-ψ)`
    pub pressure: Vec<f64>,
    /// `(x, η(x))` over `[-L, L]`.
    pub eta: Vec<(f64, f64)>,
    pub error: DerivativeError,
    #[serde(skip)]
    pub source: WaveState,
}

/// Discretization error estimates of the reconstructed velocities, from
/// comparing the difference quotients with their doubled-step counterparts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DerivativeError {
    pub psi_x: f64,
    pub psi_y: f64,
    /// of `|∇ψ|²`
    pub speed2: f64,
}

/// Tensor `x`-`y` resampling of the fluid region for plotting.
#[derive(Debug, Clone, Serialize)]
pub struct FieldSamples {
    /// `(x, y, ψ, ψ_x, ψ_y, P)` for every sample below the surface.
    pub rows: Vec<[f64; 6]>,
}

impl PhysicalWave {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nq + i
    }

    pub fn top(&self) -> usize {
        self.np - 1
    }

    /// Column of the crest, `x = 0`.
    pub fn crest(&self) -> usize {
        self.nq - 1
    }

    /// Column of the trough, `x = -L`.
    pub fn trough(&self) -> usize {
        0
    }

    pub fn psi(&self, j: usize) -> f64 {
        -self.p[j]
    }

    pub fn speed2(&self, i: usize, j: usize) -> f64 {
        let k = self.idx(i, j);
        self.psi_x[k] * self.psi_x[k] + self.psi_y[k] * self.psi_y[k]
    }

    /// `B = ½|∇ψ|² + gy - Γ(-ψ)`, the negative of the pressure.
    pub fn bernoulli_function(&self, i: usize, j: usize) -> f64 {
        -self.pressure[self.idx(i, j)]
    }

    /// `η` at the crest and at the trough.
    pub fn crest_trough(&self) -> (f64, f64) {
        let top = self.top();
        (self.y[self.idx(self.crest(), top)], self.y[self.idx(self.trough(), top)])
    }

    /// Smallest relative speed `|∇ψ|` and the region where it occurs
    /// (`"crest"`, `"surface"` or `"depth"`).
    pub fn min_relative_speed(&self) -> (f64, &'static str) {
        let mut best = (f64::INFINITY, 0, 0);
        for j in 0..self.np {
            for i in 0..self.nq {
                let s = self.speed2(i, j);
                if s < best.0 {
                    best = (s, i, j);
                }
            }
        }
        let place = if best.2 == self.top() {
            if best.1 == self.crest() {
                "crest"
            } else {
                "surface"
            }
        } else {
            "depth"
        };
        (best.0.sqrt(), place)
    }

    /// Resamples the fluid region on the node columns mirrored to `[-L, L]` and
    /// `ny` uniform levels between the truncation depth and the crest, keeping
    /// samples strictly below the surface.
    pub fn resample(&self, ny: usize) -> Result<FieldSamples> {
        if ny < 2 {
            return Err(Error::Grid("resampling needs at least two levels".into()));
        }
        let top = self.top();
        let y_lo = (0..self.nq).map(|i| self.y[self.idx(i, 0)]).fold(f64::INFINITY, f64::min);
        let y_hi = self.crest_trough().0;
        let levels: Vec<f64> = (0..ny).map(|k| y_lo + (y_hi - y_lo) * k as f64 / (ny - 1) as f64).collect();
        let mut columns = Vec::with_capacity(self.nq);
        for i in 0..self.nq {
            let ys: Vec<f64> = (0..self.np).map(|j| self.y[self.idx(i, j)]).collect();
            let js: Vec<f64> = (0..self.np).map(|j| j as f64).collect();
            let inv = MonotoneCubic::new(ys, js)
                .map_err(|_| Error::Stagnation(format!("height is not increasing in p on column {i}")))?;
            let mut col = Vec::new();
            for &y in &levels {
                if y < self.y[self.idx(i, 0)] || y >= self.y[self.idx(i, top)] {
                    continue;
                }
                let t = inv.eval(y).clamp(0.0, top as f64);
                let j0 = (t.floor() as usize).min(top - 1);
                let f = t - j0 as f64;
                let lerp = |v: &[f64]| (1.0 - f) * v[self.idx(i, j0)] + f * v[self.idx(i, j0 + 1)];
                let p = (1.0 - f) * self.p[j0] + f * self.p[j0 + 1];
                col.push([y, -p, lerp(&self.psi_x), lerp(&self.psi_y), lerp(&self.pressure)]);
            }
            columns.push(col);
        }
        let mut rows = Vec::new();
        // x in [-L, 0] then the mirror image on (0, L]; ψ_x is odd in x
        for (i, col) in columns.iter().enumerate() {
            for v in col {
                rows.push([self.x[i], v[0], v[1], v[2], v[3], v[4]]);
            }
        }
        for i in (0..self.nq - 1).rev() {
            for v in &columns[i] {
                rows.push([-self.x[i], v[0], v[1], -v[2], v[3], v[4]]);
            }
        }
        Ok(FieldSamples { rows })
    }
}

/// Maps a hodograph state to physical variables:
/// `c² = λ + 2Γ_∞`, `η = w(x, 0) - λ/2g`, `ψ_x = -w_q/h_p`, `ψ_y = -1/h_p`
/// with `h_p = a^{-1} + w_p`.
pub fn reconstruct(problem: &StripProblem, state: &WaveState) -> Result<PhysicalWave> {
    let state = state.to_half();
    let grid = state.grid;
    if grid.with_domain(problem.grid.domain) != problem.grid.with_domain(grid.domain) {
        return Err(Error::Grid("state grid does not match the problem grid".into()));
    }
    let g = problem.g;
    let lam = state.lambda;
    let c = wave_speed(lam, &problem.functionals)?;
    let flow = ShearFlow::with_functionals(&problem.model, problem.functionals, lam)?;
    let rows = problem.row_coeffs(lam)?;
    let (nq, np) = (grid.nq, grid.np);
    let x: Vec<f64> = (0..nq).map(|i| grid.q(i)).collect();
    let p: Vec<f64> = (0..np).map(|j| grid.p(j)).collect();
    let h_tr = p.iter().map(|&pj| flow.h_trivial(pj, g)).collect::<Result<Vec<_>>>()?;
    let big_gamma = p.iter().map(|&pj| problem.model.big_gamma(pj)).collect::<Result<Vec<_>>>()?;
    let gamma: Vec<f64> = rows.iter().map(|r| r.gamma).collect();

    let n = grid.len();
    let (mut y, mut psi_x, mut psi_y, mut pressure) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut e_wq, mut e_wp, mut max_wq, mut min_hp) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    for j in 0..np {
        for i in 0..nq {
            let d = node_derivs(&state, i, j);
            let hp = rows[j].ainv + d.wp;
            if !(hp > 0.0) {
                return Err(Error::Stagnation(format!("h_p = {hp:.3e} <= 0 at node ({i}, {j}); column is not monotone")));
            }
            let k = grid.idx(i, j);
            y[k] = h_tr[j] + d.w;
            psi_x[k] = -d.wq / hp;
            psi_y[k] = -1.0 / hp;
            let speed2 = psi_x[k] * psi_x[k] + psi_y[k] * psi_y[k];
            pressure[k] = -0.5 * speed2 - g * y[k] + big_gamma[j];
            let (cq, cp) = coarse_derivs(&state, i, j);
            e_wq = e_wq.max((d.wq - cq).abs() / 3.0);
            if let Some(cp) = cp {
                e_wp = e_wp.max((d.wp - cp).abs() / 3.0);
            }
            max_wq = max_wq.max(d.wq.abs());
            min_hp = min_hp.min(hp);
        }
    }
    let e_psi_y = e_wp / (min_hp * min_hp);
    let e_psi_x = e_wq / min_hp + max_wq * e_wp / (min_hp * min_hp);
    let max_psi_x = psi_x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let error = DerivativeError {
        psi_x: e_psi_x,
        psi_y: e_psi_y,
        speed2: 2.0 * max_psi_x * e_psi_x + 2.0 / min_hp * e_psi_y,
    };

    let top = np - 1;
    let mut eta: Vec<(f64, f64)> = (0..nq).map(|i| (x[i], y[grid.idx(i, top)])).collect();
    for i in (0..nq - 1).rev() {
        eta.push((-x[i], y[grid.idx(i, top)]));
    }
    Ok(PhysicalWave {
        c,
        lambda: lam,
        epsilon: state.epsilon,
        g,
        nq,
        np,
        x,
        p,
        y,
        psi_x,
        psi_y,
        big_gamma,
        gamma,
        pressure,
        eta,
        error,
        source: state,
    })
}

// Doubled-step versions of w_q and w_p at (i, j); w_p is None where the wide
// stencil leaves the grid.
fn coarse_derivs(state: &WaveState, i: usize, j: usize) -> (f64, Option<f64>) {
    let gr = &state.grid;
    let (dq, dp) = (gr.dq(), gr.dp());
    let w = |i: usize, j: usize| state.w[gr.idx(i, j)];
    let (im, ip) = (gr.shift(gr.shift(i, -1), -1), gr.shift(gr.shift(i, 1), 1));
    let wq = (w(ip, j) - w(im, j)) / (4.0 * dq);
    let top = gr.np - 1;
    let wp = if j == top && j >= 4 {
        Some((3.0 * w(i, j) - 4.0 * w(i, j - 2) + w(i, j - 4)) / (4.0 * dp))
    } else if j >= 2 && j + 2 <= top {
        Some((w(i, j + 2) - w(i, j - 2)) / (4.0 * dp))
    } else {
        None
    };
    (wq, wp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strip::StripGrid;
    use crate::vorticity::VorticityModel;
    use std::f64::consts::PI;

    fn problem(model: VorticityModel) -> StripProblem {
        StripProblem::new(&model, 9.81, 1e-3, StripGrid::new(PI, 30.0, 17, 61).unwrap()).unwrap()
    }

    #[test]
    fn trivial_irrotational_flow() {
        let pb = problem(VorticityModel::zero());
        let st = WaveState::trivial(pb.grid, 4.0, 0.0);
        let wave = reconstruct(&pb, &st).unwrap();
        assert_eq!(wave.c, 2.0);
        for (_, e) in &wave.eta {
            assert!((e + 0.203874).abs() < 1e-6);
            assert_eq!(*e, -4.0 / 19.62);
        }
        assert!(wave.psi_y.iter().all(|v| (v + 2.0).abs() < 1e-15));
        assert!(wave.psi_x.iter().all(|v| *v == 0.0));
        assert_eq!(wave.min_relative_speed().0, 2.0);
    }

    #[test]
    fn trivial_surface_pressure_is_atmospheric() {
        for model in [VorticityModel::zero(), VorticityModel::exp_decay(0.8, 1.5).unwrap(), VorticityModel::gerstner(0.7).unwrap()] {
            let pb = problem(model);
            let st = WaveState::trivial(pb.grid, 6.0, 0.01);
            let wave = reconstruct(&pb, &st).unwrap();
            let top = wave.top();
            for i in 0..wave.nq {
                assert!(wave.pressure[wave.idx(i, top)].abs() < 1e-13);
            }
            // below the flat surface B = g (y - η)
            let eta = wave.eta[0].1;
            for j in 0..top {
                let b = wave.bernoulli_function(3, j);
                let y = wave.y[wave.idx(3, j)];
                assert!((b - 9.81 * (y - eta)).abs() < 1e-9 * (1.0 + b.abs()), "{b} vs {}", 9.81 * (y - eta));
            }
        }
    }

    #[test]
    fn nodes_follow_hodograph_heights() {
        let pb = problem(VorticityModel::zero());
        let st = WaveState::from_fn(pb.grid, 9.0, 0.0, |q, p| 0.01 * (p / 3.0).exp() * q.cos());
        let wave = reconstruct(&pb, &st).unwrap();
        let top = wave.top();
        for i in 0..wave.nq {
            let expected = st.at(i, top) - 9.0 / 19.62;
            assert!((wave.y[wave.idx(i, top)] - expected).abs() < 1e-15);
        }
        assert_eq!(wave.eta.len(), 2 * wave.nq - 1);
        let (crest, trough) = wave.crest_trough();
        assert!(crest > trough);
        // ψ_x odd, ψ_y even under the reflection used for resampling
        let samples = wave.resample(40).unwrap();
        assert!(samples.rows.iter().all(|r| r[4] < 0.0));
        let pick = |x: f64| samples.rows.iter().find(|r| (r[0] - x).abs() < 1e-12 && r[1] < -3.0).copied().unwrap();
        let (a, b) = (pick(-wave.x[5]), pick(wave.x[5]));
        assert_eq!(a[1], b[1]);
        assert_eq!(a[3], -b[3]);
    }

    #[test]
    fn rejects_non_monotone_columns() {
        let pb = problem(VorticityModel::zero());
        let mut st = WaveState::trivial(pb.grid, 9.0, 0.0);
        let top = pb.grid.np - 1;
        st.w[pb.grid.idx(4, top)] = -1.0;
        assert!(matches!(reconstruct(&pb, &st), Err(Error::Stagnation(_))));
    }
}
