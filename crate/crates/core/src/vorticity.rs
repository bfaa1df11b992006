//! Vorticity functions γ(r) and the scalar functionals derived from them.
//!
//! The vorticity is a function of the stream function; in hodograph
//! variables the argument is `r = -p >= 0`. The primitive used throughout is
//! `Γ(p) = ∫₀^p γ(-p') dp'` for `p <= 0`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::quadrature::{integrate, integrate_to_neg_infinity};

const QUAD_TOL: f64 = 1e-13;

/// User-supplied depth map `b(r)` for Gerstner vorticity.
#[derive(Clone)]
pub struct DepthMap(pub Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl fmt::Debug for DepthMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("DepthMap(<fn>)")
    }
}

#[derive(Debug, Clone)]
pub enum VorticityKind {
    Zero,
    /// `γ(r) = amplitude · exp(-rate · r)`.
    ExpDecay { amplitude: f64, rate: f64 },
    /// `γ(r) = -2m² e^{2b(r)} / (1 - m² e^{2b(r)})`; `b = None` uses `b(r) = -1 - r`.
    Gerstner { m: f64, b: Option<DepthMap> },
    /// Monotone cubic through `(r, γ(r))` knots, zero beyond the last knot.
    Tabulated { table: MonotoneCubic },
}

/// An admissible vorticity function together with its decay exponent ρ
/// (`γ(r) = O(r^{-2-2ρ})`).
#[derive(Debug, Clone)]
pub struct VorticityModel {
    pub kind: VorticityKind,
    pub rho: f64,
    /// Absolute and relative tolerance of the adaptive quadratures for `Γ` and `h_tr`.
    pub quad_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VorticityFunctionals {
    /// `inf_{p<=0} Γ(p)`
    pub gamma_inf_bound: f64,
    /// `sup_{p<=0} Γ(p)`
    pub gamma_sup_bound: f64,
    /// `Γ(-∞)`
    pub gamma_total: f64,
}

/// Hypotheses of the pressure and velocity estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignClass {
    /// `γ >= 0` and `γ' <= 0`
    pub nonneg_nonincreasing: bool,
    /// `γ <= 0` and `γ' >= 0`
    pub nonpos_nondecreasing: bool,
    /// `γ <= 0`
    pub nonpositive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationCondition {
    pub holds: bool,
    pub integral: f64,
    /// `g - integral`
    pub margin: f64,
}

impl VorticityModel {
    pub fn zero() -> Self {
        Self { kind: VorticityKind::Zero, rho: 1.0, quad_tol: QUAD_TOL }
    }

    pub fn exp_decay(amplitude: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !amplitude.is_finite() {
            return Err(Error::Model(format!("exponential vorticity needs rate > 0 (got {rate})")));
        }
        Ok(Self { kind: VorticityKind::ExpDecay { amplitude, rate }, rho: 1.0, quad_tol: QUAD_TOL })
    }

    pub fn gerstner(m: f64) -> Result<Self> {
        Self::check_m(m)?;
        Ok(Self { kind: VorticityKind::Gerstner { m, b: None }, rho: 1.0, quad_tol: QUAD_TOL })
    }

    /// Gerstner vorticity with a custom depth map; `b` must be negative on `[0, ∞)`.
    pub fn gerstner_with(m: f64, b: DepthMap) -> Result<Self> {
        Self::check_m(m)?;
        for k in 0..200 {
            let r = k as f64 * 0.25;
            let v = (b.0)(r);
            if !(v < 0.0) {
                return Err(Error::Model(format!("Gerstner depth map must be negative, b({r}) = {v}")));
            }
        }
        Ok(Self { kind: VorticityKind::Gerstner { m, b: Some(b) }, rho: 1.0, quad_tol: QUAD_TOL })
    }

    /// Tabulated vorticity; the first knot must sit at `r = 0` and the last
    /// knot value must be zero so the clamped tail stays C¹.
    pub fn tabulated(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Model("tabulated vorticity needs at least two knots".into()));
        }
        if knots[0].0 != 0.0 {
            return Err(Error::Model("tabulated vorticity must start at r = 0".into()));
        }
        if knots.last().unwrap().1 != 0.0 {
            return Err(Error::Model("tabulated vorticity must vanish at the last knot".into()));
        }
        let (x, y): (Vec<f64>, Vec<f64>) = knots.iter().copied().unzip();
        let table = MonotoneCubic::new(x, y).map_err(|e| Error::Model(e.to_string()))?.with_last_slope(0.0);
        Ok(Self { kind: VorticityKind::Tabulated { table }, rho: 1.0, quad_tol: QUAD_TOL })
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Model(format!("quadrature tolerance must be positive, got {tol}")));
        }
        self.quad_tol = tol;
        Ok(self)
    }

    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::Model(format!("decay exponent must be positive, got {rho}")));
        }
        self.rho = rho;
        Ok(self)
    }

    /// Same model with γ multiplied by `t` (Gerstner only supports `t = 1`).
    pub fn scaled(&self, t: f64) -> Result<Self> {
        let kind = match &self.kind {
            VorticityKind::Zero => VorticityKind::Zero,
            VorticityKind::ExpDecay { amplitude, rate } => VorticityKind::ExpDecay { amplitude: amplitude * t, rate: *rate },
            VorticityKind::Tabulated { table } => {
                let y = table.values().iter().map(|v| v * t).collect();
                VorticityKind::Tabulated {
                    table: MonotoneCubic::new(table.knots().to_vec(), y)?.with_last_slope(0.0),
                }
            }
            VorticityKind::Gerstner { .. } if t == 1.0 => self.kind.clone(),
            VorticityKind::Gerstner { .. } => return Err(Error::Model("Gerstner vorticity cannot be rescaled".into())),
        };
        Ok(Self { kind, rho: self.rho, quad_tol: self.quad_tol })
    }

    fn check_m(m: f64) -> Result<()> {
        if !(0.0..1.0).contains(&m) {
            return Err(Error::Model(format!("Gerstner parameter m must lie in [0, 1), got {m}")));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            VorticityKind::Zero => true,
            VorticityKind::ExpDecay { amplitude, .. } => *amplitude == 0.0,
            VorticityKind::Gerstner { m, .. } => *m == 0.0,
            VorticityKind::Tabulated { table } => table.values().iter().all(|v| *v == 0.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            VorticityKind::Zero => "zero",
            VorticityKind::ExpDecay { .. } => "exp_decay",
            VorticityKind::Gerstner { .. } => "gerstner",
            VorticityKind::Tabulated { .. } => "tabulated",
        }
    }

    fn gerstner_u(m: f64, b: &Option<DepthMap>, r: f64) -> f64 {
        let br = match b {
            None => -1.0 - r,
            Some(f) => (f.0)(r),
        };
        m * m * (2.0 * br).exp()
    }

    /// γ(r) for `r >= 0`.
    pub fn gamma(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("vorticity argument must be nonnegative, got {r}")));
        }
        Ok(self.gamma_unchecked(r))
    }

    pub(crate) fn gamma_unchecked(&self, r: f64) -> f64 {
        match &self.kind {
            VorticityKind::Zero => 0.0,
            VorticityKind::ExpDecay { amplitude, rate } => amplitude * (-rate * r).exp(),
            VorticityKind::Gerstner { m, b } => {
                let u = Self::gerstner_u(*m, b, r);
                -2.0 * u / (1.0 - u)
            }
            VorticityKind::Tabulated { table } => {
                let last = *table.knots().last().unwrap();
                if r >= last {
                    0.0
                } else {
                    table.eval(r)
                }
            }
        }
    }

    /// γ'(r) for `r >= 0`.
    pub fn gamma_prime(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("vorticity argument must be nonnegative, got {r}")));
        }
        Ok(match &self.kind {
            VorticityKind::Zero => 0.0,
            VorticityKind::ExpDecay { amplitude, rate } => -rate * amplitude * (-rate * r).exp(),
            VorticityKind::Gerstner { m, b: None } => {
                // du/dr = -2u, dγ/du = -2/(1-u)²
                let u = Self::gerstner_u(*m, &None, r);
                4.0 * u / ((1.0 - u) * (1.0 - u))
            }
            VorticityKind::Gerstner { .. } => {
                let h = 1e-5 * (1.0 + r);
                let lo = (r - h).max(0.0);
                (self.gamma_unchecked(r + h) - self.gamma_unchecked(lo)) / (r + h - lo)
            }
            VorticityKind::Tabulated { table } => {
                if r >= *table.knots().last().unwrap() {
                    0.0
                } else {
                    table.deriv(r)
                }
            }
        })
    }

    /// `Γ(p) = ∫₀^p γ(-p') dp'` for `p <= 0`; `Γ(0) = 0` exactly.
    pub fn big_gamma(&self, p: f64) -> Result<f64> {
        if !(p <= 0.0) {
            return Err(Error::Domain(format!("Γ(p) is defined for p <= 0, got {p}")));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        Ok(match &self.kind {
            VorticityKind::Zero => 0.0,
            VorticityKind::ExpDecay { amplitude, rate } => amplitude / rate * (rate * p).exp_m1(),
            VorticityKind::Gerstner { m, b: None } => {
                let u0 = Self::gerstner_u(*m, &None, 0.0);
                let u = Self::gerstner_u(*m, &None, -p);
                ((1.0 - u) / (1.0 - u0)).ln()
            }
            VorticityKind::Gerstner { .. } => integrate(|t| self.gamma_unchecked(-t), 0.0, p, self.quad_tol, self.quad_tol)?,
            VorticityKind::Tabulated { table } => -table.integral_from_start(-p),
        })
    }

    /// `Γ(-∞)`.
    pub fn gamma_total(&self) -> Result<f64> {
        Ok(match &self.kind {
            VorticityKind::Zero => 0.0,
            VorticityKind::ExpDecay { amplitude, rate } => -amplitude / rate,
            VorticityKind::Gerstner { m, b: None } => -(1.0 - Self::gerstner_u(*m, &None, 0.0)).ln(),
            VorticityKind::Gerstner { .. } => -integrate_to_neg_infinity(|t| self.gamma_unchecked(-t), self.quad_tol)?,
            VorticityKind::Tabulated { table } => -table.integral_from_start(*table.knots().last().unwrap()),
        })
    }

    /// Γ_inf, Γ_sup and Γ_∞.
    pub fn functionals(&self) -> Result<VorticityFunctionals> {
        let total = self.gamma_total()?;
        let (inf, sup) = match &self.kind {
            VorticityKind::Zero => (0.0, 0.0),
            // monotone Γ: extremes are Γ(0)=0 and Γ(-∞)
            VorticityKind::ExpDecay { .. } | VorticityKind::Gerstner { b: None, .. } => (total.min(0.0), total.max(0.0)),
            _ => self.sampled_extremes(total)?,
        };
        Ok(VorticityFunctionals { gamma_inf_bound: inf, gamma_sup_bound: sup, gamma_total: total })
    }

    fn sampled_extremes(&self, total: f64) -> Result<(f64, f64)> {
        let depth = match &self.kind {
            VorticityKind::Tabulated { table } => *table.knots().last().unwrap(),
            _ => 60.0,
        };
        let n = 4000;
        let ps: Vec<f64> = (0..=n).map(|k| -depth * k as f64 / n as f64).collect();
        let vals = ps.iter().map(|&p| self.big_gamma(p)).collect::<Result<Vec<_>>>()?;
        let mut inf = total.min(0.0);
        let mut sup = total.max(0.0);
        let (imin, _) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let (imax, _) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let h = depth / n as f64;
        inf = inf.min(self.refine_extreme(ps[imin], h, 1.0)?);
        sup = sup.max(self.refine_extreme(ps[imax], h, -1.0)?);
        Ok((inf, sup))
    }

    // Golden-section refinement of sign·Γ around `p0` within one sample spacing.
    fn refine_extreme(&self, p0: f64, h: f64, sign: f64) -> Result<f64> {
        let mut a = (p0 - h).min(0.0);
        let mut b = (p0 + h).min(0.0);
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let f = |p: f64| self.big_gamma(p).map(|v| sign * v);
        let mut best = f(p0)?;
        for _ in 0..60 {
            let c = b - ratio * (b - a);
            let d = a + ratio * (b - a);
            let (fc, fd) = (f(c)?, f(d)?);
            best = best.min(fc).min(fd);
            if fc < fd {
                b = d;
            } else {
                a = c;
            }
        }
        Ok(sign * best)
    }

    /// Which sign/monotonicity hypotheses γ satisfies on `[0, ∞)`.
    pub fn sign_class(&self) -> SignClass {
        let (nonneg_nonincreasing, nonpos_nondecreasing, nonpositive) = match &self.kind {
            VorticityKind::Zero => (true, true, true),
            VorticityKind::ExpDecay { amplitude, .. } => (*amplitude >= 0.0, *amplitude <= 0.0, *amplitude <= 0.0),
            VorticityKind::Gerstner { m, b: None } => (*m == 0.0, true, true),
            _ => {
                let depth = match &self.kind {
                    VorticityKind::Tabulated { table } => *table.knots().last().unwrap(),
                    _ => 60.0,
                };
                let rs: Vec<f64> = (0..=2000).map(|k| depth * k as f64 / 2000.0).collect();
                let g: Vec<f64> = rs.iter().map(|&r| self.gamma_unchecked(r)).collect();
                let gp: Vec<f64> = rs.iter().map(|&r| self.gamma_prime(r).unwrap_or(f64::NAN)).collect();
                let tol = 1e-12 * g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                let nonpositive = g.iter().all(|v| *v <= tol);
                (
                    g.iter().all(|v| *v >= -tol) && gp.iter().all(|v| *v <= tol),
                    nonpositive && gp.iter().all(|v| *v >= -tol),
                    nonpositive,
                )
            }
        };
        SignClass { nonneg_nonincreasing, nonpos_nondecreasing, nonpositive }
    }

    /// Evaluates `∫_{-∞}^0 (2(2Γ-2Γ_inf)^{3/2} + (π/L)²(2Γ-2Γ_inf)^{1/2}) e^{2p} dp`
    /// and compares it with `g`.
    pub fn check_bifurcation_condition(&self, g: f64, half_period: f64) -> Result<BifurcationCondition> {
        let fun = self.functionals()?;
        let k2 = (std::f64::consts::PI / half_period).powi(2);
        let integral = if self.is_zero() {
            0.0
        } else {
            let integrand = |p: f64| {
                let s = (2.0 * self.big_gamma(p).unwrap_or(f64::NAN) - 2.0 * fun.gamma_inf_bound).max(0.0);
                (2.0 * s.powf(1.5) + k2 * s.sqrt()) * (2.0 * p).exp()
            };
            integrate_to_neg_infinity(integrand, 1e-12)?
        };
        if !integral.is_finite() {
            return Err(Error::Quadrature { what: "bifurcation condition integral".into(), achieved: f64::NAN });
        }
        Ok(BifurcationCondition { holds: integral < g, integral, margin: g - integral })
    }
}
