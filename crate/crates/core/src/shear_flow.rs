//! Trivial flat-surface shear flows and the coefficient `a(p; λ) = (λ + 2Γ(p))^{1/2}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::vorticity::{VorticityFunctionals, VorticityKind, VorticityModel};

/// A trivial solution `h_tr(p; λ)` of the strip problem.
#[derive(Debug, Clone)]
pub struct ShearFlow {
    pub lambda: f64,
    pub model: VorticityModel,
    pub functionals: VorticityFunctionals,
    /// `c = (λ + 2Γ_∞)^{1/2}`
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrivialSample {
    pub p: f64,
    pub a: f64,
    pub h: f64,
    pub h_p: f64,
    pub h_pp: f64,
}

/// `c = (λ + 2Γ_∞)^{1/2}`.
pub fn wave_speed(lambda: f64, functionals: &VorticityFunctionals) -> Result<f64> {
    let c2 = lambda + 2.0 * functionals.gamma_total;
    if !(c2 > 0.0) {
        return Err(Error::Stagnation(format!("λ + 2Γ_∞ = {c2:.6e} must be positive for a nonzero far-field speed")));
    }
    Ok(c2.sqrt())
}

impl ShearFlow {
    pub fn new(model: &VorticityModel, lambda: f64) -> Result<Self> {
        let functionals = model.functionals()?;
        Self::with_functionals(model, functionals, lambda)
    }

    pub fn with_functionals(model: &VorticityModel, functionals: VorticityFunctionals, lambda: f64) -> Result<Self> {
        if !(lambda + 2.0 * functionals.gamma_inf_bound > 0.0) {
            return Err(Error::Stagnation(format!(
                "λ = {lambda} does not exceed the critical value -2Γ_inf = {}",
                -2.0 * functionals.gamma_inf_bound
            )));
        }
        let c = wave_speed(lambda, &functionals)?;
        Ok(Self { lambda, model: model.clone(), functionals, c })
    }

    /// `a(p; λ)`.
    pub fn a_coeff(&self, p: f64) -> Result<f64> {
        let arg = self.lambda + 2.0 * self.model.big_gamma(p)?;
        if !(arg > 0.0) {
            return Err(Error::Stagnation(format!("λ + 2Γ(p) = {arg:.6e} at p = {p}")));
        }
        Ok(arg.sqrt())
    }

    /// `h_tr(p) = ∫₀^p a^{-1} dp' - λ/(2g)`.
    pub fn h_trivial(&self, p: f64, g: f64) -> Result<f64> {
        if !(p <= 0.0) {
            return Err(Error::Domain(format!("h_tr is defined for p <= 0, got {p}")));
        }
        let offset = -self.lambda / (2.0 * g);
        if p == 0.0 {
            return Ok(offset);
        }
        let lam = self.lambda;
        let integral = match self.model.kind {
            VorticityKind::Zero => p / lam.sqrt(),
            VorticityKind::ExpDecay { amplitude: 0.0, .. } => p / lam.sqrt(),
            VorticityKind::ExpDecay { amplitude, rate } => {
                let beta = 2.0 * amplitude / rate;
                let kappa = lam - beta;
                let sk = kappa.sqrt();
                let log_ratio = |p: f64| {
                    let e = (rate * p).exp();
                    let u = (kappa + beta * e).sqrt();
                    // u - √κ written without cancellation
                    ((beta * e / (u + sk)) / (u + sk)).abs().ln()
                };
                (log_ratio(p) - log_ratio(0.0)) / (rate * sk)
            }
            _ => {
                let f = |t: f64| 1.0 / (lam + 2.0 * self.model.big_gamma(t).unwrap_or(f64::NAN)).sqrt();
                integrate(f, 0.0, p, self.model.quad_tol, self.model.quad_tol)?
            }
        };
        Ok(integral + offset)
    }

    /// `h_tr'(p) = a^{-1}`.
    pub fn h_trivial_p(&self, p: f64) -> Result<f64> {
        Ok(1.0 / self.a_coeff(p)?)
    }

    /// `h_tr''(p) = -γ(-p) a^{-3}`.
    pub fn h_trivial_pp(&self, p: f64) -> Result<f64> {
        let a = self.a_coeff(p)?;
        Ok(-self.model.gamma(-p)? / (a * a * a))
    }

    pub fn sample(&self, p: f64, g: f64) -> Result<TrivialSample> {
        let a = self.a_coeff(p)?;
        Ok(TrivialSample {
            p,
            a,
            h: self.h_trivial(p, g)?,
            h_p: 1.0 / a,
            h_pp: -self.model.gamma(-p)? / (a * a * a),
        })
    }
}
