//! Bifurcation points for several vorticity models, and the irrotational closed form.

use std::f64::consts::PI;

use vorstokes::sturm_liouville::{eigenfunction_decay_rate, irrotational_lambda, SlProblem};
use vorstokes::vorticity::VorticityModel;

fn main() -> vorstokes::Result<()> {
    let (g, l) = (9.81, PI);
    for eps in [0.0, 0.01, 0.1] {
        let bp = SlProblem::new(&VorticityModel::zero(), g, l, eps)?.find_bifurcation_point()?;
        println!("γ = 0, ε = {eps:<5}: λ* = {:.9} (closed form {:.9})", bp.lambda_star, irrotational_lambda(eps, g, l));
    }
    let models = [
        ("exp decay A = 0.5", VorticityModel::exp_decay(0.5, 1.0)?),
        ("exp decay A = -0.5", VorticityModel::exp_decay(-0.5, 1.0)?),
        ("Gerstner m = 0.5", VorticityModel::gerstner(0.5)?),
    ];
    for (name, model) in models {
        let cond = model.check_bifurcation_condition(g, l)?;
        let bp = SlProblem::new(&model, g, l, 0.01)?.find_bifurcation_point()?;
        let rate = eigenfunction_decay_rate(bp.lambda_star, &model.functionals()?);
        println!(
            "{name:<20} λ* = {:.6}, decay rate >= {rate:.4}, existence condition margin {:.4}",
            bp.lambda_star, cond.margin
        );
    }
    Ok(())
}
