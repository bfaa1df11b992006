//! Small-amplitude waves near the bifurcation point: the surface cosine
//! amplitude follows `s Φ(0)` with an `O(s²)` correction.

use std::f64::consts::PI;

use vorstokes::continuation::initial_nontrivial_guess;
use vorstokes::strip::{CrestConstraint, NewtonOptions, StripGrid, StripProblem};
use vorstokes::sturm_liouville::SlProblem;
use vorstokes::vorticity::VorticityModel;

fn main() -> vorstokes::Result<()> {
    let model = VorticityModel::zero();
    let bp = SlProblem::new(&model, 9.81, PI, 0.01)?.find_bifurcation_point()?;
    let grid = StripGrid::new(PI, StripGrid::default_depth(PI, bp.lambda_star), 48, 160)?;
    let pb = StripProblem::new(&model, 9.81, 1e-3, grid)?;
    println!("λ* = {:.8}", bp.lambda_star);
    println!("{:>10} {:>14} {:>14} {:>12} {:>4}", "s", "amplitude", "λ - λ*", "deviation", "it");
    for s in [0.04, 0.02, 0.01, 0.005] {
        let seed = initial_nontrivial_guess(&bp, grid, s);
        let rep = pb.bordered_newton(&seed, &CrestConstraint { target: s }, NewtonOptions::default())?;
        let a = rep.state.amplitude();
        println!("{s:>10} {a:>14.8e} {:>14.6e} {:>12.4e} {:>4}", rep.state.lambda - bp.lambda_star, (a - s).abs(), rep.iterations);
    }
    Ok(())
}
