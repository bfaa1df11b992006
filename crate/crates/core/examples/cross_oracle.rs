//! Strip-solver surface against the Nekrasov profile of equal steepness.

use std::f64::consts::PI;

use vorstokes::continuation::solve_to_amplitude;
use vorstokes::nekrasov::{match_steepness, mean_on, scaled_profile, NekrasovOptions, NekrasovSolver};
use vorstokes::physics::reconstruct;
use vorstokes::strip::{NewtonOptions, StripGrid, StripProblem};
use vorstokes::sturm_liouville::SlProblem;
use vorstokes::vorticity::VorticityModel;

fn main() -> vorstokes::Result<()> {
    let model = VorticityModel::zero();
    let bp = SlProblem::new(&model, 9.81, PI, 0.01)?.find_bifurcation_point()?;
    let grid = StripGrid::new(PI, StripGrid::default_depth(PI, bp.lambda_star), 64, 200)?;
    let pb = StripProblem::new(&model, 9.81, 1e-3, grid)?;
    let solver = NekrasovSolver::new(256)?;
    for s in [0.01, 0.02, 0.04] {
        let (state, _) = solve_to_amplitude(&pb, &bp, s, 0.02, NewtonOptions::default())?;
        let wave = reconstruct(&pb, &state)?;
        let (xs, ys): (Vec<f64>, Vec<f64>) = wave.eta.iter().copied().filter(|(x, _)| *x <= 1e-12).unzip();
        let mean = mean_on(&xs, &ys);
        let steep = (ys[ys.len() - 1] - ys[0]) / PI;
        let nk = match_steepness(&solver, steep, 8.0, &NekrasovOptions::default())?;
        let prof = scaled_profile(&nk, PI)?;
        let (mut diff, mut sup) = (0.0f64, 0.0f64);
        for (x, y) in xs.iter().zip(&ys) {
            diff = diff.max((y - mean - prof.eval(*x)).abs());
            sup = sup.max((y - mean).abs());
        }
        println!("s = {s}: steepness {steep:.5}, ν = {:.5}, relative sup difference {:.3e}", nk.nu, diff / sup);
    }
    Ok(())
}
