//! Pseudo-arclength continuation of the irrotational branch.

use vorstokes::config::RunConfig;
use vorstokes::continuation::continue_branch;
use vorstokes::pipeline::bifurcation_point;

fn main() -> vorstokes::Result<()> {
    let mut cfg = RunConfig::zero_vorticity();
    cfg.grid.nq = 32;
    cfg.grid.np = 160;
    cfg.branch.steps = 12;
    let bp = bifurcation_point(&cfg, cfg.epsilon)?;
    let problem = cfg.strip_problem(bp.lambda_star)?;
    let branch = continue_branch(&problem, &bp, &cfg.continuation())?;
    println!("{:>4} {:>12} {:>12} {:>10} {:>4}", "k", "s", "λ", "step", "it");
    for (k, p) in branch.points.iter().enumerate() {
        println!("{k:>4} {:>12.6} {:>12.8} {:>10.4} {:>4}", p.s, p.state.lambda, p.step, p.newton_iterations);
    }
    println!("termination: {:?}", branch.termination);
    Ok(())
}
