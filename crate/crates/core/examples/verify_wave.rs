//! Full verification report for one computed wave.

use vorstokes::config::RunConfig;
use vorstokes::continuation::solve_to_amplitude;
use vorstokes::physics::verify_state;
use vorstokes::pipeline::bifurcation_point;

fn main() -> vorstokes::Result<()> {
    let cfg = RunConfig::zero_vorticity();
    let bp = bifurcation_point(&cfg, cfg.epsilon)?;
    let problem = cfg.strip_problem(bp.lambda_star)?;
    let (state, _) = solve_to_amplitude(&problem, &bp, 0.1, 0.02, cfg.newton())?;
    let report = verify_state(&problem, &state, &cfg.verify())?;
    println!("λ = {:.8}, c = {:.6}, crest {:.6}, trough {:.6}", report.lambda, report.c, report.eta_crest, report.eta_trough);
    for c in report.checks() {
        println!("{} {:<40} margin {:>11.3e}  {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.margin, c.formula);
    }
    for s in report.nodal.skipped.iter().chain(&report.pressure.skipped) {
        println!("skipped {}: {}", s.name, s.reason);
    }
    Ok(())
}
