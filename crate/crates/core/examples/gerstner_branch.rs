//! Verified branch for Gerstner-type vorticity, written to a directory.

use vorstokes::config::{RunConfig, VorticityConfig, VorticityKindConfig};
use vorstokes::pipeline::{continue_and_verify, write_branch};

fn main() -> vorstokes::Result<()> {
    let mut cfg = RunConfig::with_vorticity(VorticityConfig {
        kind: VorticityKindConfig::Gerstner,
        amplitude: None,
        rate: None,
        m: Some(0.5),
        knots: None,
        rho: None,
    });
    cfg.grid.nq = 32;
    cfg.grid.np = 160;
    cfg.branch.steps = 10;
    let run = continue_and_verify(&cfg, cfg.epsilon, 0)?;
    for r in &run.records {
        println!("s = {:.5}  λ = {:.6}  c = {:.6}  crest {:.5}  trough {:.5}  checks {}", r.s, r.lambda, r.c, r.eta_crest, r.eta_trough, r.verify_pass_count);
    }
    let dir = std::env::temp_dir().join("vorstokes-gerstner");
    let files = write_branch(&dir, &run)?;
    println!("all checks passed: {}; wrote {} files to {}", run.passed(), files.len(), dir.display());
    Ok(())
}
