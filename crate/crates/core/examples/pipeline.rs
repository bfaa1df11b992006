//! Whole pipeline on a coarse grid: every ε of the schedule, then the homotopy.

use vorstokes::config::parse_config_str;
use vorstokes::pipeline::run_pipeline;

const CONFIG: &str = r#"
epsilon_schedule = [0.1, 0.05, 0.025]
[vorticity]
kind = "exp_decay"
amplitude = -0.4
rate = 1.0
[grid]
nq = 24
np = 120
[branch]
steps = 6
"#;

fn main() -> vorstokes::Result<()> {
    let cfg = parse_config_str(CONFIG, std::env::vars())?;
    let out = std::env::temp_dir().join("vorstokes-pipeline");
    let manifest = run_pipeline(&cfg, &out, 1)?;
    for b in &manifest.branches {
        println!("ε = {:<6} points {:>3}  {:?}  passed {}", b.epsilon, b.points, b.termination, b.passed);
    }
    println!("homotopy decreasing: {}; {} files in {}", manifest.homotopy_decreasing, manifest.files.len(), out.display());
    Ok(())
}
