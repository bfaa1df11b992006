//! ε → 0 homotopy at a fixed branch coordinate.

use vorstokes::config::RunConfig;
use vorstokes::pipeline::homotopy;

fn main() -> vorstokes::Result<()> {
    let mut cfg = RunConfig::zero_vorticity();
    cfg.grid.nq = 32;
    cfg.grid.np = 200;
    let h = homotopy(&cfg)?;
    for k in 0..h.epsilon.len() {
        println!("ε = {:<8} λ* = {:.6}  λ = {:.6}  Newton {}", h.epsilon[k], h.lambda_star[k], h.lambda[k], h.newton_iterations[k]);
    }
    println!("sup|w_k+1 - w_k|: {:?}", h.w_differences);
    println!("differences decrease: {}", h.differences_decrease);
    Ok(())
}
