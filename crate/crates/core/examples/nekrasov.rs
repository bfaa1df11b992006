//! Irrotational surface-angle equation across ν, with the `ν > 3` bound.

use std::f64::consts::PI;

use vorstokes::nekrasov::{NekrasovOptions, NekrasovSolver};

fn main() -> vorstokes::Result<()> {
    let n = 128;
    let solver = NekrasovSolver::new(n)?;
    let opts = NekrasovOptions::default();
    let start: Vec<f64> = (0..=n).map(|i| 0.1 * (i as f64 * PI / n as f64).sin()).collect();
    println!("{:>6} {:>10} {:>12} {:>8} {:>6}", "ν", "max θ°", "steepness", "ratio", "iters");
    for nu in [2.5, 3.2, 4.0, 6.0, 10.0, 20.0] {
        let st = solver.solve(nu, &start, &opts)?;
        match st.nu_bound().filter(|_| st.max_angle() > 1e-6) {
            Some(b) => println!("{nu:>6} {:>10.4} {:>12.5} {:>8.4} {:>6}", st.max_angle().to_degrees(), st.steepness(), b.ratio, st.iterations),
            None => println!("{nu:>6} {:>10} (decays to the trivial solution)", "0"),
        }
    }
    Ok(())
}
