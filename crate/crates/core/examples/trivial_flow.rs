//! Flat-surface shear flow under Gerstner-type vorticity.

use vorstokes::shear_flow::ShearFlow;
use vorstokes::vorticity::VorticityModel;

fn main() -> vorstokes::Result<()> {
    let g = 9.81;
    let model = VorticityModel::gerstner(0.5)?;
    let f = model.functionals()?;
    let lambda = 12.0;
    let flow = ShearFlow::new(&model, lambda)?;
    println!("Γ_inf = {:.6}, Γ_∞ = {:.6}, c = {:.6}", f.gamma_inf_bound, f.gamma_total, flow.c);
    println!("{:>8} {:>10} {:>12} {:>12} {:>12}", "p", "a", "h", "h_p", "h_pp");
    for k in 0..=10 {
        let s = flow.sample(-0.5 * k as f64, g)?;
        println!("{:>8.2} {:>10.6} {:>12.6} {:>12.6} {:>12.3e}", s.p, s.a, s.h, s.h_p, s.h_pp);
    }
    Ok(())
}
