//! Energy, currents and Hessian blocks of the linear and saturated models.

use imlab::magnetics::{hessian_blocks, torque_rotor_side, EnergyModel, LinearMagnetics, SaliencyParams, SaturatedMagnetics};
use imlab::Flux2;

fn report<M: EnergyModel>(name: &str, model: &M, phis: &Flux2, phir: &Flux2) -> imlab::Result<()> {
    let (is, ir) = model.currents(phis, phir);
    let h = hessian_blocks(model, phis, phir)?;
    let sal = SaliencyParams::from_hessian(&h.ss)?;
    println!("{name}");
    println!("  energy   {:.6} J", model.energy(phis, phir));
    println!("  is       ({:.4}, {:.4}) A", is.x, is.y);
    println!("  ir       ({:.4}, {:.4}) A", ir.x, ir.y);
    println!("  torque   {:.4} N.m", torque_rotor_side(phir, &ir, 2));
    println!("  Hss      [{:.4} {:.4}; {:.4} {:.4}]", h.ss[(0, 0)], h.ss[(0, 1)], h.ss[(1, 0)], h.ss[(1, 1)]);
    println!("  saliency a = {:.4}, b = {:.4}, sigma = {:.2} deg", sal.a, sal.b, sal.sigma.to_degrees());
    Ok(())
}

fn main() -> imlab::Result<()> {
    let phis = Flux2::new(1.0, 0.2);
    let phir = Flux2::new(0.9, -0.1);
    report("linear", &LinearMagnetics::table_two(), &phis, &phir)?;
    report("saturated", &SaturatedMagnetics::table_two(), &phis, &phir)?;
    Ok(())
}
