//! Recover (a, b, sigma) from injections along 16 orientations and compare
//! with the parametrization of the Hessian.

use imlab::dynamics::{equilibrium_locked_rotor, MotorParams};
use imlab::injection::InjectionSpec;
use imlab::lab::experiments::simulated_saliency;
use imlab::magnetics::{SaliencyParams, SaturatedMagnetics};
use imlab::Flux2;

fn main() -> imlab::Result<()> {
    let model = SaturatedMagnetics::table_two();
    let params = MotorParams::TABLE_ONE;
    let spec = InjectionSpec::default_square();

    println!("{:>8} {:>8} {:>18} {:>18} {:>18}", "flux", "omega_s", "a direct/sim", "b direct/sim", "sigma direct/sim");
    for flux in [0.3, 0.6, 0.9] {
        for omega_s in [0.0, 20.0, 60.0] {
            let eq = equilibrium_locked_rotor(&Flux2::new(flux, 0.0), omega_s, &model, &params)?;
            let direct = SaliencyParams::from_hessian(&eq.hessian.ss)?;
            let sim = simulated_saliency(&eq, &spec, 16, spec.default_dt(), 0.02, &model, &params)?;
            println!(
                "{flux:>8.2} {omega_s:>8.1} {:>8.3}/{:<9.3} {:>8.3}/{:<9.3} {:>8.3}/{:<9.3}",
                direct.a, sim.a, direct.b, sim.b, direct.sigma, sim.sigma
            );
        }
    }
    Ok(())
}
