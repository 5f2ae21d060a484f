//! A user-defined energy in the three invariants
//! (p, q, r) = (|φs|²/2, φsᵀφr, |φr|²/2). Only the energy and its gradient
//! are supplied; Hessians and third derivatives are finite-differenced.

use imlab::dynamics::{equilibrium_zero_stator_speed, MotorParams};
use imlab::magnetics::{EnergyModel, InvariantEnergy, SaliencyParams};
use imlab::observability::{analyze, default_injection, AnalysisOptions};
use imlab::Flux2;

fn main() -> imlab::Result<()> {
    // Linear inverse inductances plus a quartic term on the mutual flux.
    let (alpha, beta, k) = (4.6875, -3.645833333333333, 0.05);
    let model = InvariantEnergy::new(
        move |[p, q, r]: [f64; 3]| alpha * (p + r) + beta * q + k * (p + q + r).powi(2),
        move |[p, q, r]: [f64; 3]| {
            let m = 2.0 * k * (p + q + r);
            [alpha + m, beta + m, alpha + m]
        },
    );
    let (phis, phir) = (Flux2::new(1.0, 0.1), Flux2::new(0.95, 0.0));
    let sal = SaliencyParams::from_hessian(&model.hessian(&phis, &phir).ss)?;
    println!("saliency a = {:.4}, b = {:.4}, sigma = {:.3} rad", sal.a, sal.b, sal.sigma);

    let params = MotorParams::TABLE_ONE;
    let eq = equilibrium_zero_stator_speed(1.0, 1.0, &model, &params)?;
    let r = analyze(&eq, &default_injection(), &model, &params, &AnalysisOptions::default())?;
    println!("zero stator speed: rank O = {}, rank Os = {}, cond Os = {:.3e}", r.rank_o, r.rank_os, r.cond_os);
    Ok(())
}
