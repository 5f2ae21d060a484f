//! Rank of the observability matrices with and without injection, on and
//! off the zero stator speed line.

use std::f64::consts::PI;

use imlab::dynamics::{equilibrium_at_stator_speed, MotorParams};
use imlab::magnetics::{EnergyModel, LinearMagnetics, SaturatedMagnetics};
use imlab::observability::{analyze, default_injection, AnalysisOptions};

fn show<M: EnergyModel>(name: &str, model: &M) -> imlab::Result<()> {
    let params = MotorParams::TABLE_ONE;
    for omega_s in [0.0, 2.0 * PI, 2.0 * PI * 50.0] {
        let eq = equilibrium_at_stator_speed(1.0, omega_s, 2.0, model, &params)?;
        let r = analyze(&eq, &default_injection(), model, &params, &AnalysisOptions::default())?;
        println!(
            "{name:>9} omega_s = {omega_s:>7.2}: rank O = {}, rank Os = {}, cond Os = {:.3e}, cond Os' = {:.3e}",
            r.rank_o, r.rank_os, r.cond_os, r.cond_os_prime
        );
    }
    Ok(())
}

fn main() -> imlab::Result<()> {
    show("saturated", &SaturatedMagnetics::table_two())?;
    show("linear", &LinearMagnetics::table_two())?;
    Ok(())
}
