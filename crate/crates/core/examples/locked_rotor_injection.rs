//! Inject a 20 V / 500 Hz square wave at a locked-rotor equilibrium and
//! compare the demodulated HF current with the virtual measurement Hss·ũ.

use imlab::dynamics::{equilibrium_locked_rotor, rated, MotorParams};
use imlab::injection::{predicted_virtual_current, InjectionSpec};
use imlab::lab::experiments::{injection_run, steady_window};
use imlab::magnetics::SaturatedMagnetics;
use imlab::Flux2;

fn main() -> imlab::Result<()> {
    let model = SaturatedMagnetics::table_two();
    let params = MotorParams::TABLE_ONE;
    let spec = InjectionSpec::default_square();

    for pct in [25.0, 50.0, 100.0] {
        let flux = rated::nominal_flux() * pct / 100.0;
        let eq = equilibrium_locked_rotor(&Flux2::new(flux, 0.0), 0.0, &model, &params)?;
        let (traj, demod) = injection_run(&eq, &spec, spec.default_dt(), 0.02, &model, &params, true)?;
        let hf = demod.mean_hf_from(steady_window(traj.len(), demod.samples_per_period));
        let pred = predicted_virtual_current(&model, &eq.state.phis, &eq.state.phir, &spec.u_tilde);
        println!(
            "{pct:>5}% flux: us = ({:.2}, {:.2}) V, extracted ({:.2}, {:.2}) A/s, Hss.u ({:.2}, {:.2}) A/s, error {:.2}%",
            eq.inputs.us.x,
            eq.inputs.us.y,
            hf.x,
            hf.y,
            pred.x,
            pred.y,
            100.0 * (hf - pred).norm() / pred.norm()
        );
    }
    Ok(())
}
