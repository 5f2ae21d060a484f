//! Drive the motor from a scenario: start at equilibrium, switch injection on
//! after 10 ms, then print the LF and HF current estimates.

use imlab::dynamics::{equilibrium_locked_rotor, MotorParams};
use imlab::lab::scenario::{run_scenario, Scenario};
use imlab::lab::LabConfig;
use imlab::magnetics::SaturatedMagnetics;
use imlab::Flux2;

fn main() -> imlab::Result<()> {
    let eq = equilibrium_locked_rotor(&Flux2::new(0.8, 0.0), 0.0, &SaturatedMagnetics::table_two(), &MotorParams::TABLE_ONE)?;
    let (s, r, u) = (eq.state.phis, eq.state.phir, eq.inputs.us);
    let text = format!(
        "duration 0.03\nlocked_rotor true\ninitial {} {} {} {} 0\nsegment 0 {} {} 0 0 off\nsegment 0.01 {} {} 0 0 on\n",
        s.x, s.y, r.x, r.y, u.x, u.y, u.x, u.y
    );
    let scenario = Scenario::parse(&text)?;
    let (traj, demod) = run_scenario(&LabConfig::default(), &scenario)?;
    for k in (0..traj.len()).step_by(traj.len() / 12) {
        println!(
            "t = {:.4} s  is = ({:+.3}, {:+.3})  lf = ({:+.3}, {:+.3})  hf = ({:+8.2}, {:+8.2})",
            traj.t[k], traj.is[k].x, traj.is[k].y, demod.lf[k].x, demod.lf[k].y, demod.hf[k].x, demod.hf[k].y
        );
    }
    Ok(())
}
