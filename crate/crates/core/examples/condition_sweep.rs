//! Condition numbers of Os and Os' against load torque at zero stator speed,
//! written as CSV to stdout.

use imlab::lab::output::{render, Metadata};
use imlab::lab::{experiments, tables, LabConfig};

fn main() -> imlab::Result<()> {
    let mut cfg = LabConfig::default();
    cfg.observability.torque_step = 0.5;
    let rows = experiments::observability(&cfg)?;
    let meta = Metadata { command: "condition_sweep example".into(), config_sha256: cfg.sha256(), timestamp: None };
    print!("{}", render(&meta, &tables::observability_table(&rows)));
    Ok(())
}
