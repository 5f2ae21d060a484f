//! Row-to-table conversion, one schema per experiment.

use super::experiments::{CharacterizeRow, ConvergenceStudy, ObservabilityRow};
use super::output::{Cell, Table};
use crate::dynamics::Trajectory;
use crate::injection::Demodulated;

pub const CHARACTERIZE: &[&str] = &[
    "flux_wb", "omega_s", "i_sq", "a_direct", "b_direct", "sigma_direct", "a_sim", "b_sim", "sigma_sim", "err_a", "err_b",
    "err_sigma", "status",
];

pub const OBSERVABILITY: &[&str] =
    &["flux_pct", "torque_nm", "cond_os", "cond_os_prime", "rank_o", "feasible", "flux_wb", "rank_os"];

pub const CONVERGENCE: &[&str] = &[
    "omega_hz", "hf_rel_err", "mean_state_err", "ripple_peak_a", "hf_err_ratio", "phis_ripple_wb", "phir_ripple_wb",
];

pub const TRAJECTORY: &[&str] = &[
    "t_s", "phis_d", "phis_q", "phir_d", "phir_q", "omega", "is_d", "is_q", "islf_d", "islf_q", "ishf_d", "ishf_q",
];

pub fn characterize_table(rows: &[CharacterizeRow]) -> Table {
    let mut t = Table::new(CHARACTERIZE);
    for r in rows {
        t.push(vec![
            r.flux_wb.into(),
            r.omega_s.into(),
            r.i_sq.into(),
            r.direct.a.into(),
            r.direct.b.into(),
            r.direct.sigma.into(),
            r.simulated.a.into(),
            r.simulated.b.into(),
            r.simulated.sigma.into(),
            r.err_a.into(),
            r.err_b.into(),
            r.err_sigma.into(),
            r.status.as_str().into(),
        ]);
    }
    t
}

pub fn observability_table(rows: &[ObservabilityRow]) -> Table {
    let mut t = Table::new(OBSERVABILITY);
    for r in rows {
        let s = &r.sweep;
        t.push(vec![
            r.flux_pct.into(),
            s.load_torque.into(),
            s.cond_os.into(),
            s.cond_os_prime.into(),
            s.rank_o.into(),
            s.feasible.into(),
            s.flux.into(),
            s.rank_os.into(),
        ]);
    }
    t
}

/// `hf_err_ratio` is the error at the previous frequency divided by this
/// one's (`nan` on the first row).
pub fn convergence_table(study: &ConvergenceStudy) -> Table {
    let mut t = Table::new(CONVERGENCE);
    for (k, r) in study.rows.iter().enumerate() {
        let ratio = if k == 0 { f64::NAN } else { study.ratios[k - 1] };
        t.push(vec![
            r.omega_hz.into(),
            r.hf_rel_err.into(),
            r.mean_state_err.into(),
            r.ripple_peak_a.into(),
            ratio.into(),
            r.phis_ripple_wb.into(),
            r.phir_ripple_wb.into(),
        ]);
    }
    t
}

/// LF/HF columns are `nan` until the filters have a full window.
pub fn trajectory_table(traj: &Trajectory, demod: &Demodulated) -> Table {
    let mut t = Table::new(TRAJECTORY);
    for k in 0..traj.len() {
        let s = &traj.states[k];
        let mut row: Vec<Cell> =
            [traj.t[k], s.phis.x, s.phis.y, s.phir.x, s.phir.y, s.omega, traj.is[k].x, traj.is[k].y].map(Cell::from).to_vec();
        row.extend([demod.lf[k].x, demod.lf[k].y, demod.hf[k].x, demod.hf[k].y].map(Cell::from));
        t.push(row);
    }
    t
}
