//! The three batch experiments. Each returns plain rows; [`super::tables`]
//! turns them into CSV tables.

use rayon::prelude::*;

use super::config::LabConfig;
use crate::dynamics::{equilibrium_locked_rotor, simulate, Equilibrium, MotorParams, Trajectory};
use crate::error::{Error, Result};
use crate::injection::{demodulate, equispaced_orientations, fit_saliency, predicted_virtual_current, Demodulated, InjectedInputs, InjectionSpec};
use crate::linalg::rot;
use crate::magnetics::{wrap_angle, EnergyModel, SaliencyParams};
use crate::observability::{condition_sweep, SweepRow};
use crate::{Flux2, Vec2};

/// Simulate `spec` superimposed on the equilibrium inputs, starting on the
/// first-order periodic orbit `φs(0) = φ̄s + ũ·S(0)/Ω`.
pub fn injection_run<M: EnergyModel + ?Sized>(
    eq: &Equilibrium,
    spec: &InjectionSpec,
    dt: f64,
    duration: f64,
    model: &M,
    params: &MotorParams,
    locked_rotor: bool,
) -> Result<(Trajectory, Demodulated)> {
    let n = spec.samples_per_period(dt)?;
    let steps = (duration / dt).round() as usize;
    if steps < 3 * n {
        return Err(Error::Resolution(format!(
            "duration {duration} s holds {steps} steps, need at least three injection periods ({} steps)",
            3 * n
        )));
    }
    let mut x0 = eq.state;
    x0.phis += spec.flux_ripple(0.0);
    let signal = InjectedInputs::new(eq.inputs, spec.clone());
    let traj = simulate(&x0, &signal, duration, dt, model, params, locked_rotor)?;
    let demod = demodulate(&traj, spec)?;
    Ok((traj, demod))
}

/// Start of the statistics window: the last whole number of periods after
/// the first two, which are discarded.
pub fn steady_window(len: usize, samples_per_period: usize) -> usize {
    let n = samples_per_period;
    let periods = len.saturating_sub(1 + 2 * n) / n;
    len - 1 - periods * n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    /// The equilibrium solver or the direct parametrization failed.
    EquilibriumFailed,
    /// Simulation, demodulation or fitting failed.
    ExtractionFailed,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::EquilibriumFailed => "equilibrium_failed",
            PointStatus::ExtractionFailed => "extraction_failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizeRow {
    pub flux_wb: f64,
    pub omega_s: f64,
    /// q component of the equilibrium stator current (A).
    pub i_sq: f64,
    pub direct: SaliencyParams,
    pub simulated: SaliencyParams,
    /// Relative error on `a`.
    pub err_a: f64,
    /// Error on `b` relative to the direct `b`, or to `a` when `b` vanishes.
    pub err_b: f64,
    /// Wrapped orientation error (rad).
    pub err_sigma: f64,
    pub status: PointStatus,
}

fn nan_params() -> SaliencyParams {
    SaliencyParams { a: f64::NAN, b: f64::NAN, sigma: f64::NAN }
}

/// Saliency extracted by injecting along each of `orientations` directions
/// of magnitude `|ũ|` at a fixed equilibrium.
pub fn simulated_saliency<M: EnergyModel + ?Sized>(
    eq: &Equilibrium,
    base: &InjectionSpec,
    orientations: usize,
    dt: f64,
    duration: f64,
    model: &M,
    params: &MotorParams,
) -> Result<SaliencyParams> {
    let u_mag = base.u_tilde.norm();
    let mut samples = Vec::with_capacity(orientations);
    for theta in equispaced_orientations(orientations) {
        let spec = InjectionSpec { u_tilde: rot(theta) * Vec2::new(u_mag, 0.0), ..base.clone() };
        let (traj, demod) = injection_run(eq, &spec, dt, duration, model, params, true)?;
        let from = steady_window(traj.len(), demod.samples_per_period);
        samples.push((theta, demod.mean_hf_from(from)));
    }
    fit_saliency(&samples, u_mag)
}

fn characterize_point<M: EnergyModel + ?Sized>(cfg: &LabConfig, model: &M, flux: f64, omega_s: f64) -> CharacterizeRow {
    let failed = |status, i_sq, direct| CharacterizeRow {
        flux_wb: flux,
        omega_s,
        i_sq,
        direct,
        simulated: nan_params(),
        err_a: f64::NAN,
        err_b: f64::NAN,
        err_sigma: f64::NAN,
        status,
    };
    let eq = match equilibrium_locked_rotor(&Flux2::new(flux, 0.0), omega_s, model, &cfg.motor) {
        Ok(eq) => eq,
        Err(_) => return failed(PointStatus::EquilibriumFailed, f64::NAN, nan_params()),
    };
    let direct = match SaliencyParams::from_hessian(&eq.hessian.ss) {
        Ok(p) => p,
        Err(_) => return failed(PointStatus::EquilibriumFailed, eq.is.y, nan_params()),
    };
    let dt = cfg.dt_for(&cfg.injection);
    let sim = simulated_saliency(&eq, &cfg.injection, cfg.characterize.orientations, dt, cfg.sim.duration, model, &cfg.motor);
    let simulated = match sim {
        Ok(p) => p,
        Err(_) => return failed(PointStatus::ExtractionFailed, eq.is.y, direct),
    };
    let b_scale = if direct.b > 1e-9 * direct.a { direct.b } else { direct.a };
    CharacterizeRow {
        flux_wb: flux,
        omega_s,
        i_sq: eq.is.y,
        direct,
        simulated,
        err_a: (simulated.a - direct.a).abs() / direct.a,
        err_b: (simulated.b - direct.b).abs() / b_scale,
        err_sigma: wrap_angle(simulated.sigma - direct.sigma).abs(),
        status: PointStatus::Ok,
    }
}

/// Saliency characterization over the configured flux levels and stator
/// speeds at locked rotor. Rows are ordered flux-major; failed points keep
/// their row with a non-`Ok` status.
pub fn characterize(cfg: &LabConfig) -> Result<Vec<CharacterizeRow>> {
    let model = cfg.magnetics.build()?;
    cfg.injection.samples_per_period(cfg.dt_for(&cfg.injection))?;
    let speeds = cfg.characterize.omega_s_grid();
    let points: Vec<(f64, f64)> = cfg
        .characterize
        .flux_pct
        .iter()
        .flat_map(|&pct| speeds.iter().map(move |&w| (cfg.flux_at(pct), w)))
        .collect();
    Ok(points.par_iter().map(|&(flux, w)| characterize_point(cfg, &model, flux, w)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservabilityRow {
    pub flux_pct: f64,
    pub sweep: SweepRow,
}

/// Condition-number sweep on the ω̄s = 0 line. Every grid point is
/// returned; infeasible ones have `feasible = false`.
pub fn observability(cfg: &LabConfig) -> Result<Vec<ObservabilityRow>> {
    let model = cfg.magnetics.build()?;
    let o = &cfg.observability;
    let levels: Vec<f64> = o.flux_pct.iter().map(|&p| cfg.flux_at(p)).collect();
    let grid = o.torque_grid();
    let rows = condition_sweep(&levels, &grid, &cfg.injection.u_tilde, &model, &cfg.motor, &o.options());
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(k, sweep)| ObservabilityRow { flux_pct: o.flux_pct[k / grid.len()], sweep })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub omega_hz: f64,
    /// `‖ĩ − Hss·ũ‖ / ‖Hss·ũ‖` with `ĩ` the HF estimate averaged over the steady window.
    pub hf_rel_err: f64,
    /// Distance between the period-averaged fluxes and the equilibrium (Wb).
    pub mean_state_err: f64,
    /// Peak of `‖is − is_lf‖` over the steady window (A).
    pub ripple_peak_a: f64,
    /// Peak deviation of `φs` from its window mean (Wb).
    pub phis_ripple_wb: f64,
    /// Peak deviation of `φr` from its window mean (Wb).
    pub phir_ripple_wb: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub equilibrium_flux_wb: f64,
    pub rows: Vec<ConvergenceRow>,
    /// `hf_rel_err[k] / hf_rel_err[k + 1]` for consecutive frequencies.
    pub ratios: Vec<f64>,
}

fn convergence_row<M: EnergyModel + ?Sized>(cfg: &LabConfig, model: &M, eq: &Equilibrium, omega_hz: f64) -> Result<ConvergenceRow> {
    let spec = InjectionSpec { omega_hz, ..cfg.injection.clone() };
    let dt = cfg.dt_for(&spec);
    let (traj, demod) = injection_run(eq, &spec, dt, cfg.sim.duration, model, &cfg.motor, true)?;
    let from = steady_window(traj.len(), demod.samples_per_period);
    let window = &traj.states[from..traj.len() - 1];
    let count = window.len() as f64;
    let mean_phis = window.iter().map(|s| s.phis).sum::<Flux2>() / count;
    let mean_phir = window.iter().map(|s| s.phir).sum::<Flux2>() / count;
    let mean_state_err = ((mean_phis - eq.state.phis).norm_squared() + (mean_phir - eq.state.phir).norm_squared()).sqrt();
    let peak = |f: &dyn Fn(usize) -> f64| (from..traj.len()).map(f).fold(0.0, f64::max);

    let pred = predicted_virtual_current(model, &eq.state.phis, &eq.state.phir, &spec.u_tilde);
    Ok(ConvergenceRow {
        omega_hz,
        hf_rel_err: (demod.mean_hf_from(from) - pred).norm() / pred.norm(),
        mean_state_err,
        ripple_peak_a: peak(&|k| (traj.is[k] - demod.lf[k]).norm()),
        phis_ripple_wb: peak(&|k| (traj.states[k].phis - mean_phis).norm()),
        phir_ripple_wb: peak(&|k| (traj.states[k].phir - mean_phir).norm()),
    })
}

/// Averaging-error study at the configured equilibrium.
pub fn convergence(cfg: &LabConfig) -> Result<ConvergenceStudy> {
    let model = cfg.magnetics.build()?;
    let c = &cfg.convergence;
    let flux = cfg.flux_at(c.flux_pct);
    let eq = equilibrium_locked_rotor(&Flux2::new(flux, 0.0), c.omega_s, &model, &cfg.motor)?;
    let rows = c
        .omega_hz
        .par_iter()
        .map(|&w| convergence_row(cfg, &model, &eq, w))
        .collect::<Result<Vec<_>>>()?;
    let ratios = rows.windows(2).map(|w| w[0].hf_rel_err / w[1].hf_rel_err).collect();
    Ok(ConvergenceStudy { equilibrium_flux_wb: flux, rows, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::config::MagneticsConfig;
    use crate::magnetics::LinearMagParams;

    fn small(cfg: &mut LabConfig) {
        cfg.characterize.flux_pct = vec![50.0];
        cfg.characterize.omega_s_steps = 2;
        cfg.characterize.orientations = 4;
        cfg.sim.duration = 0.01;
    }

    #[test]
    fn window_is_whole_periods_after_two() {
        assert_eq!(steady_window(1001, 200), 400);
        assert_eq!(steady_window(1100, 200), 499);
        assert_eq!((1100 - 1 - steady_window(1100, 200)) % 200, 0);
    }

    #[test]
    fn linear_characterization_is_flat() {
        let mut cfg = LabConfig { magnetics: MagneticsConfig::Linear(LinearMagParams::TABLE_TWO), ..Default::default() };
        small(&mut cfg);
        let rows = characterize(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert_eq!(r.status, PointStatus::Ok);
            assert!((r.direct.a - 4.6875).abs() < 1e-9);
            assert!(r.direct.b < 1e-12 * r.direct.a);
            assert!(r.err_a < 1e-2, "{r:?}");
            assert!(r.simulated.b < 1e-2 * r.direct.a, "{r:?}");
        }
    }

    #[test]
    fn zero_flux_reduces_to_linear() {
        let mut cfg = LabConfig::default();
        small(&mut cfg);
        cfg.characterize.flux_pct = vec![0.0];
        cfg.characterize.omega_s_steps = 1;
        let r = &characterize(&cfg).unwrap()[0];
        assert!((r.direct.a - 4.6875).abs() < 1e-12);
        assert!(r.direct.b.abs() < 1e-12);
    }

    #[test]
    fn too_short_runs_are_rejected() {
        let mut cfg = LabConfig::default();
        cfg.sim.duration = 0.004;
        assert!(matches!(convergence(&cfg), Err(Error::Resolution(_))));
    }

    #[test]
    fn linear_ripple_peak() {
        let mut cfg = LabConfig { magnetics: MagneticsConfig::Linear(LinearMagParams::TABLE_TWO), ..Default::default() };
        cfg.convergence.omega_hz = vec![500.0];
        let row = &convergence(&cfg).unwrap().rows[0];
        let expected = 4.6875 * 20.0 * 0.25 / 500.0;
        assert!((row.ripple_peak_a / expected - 1.0).abs() < 1e-2, "{}", row.ripple_peak_a);
    }

    #[test]
    fn observability_rows_cover_grid() {
        let mut cfg = LabConfig::default();
        cfg.observability.torque_step = 2.5;
        let rows = observability(&cfg).unwrap();
        assert_eq!(rows.len(), 3 * 5);
        assert_eq!(rows[5].flux_pct, 100.0);
        assert!(rows.iter().all(|r| r.sweep.feasible && r.sweep.rank_o == 5 && r.sweep.rank_os == 5));
    }
}
