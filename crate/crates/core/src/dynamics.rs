//! dq-frame dynamics of the saturated induction motor.
//!
//! ```text
//! dφs/dt        = us − Rs·is − J·ωs·φs
//! dφr/dt        = −Rr·ir − J·(ωs − ω)·φr
//! (Jl/np)·dω/dt = −np·φsᵀ·J·is − Tl
//! ```
//!
//! with `(is, ir)` the gradient of the magnetic energy. Also provides a
//! classical fixed-step RK4 integrator and Newton solvers for the steady
//! operating points used by the injection and observability studies.

use crate::error::{Error, Result};
use crate::linalg::{j, Flux2, Mat2, Vec2};
use crate::magnetics::{hessian_blocks, torque_stator_side, EnergyModel, HessianBlocks};
use nalgebra::{SMatrix, SVector};

/// Mechanical and resistive parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorParams {
    /// Stator resistance (Ω).
    pub rs: f64,
    /// Rotor resistance (Ω).
    pub rr: f64,
    pub pole_pairs: u32,
    /// Inertia (kg·m²).
    pub inertia: f64,
}

impl MotorParams {
    /// 0.75 kW test motor: `Rs = 13 Ω`, `Rr = 10 Ω`, `np = 2`, `Jl = 5e-3 kg·m²`.
    pub const TABLE_ONE: MotorParams = MotorParams { rs: 13.0, rr: 10.0, pole_pairs: 2, inertia: 5e-3 };

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(self.rs) && ok(self.rr) && ok(self.inertia) && self.pole_pairs > 0) {
            return Err(Error::InvalidInput(format!("motor parameters must be strictly positive: {self:?}")));
        }
        Ok(())
    }

    pub(crate) fn np(&self) -> f64 {
        self.pole_pairs as f64
    }
}

impl Default for MotorParams {
    fn default() -> Self {
        Self::TABLE_ONE
    }
}

/// Rated characteristics of the 0.75 kW test motor, used for per-unit bases
/// and default sweep ranges.
pub mod rated {
    /// Peak phase voltage (V).
    pub const VOLTAGE_PEAK: f64 = 400.0;
    /// RMS current (A).
    pub const CURRENT_RMS: f64 = 2.0;
    /// Mechanical speed (rpm).
    pub const SPEED_RPM: f64 = 1500.0;
    /// Torque (N·m).
    pub const TORQUE: f64 = 5.0;
    pub const POLE_PAIRS: u32 = 2;

    /// Rated electrical angular speed (rad/s).
    pub fn electrical_speed() -> f64 {
        SPEED_RPM / 60.0 * POLE_PAIRS as f64 * 2.0 * std::f64::consts::PI
    }

    /// Nominal flux estimate `V_peak / ω_rated` (Wb).
    pub fn nominal_flux() -> f64 {
        VOLTAGE_PEAK / electrical_speed()
    }
}

/// Electromagnetic state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImState {
    pub phis: Flux2,
    pub phir: Flux2,
    /// Electrical rotor speed (rad/s).
    pub omega: f64,
}

pub type StateVector = SVector<f64, 5>;

impl ImState {
    pub fn new(phis: Flux2, phir: Flux2, omega: f64) -> Self {
        ImState { phis, phir, omega }
    }

    pub fn to_vector(&self) -> StateVector {
        StateVector::from([self.phis[0], self.phis[1], self.phir[0], self.phir[1], self.omega])
    }

    pub fn from_vector(v: &StateVector) -> Self {
        ImState { phis: Flux2::new(v[0], v[1]), phir: Flux2::new(v[2], v[3]), omega: v[4] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }
}

/// Inputs and disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImInputs {
    /// Stator voltage (V).
    pub us: Vec2,
    /// Frame speed ωs (rad/s).
    pub omega_s: f64,
    /// Load torque (N·m).
    pub load_torque: f64,
}

/// Time derivative of the state. With `locked_rotor` the speed derivative is
/// forced to zero and ω keeps its current value.
pub fn state_derivative<M: EnergyModel + ?Sized>(
    state: &ImState,
    inputs: &ImInputs,
    model: &M,
    params: &MotorParams,
    locked_rotor: bool,
) -> ImState {
    let jm = j();
    let (is, ir) = model.currents(&state.phis, &state.phir);
    let dphis = inputs.us - is * params.rs - jm * state.phis * inputs.omega_s;
    let dphir = -ir * params.rr - jm * state.phir * (inputs.omega_s - state.omega);
    let domega = if locked_rotor {
        0.0
    } else {
        let np = params.np();
        (torque_stator_side(&state.phis, &is, params.pole_pairs) - inputs.load_torque) * np / params.inertia
    };
    ImState { phis: dphis, phir: dphir, omega: domega }
}

/// Time-dependent inputs for [`simulate`].
///
/// `inputs_left` is the left limit at `t`; it differs from `inputs` only for
/// signals with jumps, and is used for the end-of-step RK4 stage so that a
/// discontinuity on the sample grid is integrated exactly.
pub trait InputSignal: Sync {
    fn inputs(&self, t: f64) -> ImInputs;

    fn inputs_left(&self, t: f64) -> ImInputs {
        self.inputs(t)
    }
}

impl InputSignal for ImInputs {
    fn inputs(&self, _t: f64) -> ImInputs {
        *self
    }
}

/// Adapter for closures `t ↦ inputs` (continuous signals).
pub struct FnSignal<F>(pub F);

impl<F: Fn(f64) -> ImInputs + Sync> InputSignal for FnSignal<F> {
    fn inputs(&self, t: f64) -> ImInputs {
        (self.0)(t)
    }
}

/// Uniformly sampled simulation output.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub dt: f64,
    pub t: Vec<f64>,
    pub states: Vec<ImState>,
    /// Stator currents at each sample (A).
    pub is: Vec<Vec2>,
    /// Inputs applied at each sample (right-continuous value).
    pub inputs: Vec<ImInputs>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last_state(&self) -> Option<&ImState> {
        self.states.last()
    }
}

/// Integrate the model with classical fixed-step RK4 on `[0, t_end]`.
///
/// The number of steps is `round(t_end / dt)`; sample `k` is at `k·dt`.
pub fn simulate<M: EnergyModel + ?Sized, S: InputSignal + ?Sized>(
    state0: &ImState,
    signal: &S,
    t_end: f64,
    dt: f64,
    model: &M,
    params: &MotorParams,
    locked_rotor: bool,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("end time must be non-negative, got {t_end}")));
    }
    if !state0.is_finite() {
        return Err(Error::NonFinite { t: 0.0 });
    }
    let steps = (t_end / dt).round() as usize;
    let mut traj = Trajectory {
        dt,
        t: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        is: Vec::with_capacity(steps + 1),
        inputs: Vec::with_capacity(steps + 1),
    };
    let f = |x: &StateVector, u: &ImInputs| {
        state_derivative(&ImState::from_vector(x), u, model, params, locked_rotor).to_vector()
    };
    let mut x = state0.to_vector();
    for k in 0..=steps {
        let t = k as f64 * dt;
        let s = ImState::from_vector(&x);
        let u0 = signal.inputs(t);
        traj.t.push(t);
        traj.states.push(s);
        traj.is.push(model.currents(&s.phis, &s.phir).0);
        traj.inputs.push(u0);
        if k == steps {
            break;
        }
        let um = signal.inputs(t + 0.5 * dt);
        let u1 = signal.inputs_left(t + dt);
        let k1 = f(&x, &u0);
        let k2 = f(&(x + k1 * (0.5 * dt)), &um);
        let k3 = f(&(x + k2 * (0.5 * dt)), &um);
        let k4 = f(&(x + k3 * dt), &u1);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { t: t + dt });
        }
    }
    Ok(traj)
}

/// A steady operating point with the derivative information evaluated there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub state: ImState,
    pub inputs: ImInputs,
    pub is: Vec2,
    pub ir: Vec2,
    pub hessian: HessianBlocks,
    /// Slip speed `ωs − ω` (rad/s).
    pub omega_g: f64,
    /// Newton iterations used.
    pub iterations: usize,
}

impl Equilibrium {
    /// Evaluate currents, Hessian blocks and slip at a given point.
    pub fn at<M: EnergyModel + ?Sized>(state: ImState, inputs: ImInputs, model: &M, iterations: usize) -> Result<Self> {
        let (is, ir) = model.currents(&state.phis, &state.phir);
        let hessian = hessian_blocks(model, &state.phis, &state.phir)?;
        Ok(Equilibrium { state, inputs, is, ir, hessian, omega_g: inputs.omega_s - state.omega, iterations })
    }

    /// Max-abs residual of the three steady-state equations (SI units).
    pub fn residual<M: EnergyModel + ?Sized>(&self, model: &M, params: &MotorParams) -> f64 {
        let jm = j();
        let (is, ir) = model.currents(&self.state.phis, &self.state.phir);
        let r1 = self.inputs.us - is * params.rs - jm * self.state.phis * self.inputs.omega_s;
        let r2 = -ir * params.rr - jm * self.state.phir * self.omega_g;
        let r3 = torque_stator_side(&self.state.phis, &is, params.pole_pairs) - self.inputs.load_torque;
        r1.abs().max().max(r2.abs().max()).max(r3.abs())
    }

    /// Electromagnetic torque at the point.
    pub fn torque(&self, params: &MotorParams) -> f64 {
        torque_stator_side(&self.state.phis, &self.is, params.pole_pairs)
    }
}

/// Newton settings shared by the equilibrium solvers.
pub const NEWTON_MAX_ITERATIONS: usize = 50;
const NEWTON_TOL: f64 = 1e-11;
const MAX_HALVINGS: usize = 30;

/// Damped Newton iteration: the step is halved while the residual norm grows.
fn newton<const N: usize>(
    mut x: SVector<f64, N>,
    eval: impl Fn(&SVector<f64, N>) -> (SVector<f64, N>, SMatrix<f64, N, N>),
) -> Result<(SVector<f64, N>, usize)> {
    let (mut r, mut jac) = eval(&x);
    let mut norm = r.amax();
    for it in 0..NEWTON_MAX_ITERATIONS {
        if norm < NEWTON_TOL {
            return Ok((x, it));
        }
        let dj = nalgebra::DMatrix::from_column_slice(N, N, jac.as_slice());
        let dr = nalgebra::DVector::from_column_slice((-r).as_slice());
        let Some(step) = dj.lu().solve(&dr).map(|s| SVector::<f64, N>::from_column_slice(s.as_slice())) else {
            return Err(Error::NoConvergence { iterations: it, residual: norm });
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = x + step * lambda;
            let (rt, jt) = eval(&trial);
            let nt = rt.amax();
            if nt.is_finite() && nt < norm {
                x = trial;
                r = rt;
                jac = jt;
                norm = nt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return if norm < 1e-9 {
                Ok((x, it))
            } else {
                Err(Error::NoConvergence { iterations: it, residual: norm })
            };
        }
    }
    if norm < 1e-9 {
        Ok((x, NEWTON_MAX_ITERATIONS))
    } else {
        Err(Error::NoConvergence { iterations: NEWTON_MAX_ITERATIONS, residual: norm })
    }
}

/// Linear-model coefficients `(α, β)` with `Hss = Hrr = α·I`, `Hsr = β·I`,
/// taken at the origin of the given model.
fn origin_coefficients<M: EnergyModel + ?Sized>(model: &M) -> (f64, f64) {
    let h = model.hessian(&Flux2::zeros(), &Flux2::zeros());
    (h.ss[(0, 0)], h.sr[(0, 0)])
}

/// Locked-rotor operating point with prescribed rotor flux.
///
/// Solves `Rr·ir(φs, φr) = −J·ωs·φr` for `φs` with ω = 0, then sets
/// `us = Rs·is + J·ωs·φs`. The load torque is set to the electromagnetic
/// torque so that the point is also an equilibrium of the unlocked model.
pub fn equilibrium_locked_rotor<M: EnergyModel + ?Sized>(
    phir: &Flux2,
    omega_s: f64,
    model: &M,
    params: &MotorParams,
) -> Result<Equilibrium> {
    params.validate()?;
    if !(phir.iter().all(|v| v.is_finite()) && omega_s.is_finite()) {
        return Err(Error::InvalidInput("rotor flux and stator speed must be finite".into()));
    }
    let jm = j();
    let rr = params.rr;
    let (alpha, beta) = origin_coefficients(model);
    // Linear guess: Rr(β φs + α φr) + J ωs φr = 0.
    let guess = -(phir * (rr * alpha) + jm * phir * omega_s) / (rr * beta);
    let (phis_v, iterations) = newton::<2>(guess, |x| {
        let (_, ir) = model.currents(x, phir);
        let h = model.hessian(x, phir);
        (ir * rr + jm * phir * omega_s, h.rs() * rr)
    })?;
    let phis = phis_v;
    let (is, _) = model.currents(&phis, phir);
    let us = is * params.rs + jm * phis * omega_s;
    let te = torque_stator_side(&phis, &is, params.pole_pairs);
    let state = ImState::new(phis, *phir, 0.0);
    let inputs = ImInputs { us, omega_s, load_torque: te };
    Equilibrium::at(state, inputs, model, iterations)
}

/// Operating point with rotor flux `(phir_mag, 0)`, frame speed `omega_s`
/// and load torque `load_torque`; solves for `(φs, ω)`.
pub fn equilibrium_at_stator_speed<M: EnergyModel + ?Sized>(
    phir_mag: f64,
    omega_s: f64,
    load_torque: f64,
    model: &M,
    params: &MotorParams,
) -> Result<Equilibrium> {
    params.validate()?;
    if !(phir_mag.is_finite() && phir_mag != 0.0 && omega_s.is_finite() && load_torque.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need finite non-zero rotor flux, finite speed and torque (phir = {phir_mag}, ws = {omega_s}, Tl = {load_torque})"
        )));
    }
    let jm = j();
    let rr = params.rr;
    let np = params.np();
    let phir = Flux2::new(phir_mag, 0.0);
    let (alpha, beta) = origin_coefficients(model);
    // Linear guess: slip from Te = np ωg Φ²/Rr, then φs from the rotor equation.
    let omega_g0 = rr * load_torque / (np * phir_mag * phir_mag);
    let phis0 = -(phir * (rr * alpha) + jm * phir * omega_g0) / (rr * beta);
    let x0 = SVector::<f64, 3>::new(phis0[0], phis0[1], omega_s - omega_g0);

    let (x, iterations) = newton::<3>(x0, |x| {
        let phis = Flux2::new(x[0], x[1]);
        let omega = x[2];
        let (is, ir) = model.currents(&phis, &phir);
        let h = model.hessian(&phis, &phir);
        let rotor = -ir * rr - jm * phir * (omega_s - omega);
        let torque = -np * phis.dot(&(jm * is)) - load_torque;
        let mut jac = SMatrix::<f64, 3, 3>::zeros();
        let d_rotor_phis: Mat2 = -h.rs() * rr;
        let d_rotor_omega = jm * phir;
        // d(φsᵀ J is)/dφs = (J is)ᵀ + φsᵀ J Hss
        let d_torque = -(jm * is).transpose() * np - phis.transpose() * jm * h.ss * np;
        jac.fixed_view_mut::<2, 2>(0, 0).copy_from(&d_rotor_phis);
        jac.fixed_view_mut::<2, 1>(0, 2).copy_from(&d_rotor_omega);
        jac.fixed_view_mut::<1, 2>(2, 0).copy_from(&d_torque);
        (SVector::<f64, 3>::new(rotor[0], rotor[1], torque), jac)
    })?;
    let phis = Flux2::new(x[0], x[1]);
    let omega = x[2];
    let (is, _) = model.currents(&phis, &phir);
    let us = is * params.rs + jm * phis * omega_s;
    let state = ImState::new(phis, phir, omega);
    let inputs = ImInputs { us, omega_s, load_torque };
    Equilibrium::at(state, inputs, model, iterations)
}

/// Operating point on the line ωs = 0.
pub fn equilibrium_zero_stator_speed<M: EnergyModel + ?Sized>(
    phir_mag: f64,
    load_torque: f64,
    model: &M,
    params: &MotorParams,
) -> Result<Equilibrium> {
    equilibrium_at_stator_speed(phir_mag, 0.0, load_torque, model, params)
}
