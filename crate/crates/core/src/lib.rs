//! Numerical laboratory for the saturated induction motor.
//!
//! The crate is organised bottom-up:
//!
//! - [`magnetics`]: energy functions of the machine and everything derived
//!   from them (currents, torque, Hessian blocks, third derivatives and the
//!   `(a, b, σ)` saliency parametrization).
//! - [`dynamics`]: the dq-frame state-space model, a fixed-step RK4
//!   simulator and Newton solvers for steady operating points.
//! - [`injection`]: pulsating HF injection waveforms, demodulation of the
//!   simulated currents and least-squares saliency extraction.
//! - [`observability`]: linearization, observability matrices with and
//!   without injection, numerical rank and condition numbers.
//! - [`lab`]: configuration files, the batch experiments and CSV output
//!   used by the `imlab` binary.
//!
//! All quantities are SI; angles are in radians and speeds are electrical
//! angular speeds in rad/s. Injection frequencies are in Hz.
//!
//! ```
//! use imlab::magnetics::{EnergyModel, SaturatedMagnetics, SaliencyParams};
//! use imlab::Flux2;
//!
//! let model = SaturatedMagnetics::table_two();
//! let h = model.hessian(&Flux2::new(1.3, 0.0), &Flux2::new(1.27, 0.0));
//! let sal = SaliencyParams::from_hessian(&h.ss).unwrap();
//! assert!(sal.b > 0.0);
//! ```

pub mod dynamics;
pub mod error;
pub mod fd;
pub mod injection;
pub mod lab;
pub mod linalg;
pub mod magnetics;
pub mod observability;

pub use error::{Error, Result};
pub use linalg::{Flux2, Mat2, Vec2};
