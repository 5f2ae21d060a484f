//! Magnetic energy functions of the induction motor and their derivatives.
//!
//! The magnetic energy `H(φs, φr)` closes the dq model: the currents are its
//! gradient, the 2×2 Hessian blocks drive the linearized dynamics, and the
//! stator block `∂²H/∂φs²` is the saliency matrix seen by HF injection.
//!
//! Every energy here depends on the fluxes only through the three
//! rotation- and reflection-invariant quantities `‖φs‖²/2`, `φsᵀφr` and
//! `‖φr‖²/2`.

use crate::error::{Error, Result};
use crate::fd;
use crate::linalg::{cond2, j, Flux2, Mat2, Vec2};
use std::f64::consts::PI;
use std::fmt;

/// Condition number above which a Hessian block is reported as degenerate.
pub const DEGENERACY_COND: f64 = 1e12;

/// Second derivatives of the energy at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianBlocks {
    /// `∂²H/∂φs²`, the saliency matrix.
    pub ss: Mat2,
    /// `∂²H/∂φs∂φr`; row index follows `φs`, column index follows `φr`.
    pub sr: Mat2,
    /// `∂²H/∂φr²`.
    pub rr: Mat2,
}

impl HessianBlocks {
    /// `∂²H/∂φr∂φs`, equal to `srᵀ` by reciprocity.
    pub fn rs(&self) -> Mat2 {
        self.sr.transpose()
    }

    /// Fails if any block is singular beyond [`DEGENERACY_COND`].
    pub fn check_non_degenerate(&self) -> Result<()> {
        for (what, m) in [("Hss", &self.ss), ("Hsr", &self.sr), ("Hrr", &self.rr)] {
            let cond = cond2(m);
            if cond.is_nan() || cond > DEGENERACY_COND {
                return Err(Error::Degenerate { what, cond });
            }
        }
        Ok(())
    }
}

/// Behaviour contract for a magnetic energy `H(φs, φr)`.
pub trait EnergyModel: Send + Sync {
    /// Magnetic energy in J.
    fn energy(&self, phis: &Flux2, phir: &Flux2) -> f64;

    /// Stator and rotor currents `(∂H/∂φs, ∂H/∂φr)` in A.
    fn currents(&self, phis: &Flux2, phir: &Flux2) -> (Vec2, Vec2);

    /// Hessian blocks in H⁻¹.
    fn hessian(&self, phis: &Flux2, phir: &Flux2) -> HessianBlocks;

    /// `(∂/∂φs (Hss·u), ∂/∂φr (Hss·u))` for a voltage direction `u`.
    fn third_contractions(&self, phis: &Flux2, phir: &Flux2, u: &Vec2) -> (Mat2, Mat2);
}

impl<M: EnergyModel + ?Sized> EnergyModel for &M {
    fn energy(&self, phis: &Flux2, phir: &Flux2) -> f64 {
        (**self).energy(phis, phir)
    }
    fn currents(&self, phis: &Flux2, phir: &Flux2) -> (Vec2, Vec2) {
        (**self).currents(phis, phir)
    }
    fn hessian(&self, phis: &Flux2, phir: &Flux2) -> HessianBlocks {
        (**self).hessian(phis, phir)
    }
    fn third_contractions(&self, phis: &Flux2, phir: &Flux2, u: &Vec2) -> (Mat2, Mat2) {
        (**self).third_contractions(phis, phir, u)
    }
}

/// Hessian blocks with a degeneracy check.
pub fn hessian_blocks<M: EnergyModel + ?Sized>(
    model: &M,
    phis: &Flux2,
    phir: &Flux2,
) -> Result<HessianBlocks> {
    let h = model.hessian(phis, phir);
    h.check_non_degenerate()?;
    Ok(h)
}

/// Inductances of the unsaturated model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMagParams {
    /// Mutual inductance (H).
    pub lm: f64,
    /// Leakage inductance (H).
    pub ll: f64,
}

impl LinearMagParams {
    pub const TABLE_TWO: LinearMagParams = LinearMagParams { lm: 0.42, ll: 0.12 };

    pub fn validate(&self) -> Result<()> {
        if !(self.lm > 0.0 && self.ll > 0.0) || !self.lm.is_finite() || !self.ll.is_finite() {
            return Err(Error::InvalidInput(format!(
                "inductances must be positive and finite (lm = {}, ll = {})",
                self.lm, self.ll
            )));
        }
        Ok(())
    }
}

/// Inductances plus the quartic saturation factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatedMagParams {
    pub lm: f64,
    pub ll: f64,
    /// Mutual saturation factor (Wb⁻²).
    pub eps_m: f64,
    /// Leakage saturation factor (Wb⁻²).
    pub eps_l: f64,
}

impl SaturatedMagParams {
    pub const TABLE_TWO: SaturatedMagParams =
        SaturatedMagParams { lm: 0.42, ll: 0.12, eps_m: 0.1, eps_l: 1.0 };

    pub fn validate(&self) -> Result<()> {
        LinearMagParams { lm: self.lm, ll: self.ll }.validate()?;
        if !(self.eps_m >= 0.0 && self.eps_l >= 0.0) || !self.eps_m.is_finite() || !self.eps_l.is_finite() {
            return Err(Error::InvalidInput(format!(
                "saturation factors must be non-negative (eps_m = {}, eps_l = {})",
                self.eps_m, self.eps_l
            )));
        }
        Ok(())
    }
}

/// Shared kernel of the quadratic and quartic energies, written in the
/// magnetizing/leakage coordinates `x = φs + φr`, `y = φs − φr`:
///
/// `H = (1 + εm‖x‖²)‖x‖²/(4(2Lm+Ll)) + (1 + εl‖x‖²)‖y‖²/(4Ll)`.
///
/// With `εm = εl = 0` every expression reduces bit-for-bit to the linear model.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    inv_a: f64, // 1/(2Lm + Ll)
    inv_l: f64, // 1/Ll
    eps_m: f64,
    eps_l: f64,
}

impl Kernel {
    fn new(p: &SaturatedMagParams) -> Self {
        Kernel {
            inv_a: 1.0 / (2.0 * p.lm + p.ll),
            inv_l: 1.0 / p.ll,
            eps_m: p.eps_m,
            eps_l: p.eps_l,
        }
    }

    fn energy(&self, phis: &Flux2, phir: &Flux2) -> f64 {
        let x2 = (phis + phir).norm_squared();
        let y2 = (phis - phir).norm_squared();
        (1.0 + self.eps_m * x2) * x2 * self.inv_a / 4.0 + (1.0 + self.eps_l * x2) * y2 * self.inv_l / 4.0
    }

    /// Scalars `g = ∂H/∂x / x` and `c = ∂H/∂y / y`.
    fn coefficients(&self, x2: f64, y2: f64) -> (f64, f64) {
        let g = (1.0 + 2.0 * self.eps_m * x2) * self.inv_a / 2.0 + self.eps_l * y2 * self.inv_l / 2.0;
        let c = (1.0 + self.eps_l * x2) * self.inv_l / 2.0;
        (g, c)
    }

    fn currents(&self, phis: &Flux2, phir: &Flux2) -> (Vec2, Vec2) {
        let x = phis + phir;
        let y = phis - phir;
        let (g, c) = self.coefficients(x.norm_squared(), y.norm_squared());
        let hx = x * g;
        let hy = y * c;
        (hx + hy, hx - hy)
    }

    fn hessian(&self, phis: &Flux2, phir: &Flux2) -> HessianBlocks {
        let x = phis + phir;
        let y = phis - phir;
        let (g, c) = self.coefficients(x.norm_squared(), y.norm_squared());
        let hxx = Mat2::identity() * g + x * x.transpose() * (2.0 * self.eps_m * self.inv_a);
        let hxy = x * y.transpose() * (self.eps_l * self.inv_l);
        let hyx = hxy.transpose();
        let hyy = Mat2::identity() * c;
        let sym = hxy + hyx;
        let diag = hxx + hyy;
        HessianBlocks { ss: diag + sym, sr: hxx - hxy + hyx - hyy, rr: diag - sym }
    }

    fn third_contractions(&self, phis: &Flux2, phir: &Flux2, u: &Vec2) -> (Mat2, Mat2) {
        let x = phis + phir;
        let y = phis - phir;
        let id = Mat2::identity();
        let km = 2.0 * self.eps_m * self.inv_a;
        let kl = self.eps_l * self.inv_l;
        let xu = x.dot(u);
        let yu = y.dot(u);
        let dx = (u * x.transpose() + id * xu + x * u.transpose()) * km
            + (id * yu + y * u.transpose() + u * x.transpose()) * kl;
        let dy = (u * y.transpose() + x * u.transpose() + id * xu) * kl;
        (dx + dy, dx - dy)
    }
}

/// Unsaturated machine with linear current-flux relations:
/// `H = ‖φs + φr‖²/(4(2Lm+Ll)) + ‖φs − φr‖²/(4Ll)`.
#[derive(Debug, Clone, Copy)]
pub struct LinearMagnetics {
    params: LinearMagParams,
    kernel: Kernel,
}

impl LinearMagnetics {
    pub fn new(params: LinearMagParams) -> Result<Self> {
        params.validate()?;
        let sat = SaturatedMagParams { lm: params.lm, ll: params.ll, eps_m: 0.0, eps_l: 0.0 };
        Ok(LinearMagnetics { params, kernel: Kernel::new(&sat) })
    }

    /// `Lm = 0.42 H`, `Ll = 0.12 H`.
    pub fn table_two() -> Self {
        Self::new(LinearMagParams::TABLE_TWO).expect("valid constants")
    }

    pub fn params(&self) -> &LinearMagParams {
        &self.params
    }

    /// Diagonal value of `Hss` (and `Hrr`), constant everywhere.
    pub fn self_coefficient(&self) -> f64 {
        self.kernel.inv_a / 2.0 + self.kernel.inv_l / 2.0
    }

    /// Diagonal value of `Hsr`, constant everywhere.
    pub fn mutual_coefficient(&self) -> f64 {
        self.kernel.inv_a / 2.0 - self.kernel.inv_l / 2.0
    }
}

impl EnergyModel for LinearMagnetics {
    fn energy(&self, phis: &Flux2, phir: &Flux2) -> f64 {
        self.kernel.energy(phis, phir)
    }
    fn currents(&self, phis: &Flux2, phir: &Flux2) -> (Vec2, Vec2) {
        self.kernel.currents(phis, phir)
    }
    fn hessian(&self, phis: &Flux2, phir: &Flux2) -> HessianBlocks {
        self.kernel.hessian(phis, phir)
    }
    fn third_contractions(&self, _phis: &Flux2, _phir: &Flux2, _u: &Vec2) -> (Mat2, Mat2) {
        (Mat2::zeros(), Mat2::zeros())
    }
}

/// Quartic saturated energy
/// `H = (1 + εm‖φs+φr‖²)‖φs+φr‖²/(4(2Lm+Ll)) + (1 + εl‖φs+φr‖²)‖φs−φr‖²/(4Ll)`.
#[derive(Debug, Clone, Copy)]
pub struct SaturatedMagnetics {
    params: SaturatedMagParams,
    kernel: Kernel,
}

impl SaturatedMagnetics {
    pub fn new(params: SaturatedMagParams) -> Result<Self> {
        params.validate()?;
        Ok(SaturatedMagnetics { params, kernel: Kernel::new(&params) })
    }

    /// `Lm = 0.42 H`, `Ll = 0.12 H`, `εm = 0.1 Wb⁻²`, `εl = 1 Wb⁻²`.
    pub fn table_two() -> Self {
        Self::new(SaturatedMagParams::TABLE_TWO).expect("valid constants")
    }

    pub fn params(&self) -> &SaturatedMagParams {
        &self.params
    }
}

impl EnergyModel for SaturatedMagnetics {
    fn energy(&self, phis: &Flux2, phir: &Flux2) -> f64 {
        self.kernel.energy(phis, phir)
    }
    fn currents(&self, phis: &Flux2, phir: &Flux2) -> (Vec2, Vec2) {
        self.kernel.currents(phis, phir)
    }
    fn hessian(&self, phis: &Flux2, phir: &Flux2) -> HessianBlocks {
        self.kernel.hessian(phis, phir)
    }
    fn third_contractions(&self, phis: &Flux2, phir: &Flux2, u: &Vec2) -> (Mat2, Mat2) {
        self.kernel.third_contractions(phis, phir, u)
    }
}

/// The three invariants `(‖φs‖²/2, φsᵀφr, ‖φr‖²/2)`.
pub fn invariants(phis: &Flux2, phir: &Flux2) -> [f64; 3] {
    [phis.norm_squared() / 2.0, phis.dot(phir), phir.norm_squared() / 2.0]
}

type ScalarFn = Box<dyn Fn([f64; 3]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn([f64; 3]) -> [f64; 3] + Send + Sync>;

/// User-defined energy `h(‖φs‖²/2, φsᵀφr, ‖φr‖²/2)` given with its first
/// partial derivatives. Second and third derivatives are obtained by finite
/// differences of the resulting currents (see [`crate::fd`]).
pub struct InvariantEnergy {
    h: ScalarFn,
    grad: GradFn,
}

impl InvariantEnergy {
    pub fn new(
        h: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static,
        grad: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static,
    ) -> Self {
        InvariantEnergy { h: Box::new(h), grad: Box::new(grad) }
    }

    fn currents_packed(&self, x: &fd::Point4) -> fd::Point4 {
        let (phis, phir) = fd::unpack(x);
        let (is, ir) = self.currents(&phis, &phir);
        fd::Point4::new(is[0], is[1], ir[0], ir[1])
    }
}

impl fmt::Debug for InvariantEnergy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("InvariantEnergy { .. }")
    }
}

impl EnergyModel for InvariantEnergy {
    fn energy(&self, phis: &Flux2, phir: &Flux2) -> f64 {
        (self.h)(invariants(phis, phir))
    }

    fn currents(&self, phis: &Flux2, phir: &Flux2) -> (Vec2, Vec2) {
        let [h1, h2, h3] = (self.grad)(invariants(phis, phir));
        (phis * h1 + phir * h2, phis * h2 + phir * h3)
    }

    fn hessian(&self, phis: &Flux2, phir: &Flux2) -> HessianBlocks {
        let x = fd::pack(phis, phir);
        let jac = fd::jacobian(|p| self.currents_packed(p), &x);
        let (ss, sr, rs, rr) = fd::blocks(&jac);
        HessianBlocks {
            ss: (ss + ss.transpose()) * 0.5,
            sr: (sr + rs.transpose()) * 0.5,
            rr: (rr + rr.transpose()) * 0.5,
        }
    }

    fn third_contractions(&self, phis: &Flux2, phir: &Flux2, u: &Vec2) -> (Mat2, Mat2) {
        let x = fd::pack(phis, phir);
        fd::directional_jacobian(
            |p| {
                let c = self.currents_packed(p);
                Vec2::new(c[0], c[1])
            },
            &x,
            u,
        )
    }
}

/// Runtime choice between the built-in energies.
#[derive(Debug, Clone, Copy)]
pub enum Magnetics {
    Linear(LinearMagnetics),
    Saturated(SaturatedMagnetics),
}

impl Magnetics {
    pub fn is_linear(&self) -> bool {
        matches!(self, Magnetics::Linear(_))
    }
}

impl EnergyModel for Magnetics {
    fn energy(&self, phis: &Flux2, phir: &Flux2) -> f64 {
        match self {
            Magnetics::Linear(m) => m.energy(phis, phir),
            Magnetics::Saturated(m) => m.energy(phis, phir),
        }
    }
    fn currents(&self, phis: &Flux2, phir: &Flux2) -> (Vec2, Vec2) {
        match self {
            Magnetics::Linear(m) => m.currents(phis, phir),
            Magnetics::Saturated(m) => m.currents(phis, phir),
        }
    }
    fn hessian(&self, phis: &Flux2, phir: &Flux2) -> HessianBlocks {
        match self {
            Magnetics::Linear(m) => m.hessian(phis, phir),
            Magnetics::Saturated(m) => m.hessian(phis, phir),
        }
    }
    fn third_contractions(&self, phis: &Flux2, phir: &Flux2, u: &Vec2) -> (Mat2, Mat2) {
        match self {
            Magnetics::Linear(m) => m.third_contractions(phis, phir, u),
            Magnetics::Saturated(m) => m.third_contractions(phis, phir, u),
        }
    }
}

/// Electromagnetic torque from the rotor side, `np·φrᵀ·J·ir`.
pub fn torque_rotor_side(phir: &Flux2, ir: &Vec2, pole_pairs: u32) -> f64 {
    pole_pairs as f64 * phir.dot(&(j() * ir))
}

/// Electromagnetic torque from the stator side, `−np·φsᵀ·J·is`.
pub fn torque_stator_side(phis: &Flux2, is: &Vec2, pole_pairs: u32) -> f64 {
    -(pole_pairs as f64) * phis.dot(&(j() * is))
}

/// `(a, b, σ)` parametrization of a symmetric 2×2 saliency matrix:
/// `[[a + b cos σ, b sin σ], [b sin σ, a − b cos σ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaliencyParams {
    /// Mean inverse inductance (H⁻¹).
    pub a: f64,
    /// Saliency amplitude (H⁻¹), non-negative.
    pub b: f64,
    /// Saliency orientation in `(−π, π]`; `0` when `b = 0`.
    pub sigma: f64,
}

impl SaliencyParams {
    /// Tolerance on `|h12 − h21|`, relative to `max(1, ‖h‖_max)`.
    pub const SYMMETRY_TOL: f64 = 1e-10;

    pub fn from_hessian(h: &Mat2) -> Result<Self> {
        let scale = h.abs().max().max(1.0);
        if (h[(0, 1)] - h[(1, 0)]).abs() > Self::SYMMETRY_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "saliency matrix is not symmetric (h12 = {}, h21 = {})",
                h[(0, 1)],
                h[(1, 0)]
            )));
        }
        let a = (h[(0, 0)] + h[(1, 1)]) / 2.0;
        let p = (h[(0, 0)] - h[(1, 1)]) / 2.0;
        let q = (h[(0, 1)] + h[(1, 0)]) / 2.0;
        Ok(Self::from_components(a, p, q))
    }

    /// From `a`, `p = b cos σ` and `q = b sin σ`.
    pub fn from_components(a: f64, p: f64, q: f64) -> Self {
        let b = p.hypot(q);
        let sigma = if b == 0.0 { 0.0 } else { wrap_angle(q.atan2(p)) };
        SaliencyParams { a, b, sigma }
    }

    pub fn matrix(&self) -> Mat2 {
        let (s, c) = self.sigma.sin_cos();
        Mat2::new(self.a + self.b * c, self.b * s, self.b * s, self.a - self.b * c)
    }

    /// Virtual current `a·ũ + b‖ũ‖(cos(σ−θ), sin(σ−θ))` for an injection of
    /// magnitude `u_mag` oriented at `theta`.
    pub fn virtual_current(&self, theta: f64, u_mag: f64) -> Vec2 {
        let (st, ct) = theta.sin_cos();
        let (sd, cd) = (self.sigma - theta).sin_cos();
        Vec2::new(self.a * ct + self.b * cd, self.a * st + self.b * sd) * u_mag
    }
}

/// Wrap an angle into `(−π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut w = angle % (2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    } else if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{reflection, rot};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn finite_difference_hessian<M: EnergyModel>(m: &M, phis: &Flux2, phir: &Flux2) -> nalgebra::Matrix4<f64> {
        fd::hessian(
            |p| {
                let (s, r) = fd::unpack(p);
                m.energy(&s, &r)
            },
            &fd::pack(phis, phir),
        )
    }

    #[test]
    fn energy_at_origin_is_zero() {
        let z = Flux2::zeros();
        assert_eq!(LinearMagnetics::table_two().energy(&z, &z), 0.0);
        assert_eq!(SaturatedMagnetics::table_two().energy(&z, &z), 0.0);
    }

    #[test]
    fn linear_energy_closed_form() {
        let m = LinearMagnetics::table_two();
        let e = Flux2::new(1.0, 0.0);
        // ‖2e_d‖² / (4·0.96)
        assert!(close(m.energy(&e, &e), 4.0 / (4.0 * 0.96), 1e-15));
    }

    #[test]
    fn linear_currents_closed_form() {
        let m = LinearMagnetics::table_two();
        let e = Flux2::new(1.0, 0.0);
        let (is, ir) = m.currents(&e, &e);
        let expected = 2.0 / (2.0 * 0.96);
        assert!(close(is[0], expected, 1e-14) && is[1] == 0.0);
        assert!(close(ir[0], expected, 1e-14) && ir[1] == 0.0);
        let (is0, ir0) = m.currents(&Flux2::zeros(), &Flux2::zeros());
        assert_eq!((is0, ir0), (Vec2::zeros(), Vec2::zeros()));
    }

    #[test]
    fn linear_hessian_constants() {
        let m = LinearMagnetics::table_two();
        let h = m.hessian(&Flux2::new(0.3, -2.0), &Flux2::new(1.1, 0.4));
        let alpha = 1.0 / (2.0 * 0.96) + 1.0 / 0.24;
        let beta = 1.0 / (2.0 * 0.96) - 1.0 / 0.24;
        assert!(close(alpha, 4.6875, 1e-15));
        assert!(close(beta, -3.6458333333333335, 1e-15));
        assert!((h.ss - Mat2::identity() * alpha).abs().max() < 1e-14);
        assert!((h.rr - Mat2::identity() * alpha).abs().max() < 1e-14);
        assert!((h.sr - Mat2::identity() * beta).abs().max() < 1e-14);
        assert_eq!(m.self_coefficient(), h.ss[(0, 0)]);
        assert_eq!(m.mutual_coefficient(), h.sr[(0, 0)]);
    }

    #[test]
    fn saturated_hessian_at_origin_equals_linear() {
        let z = Flux2::zeros();
        let hs = SaturatedMagnetics::table_two().hessian(&z, &z);
        let hl = LinearMagnetics::table_two().hessian(&z, &z);
        assert_eq!(hs, hl);
    }

    #[test]
    fn saturated_gradient_matches_finite_differences() {
        let m = SaturatedMagnetics::table_two();
        let phis = Flux2::new(1.0, 0.2);
        let phir = Flux2::new(0.9, 0.0);
        let g = fd::gradient(
            |p| {
                let (s, r) = fd::unpack(p);
                m.energy(&s, &r)
            },
            &fd::pack(&phis, &phir),
        );
        let (is, ir) = m.currents(&phis, &phir);
        let analytic = fd::pack(&is, &ir);
        assert!((analytic - g).norm() / analytic.norm() < 1e-6);
    }

    #[test]
    fn third_contractions_linear_and_zero_u() {
        let lin = LinearMagnetics::table_two();
        let p = Flux2::new(1.0, 0.5);
        let (a, b) = lin.third_contractions(&p, &p, &Vec2::new(20.0, 3.0));
        assert_eq!((a, b), (Mat2::zeros(), Mat2::zeros()));
        let sat = SaturatedMagnetics::table_two();
        let (a, b) = sat.third_contractions(&p, &Flux2::new(0.2, 1.0), &Vec2::zeros());
        assert_eq!((a, b), (Mat2::zeros(), Mat2::zeros()));
    }

    #[test]
    fn saturated_third_contractions_match_finite_differences() {
        let m = SaturatedMagnetics::table_two();
        let phis = Flux2::new(1.0, 0.0);
        let phir = Flux2::new(1.0, 0.0);
        let u = Vec2::new(20.0, 0.0);
        let (dss, dsr) = m.third_contractions(&phis, &phir, &u);
        // Oracle: central differences of Hss·u.
        let h = 1e-5;
        let mut fd_ss = Mat2::zeros();
        let mut fd_sr = Mat2::zeros();
        for k in 0..2 {
            let mut e = Flux2::zeros();
            e[k] = h;
            let col_s = (m.hessian(&(phis + e), &phir).ss * u - m.hessian(&(phis - e), &phir).ss * u) / (2.0 * h);
            let col_r = (m.hessian(&phis, &(phir + e)).ss * u - m.hessian(&phis, &(phir - e)).ss * u) / (2.0 * h);
            fd_ss.set_column(k, &col_s);
            fd_sr.set_column(k, &col_r);
        }
        assert!((dss - fd_ss).norm() / fd_ss.norm() < 1e-5);
        assert!((dsr - fd_sr).norm() / fd_sr.norm() < 1e-5);
    }

    #[test]
    fn torque_collinear_is_zero() {
        let m = LinearMagnetics::table_two();
        let e = Flux2::new(1.0, 0.0);
        let (is, ir) = m.currents(&e, &e);
        assert_eq!(torque_rotor_side(&e, &ir, 2), 0.0);
        assert_eq!(torque_stator_side(&e, &is, 2), 0.0);
        assert_eq!(torque_stator_side(&Flux2::new(0.4, 1.0), &Vec2::zeros(), 2), 0.0);
    }

    #[test]
    fn torque_formulas_agree_saturated() {
        let m = SaturatedMagnetics::table_two();
        let phis = Flux2::new(1.0, 0.2);
        let phir = Flux2::new(0.9, -0.1);
        let (is, ir) = m.currents(&phis, &phir);
        let tr = torque_rotor_side(&phir, &ir, 2);
        let ts = torque_stator_side(&phis, &is, 2);
        assert!(tr.abs() > 0.1);
        assert!((tr - ts).abs() <= 1e-10 * tr.abs());
    }

    #[test]
    fn saliency_examples() {
        let s = SaliencyParams::from_hessian(&(Mat2::identity() * 4.6875)).unwrap();
        assert_eq!(s, SaliencyParams { a: 4.6875, b: 0.0, sigma: 0.0 });

        let s = SaliencyParams::from_hessian(&Mat2::new(5.0, 1.0, 1.0, 3.0)).unwrap();
        assert!(close(s.a, 4.0, 1e-15));
        assert!(close(s.b, 2f64.sqrt(), 1e-15));
        assert!(close(s.sigma, PI / 4.0, 1e-15));

        let s = SaliencyParams::from_hessian(&Mat2::new(3.0, 0.0, 0.0, 5.0)).unwrap();
        assert_eq!(s.sigma, PI);
        let s = SaliencyParams::from_hessian(&Mat2::new(3.0, -0.0, -0.0, 5.0)).unwrap();
        assert_eq!(s.sigma, PI);
    }

    #[test]
    fn saliency_rejects_asymmetric() {
        assert!(SaliencyParams::from_hessian(&Mat2::new(5.0, 1.0, 1.1, 3.0)).is_err());
    }

    #[test]
    fn degenerate_blocks_are_flagged() {
        let h = HessianBlocks { ss: Mat2::identity(), sr: Mat2::new(1.0, 1.0, 1.0, 1.0), rr: Mat2::identity() };
        assert!(matches!(h.check_non_degenerate(), Err(Error::Degenerate { what: "Hsr", .. })));
        let sat = SaturatedMagnetics::table_two();
        assert!(hessian_blocks(&sat, &Flux2::new(1.3, 0.1), &Flux2::new(1.27, 0.0)).is_ok());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(LinearMagnetics::new(LinearMagParams { lm: 0.0, ll: 0.1 }).is_err());
        assert!(SaturatedMagnetics::new(SaturatedMagParams { eps_m: -0.1, ..SaturatedMagParams::TABLE_TWO }).is_err());
    }

    #[test]
    fn invariant_energy_wrapper_matches_saturated() {
        // The quartic energy re-expressed in the three invariants.
        let p = SaturatedMagParams::TABLE_TWO;
        let (ia, il) = (1.0 / (2.0 * p.lm + p.ll), 1.0 / p.ll);
        let (em, el) = (p.eps_m, p.eps_l);
        let wrapped = InvariantEnergy::new(
            move |[s, m, r]| {
                let x2 = 2.0 * s + 2.0 * m + 2.0 * r;
                let y2 = 2.0 * s - 2.0 * m + 2.0 * r;
                (1.0 + em * x2) * x2 * ia / 4.0 + (1.0 + el * x2) * y2 * il / 4.0
            },
            move |[s, m, r]| {
                let x2 = 2.0 * s + 2.0 * m + 2.0 * r;
                let y2 = 2.0 * s - 2.0 * m + 2.0 * r;
                // dH/dx2 and dH/dy2, then chain rule through x2, y2.
                let hx = (1.0 + 2.0 * em * x2) * ia / 4.0 + el * y2 * il / 4.0;
                let hy = (1.0 + el * x2) * il / 4.0;
                [2.0 * (hx + hy), 2.0 * (hx - hy), 2.0 * (hx + hy)]
            },
        );
        let sat = SaturatedMagnetics::table_two();
        let phis = Flux2::new(1.2, 0.3);
        let phir = Flux2::new(1.0, -0.2);
        assert!(close(wrapped.energy(&phis, &phir), sat.energy(&phis, &phir), 1e-13));
        let (a, b) = wrapped.currents(&phis, &phir);
        let (c, d) = sat.currents(&phis, &phir);
        assert!((a - c).norm() < 1e-12 && (b - d).norm() < 1e-12);
        let hw = wrapped.hessian(&phis, &phir);
        let hs = sat.hessian(&phis, &phir);
        let scale = hs.ss.norm();
        assert!((hw.ss - hs.ss).norm() < 1e-7 * scale);
        assert!((hw.sr - hs.sr).norm() < 1e-7 * scale);
        assert!((hw.rr - hs.rr).norm() < 1e-7 * scale);
        let u = Vec2::new(20.0, -5.0);
        let (w1, w2) = wrapped.third_contractions(&phis, &phir, &u);
        let (s1, s2) = sat.third_contractions(&phis, &phir, &u);
        assert!((w1 - s1).norm() < 1e-5 * s1.norm());
        assert!((w2 - s2).norm() < 1e-5 * s2.norm());
    }

    fn flux() -> impl Strategy<Value = Flux2> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(d, q)| Flux2::new(d, q))
    }

    proptest! {
        #[test]
        fn rotation_and_reflection_invariance(s in flux(), r in flux(), eta in -PI..PI) {
            for m in [Magnetics::Linear(LinearMagnetics::table_two()), Magnetics::Saturated(SaturatedMagnetics::table_two())] {
                let e0 = m.energy(&s, &r);
                let er = m.energy(&(rot(eta) * s), &(rot(eta) * r));
                let es = m.energy(&(reflection() * s), &(reflection() * r));
                prop_assert!((er - e0).abs() <= 1e-12 * e0.abs().max(1e-300) + 1e-15);
                prop_assert!((es - e0).abs() <= 1e-12 * e0.abs().max(1e-300) + 1e-15);
            }
        }

        #[test]
        fn hessian_matches_energy_second_differences(s in flux(), r in flux()) {
            let m = SaturatedMagnetics::table_two();
            let h = m.hessian(&s, &r);
            let (ss, sr, rs, rr) = fd::blocks(&finite_difference_hessian(&m, &s, &r));
            let scale = h.ss.norm().max(h.rr.norm());
            prop_assert!((h.ss - ss).norm() < 1e-5 * scale);
            prop_assert!((h.sr - sr).norm() < 1e-5 * scale);
            prop_assert!((h.rs() - rs).norm() < 1e-5 * scale);
            prop_assert!((h.rr - rr).norm() < 1e-5 * scale);
            prop_assert_eq!(h.ss, h.ss.transpose());
            prop_assert_eq!(h.rr, h.rr.transpose());
        }

        #[test]
        fn zero_saturation_equals_linear(s in flux(), r in flux(), ud in -30.0..30.0f64) {
            let lin = LinearMagnetics::table_two();
            let sat = SaturatedMagnetics::new(SaturatedMagParams { eps_m: 0.0, eps_l: 0.0, ..SaturatedMagParams::TABLE_TWO }).unwrap();
            prop_assert_eq!(lin.energy(&s, &r), sat.energy(&s, &r));
            prop_assert_eq!(lin.currents(&s, &r), sat.currents(&s, &r));
            prop_assert_eq!(lin.hessian(&s, &r), sat.hessian(&s, &r));
            let u = Vec2::new(ud, 1.0);
            prop_assert_eq!(lin.third_contractions(&s, &r, &u), sat.third_contractions(&s, &r, &u));
        }

        #[test]
        fn saliency_reconstructs_input(h11 in -10.0..10.0f64, h12 in -10.0..10.0f64, h22 in -10.0..10.0f64) {
            let h = Mat2::new(h11, h12, h12, h22);
            let s = SaliencyParams::from_hessian(&h).unwrap();
            prop_assert!(s.b >= 0.0);
            prop_assert!(s.sigma > -PI && s.sigma <= PI);
            prop_assert!((s.matrix() - h).abs().max() < 1e-12);
        }

        #[test]
        fn linear_saliency_is_degenerate(s in flux(), r in flux()) {
            let m = LinearMagnetics::table_two();
            let sal = SaliencyParams::from_hessian(&m.hessian(&s, &r).ss).unwrap();
            prop_assert_eq!(sal.b, 0.0);
            prop_assert!((sal.a - 4.6875).abs() < 1e-14);
        }
    }
}
