//! Central finite differences on functions of the flux pair `(φs, φr)`.
//!
//! The flux pair is packed as `[φs_d, φs_q, φr_d, φr_q]`. Step sizes:
//!
//! - first derivatives: `h = max(1e-6, 1e-5·‖φ‖)` Wb per component;
//! - second differences of a scalar and mixed third-order differences:
//!   `h₂ = 0.1·√h`.
//!
//! These routines back the generic three-invariant energy wrapper and serve
//! as independent oracles for the analytic derivatives in tests.

use crate::linalg::{Flux2, Mat2, Vec2};
use nalgebra::{Matrix4, Vector4};

pub type Point4 = Vector4<f64>;

pub fn pack(phis: &Flux2, phir: &Flux2) -> Point4 {
    Point4::new(phis[0], phis[1], phir[0], phir[1])
}

pub fn unpack(x: &Point4) -> (Flux2, Flux2) {
    (Flux2::new(x[0], x[1]), Flux2::new(x[2], x[3]))
}

pub fn gradient_step(x: &Point4) -> f64 {
    (1e-5 * x.norm()).max(1e-6)
}

pub fn second_step(x: &Point4) -> f64 {
    0.1 * gradient_step(x).sqrt()
}

fn unit(k: usize) -> Point4 {
    let mut e = Point4::zeros();
    e[k] = 1.0;
    e
}

/// Central-difference gradient of a scalar function.
pub fn gradient(f: impl Fn(&Point4) -> f64, x: &Point4) -> Point4 {
    let h = gradient_step(x);
    Point4::from_fn(|k, _| {
        let e = unit(k) * h;
        (f(&(x + e)) - f(&(x - e))) / (2.0 * h)
    })
}

/// Hessian of a scalar function from second differences of its values.
pub fn hessian(f: impl Fn(&Point4) -> f64, x: &Point4) -> Matrix4<f64> {
    let h = second_step(x);
    let f0 = f(x);
    let mut out = Matrix4::zeros();
    for i in 0..4 {
        let ei = unit(i) * h;
        out[(i, i)] = (f(&(x + ei)) - 2.0 * f0 + f(&(x - ei))) / (h * h);
        for k in (i + 1)..4 {
            let ek = unit(k) * h;
            let v = (f(&(x + ei + ek)) - f(&(x + ei - ek)) - f(&(x - ei + ek))
                + f(&(x - ei - ek)))
                / (4.0 * h * h);
            out[(i, k)] = v;
            out[(k, i)] = v;
        }
    }
    out
}

/// Jacobian of a vector function; column `k` is `∂g/∂x_k`.
pub fn jacobian(g: impl Fn(&Point4) -> Point4, x: &Point4) -> Matrix4<f64> {
    let h = gradient_step(x);
    let mut out = Matrix4::zeros();
    for k in 0..4 {
        let e = unit(k) * h;
        let col = (g(&(x + e)) - g(&(x - e))) / (2.0 * h);
        out.set_column(k, &col);
    }
    out
}

/// Split a 4×4 matrix over `(φs, φr)` into its `(ss, sr, rs, rr)` 2×2 blocks.
pub fn blocks(m: &Matrix4<f64>) -> (Mat2, Mat2, Mat2, Mat2) {
    (
        m.fixed_view::<2, 2>(0, 0).into_owned(),
        m.fixed_view::<2, 2>(0, 2).into_owned(),
        m.fixed_view::<2, 2>(2, 0).into_owned(),
        m.fixed_view::<2, 2>(2, 2).into_owned(),
    )
}

/// Jacobian with respect to `(φs, φr)` of `φ ↦ (∂/∂ε) g_s(φs + εu, φr)`,
/// where `g_s` is the stator part of a gradient map. This is the
/// contraction `∂/∂φ (∂²H/∂φs² · u)` computed from the gradient alone with
/// a mixed second difference. Returns the `(s, r)` column blocks.
pub fn directional_jacobian(
    grad_s: impl Fn(&Point4) -> Vec2,
    x: &Point4,
    u: &Vec2,
) -> (Mat2, Mat2) {
    let h = second_step(x);
    let du = Point4::new(u[0], u[1], 0.0, 0.0);
    let scale = u.norm();
    if scale == 0.0 {
        return (Mat2::zeros(), Mat2::zeros());
    }
    let eps = h / scale;
    let mut out = nalgebra::Matrix2x4::<f64>::zeros();
    for k in 0..4 {
        let e = unit(k) * h;
        let d = (grad_s(&(x + du * eps + e)) - grad_s(&(x + du * eps - e))
            - grad_s(&(x - du * eps + e))
            + grad_s(&(x - du * eps - e)))
            / (4.0 * eps * h);
        out.set_column(k, &d);
    }
    (
        out.fixed_view::<2, 2>(0, 0).into_owned(),
        out.fixed_view::<2, 2>(0, 2).into_owned(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_polynomial_derivatives() {
        // f = x0^2 x1 + 3 x2 x3^2 - x0 x3
        let f = |x: &Point4| x[0] * x[0] * x[1] + 3.0 * x[2] * x[3] * x[3] - x[0] * x[3];
        let x = Point4::new(0.7, -1.2, 0.4, 2.0);
        let g = gradient(f, &x);
        let g_exact = Point4::new(
            2.0 * x[0] * x[1] - x[3],
            x[0] * x[0],
            3.0 * x[3] * x[3],
            6.0 * x[2] * x[3] - x[0],
        );
        assert!((g - g_exact).abs().max() < 1e-8);
        let h = hessian(f, &x);
        assert!((h[(0, 0)] - 2.0 * x[1]).abs() < 1e-6);
        assert!((h[(0, 1)] - 2.0 * x[0]).abs() < 1e-6);
        assert!((h[(3, 3)] - 6.0 * x[2]).abs() < 1e-6);
        assert!((h[(0, 3)] + 1.0).abs() < 1e-6);
    }
}
