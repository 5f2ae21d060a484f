//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, Matrix2, Vector2};

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Flux linkage 2-vector in the dq frame, components `(d, q)`, in Wb.
pub type Flux2 = Vector2<f64>;

/// Rotation by +π/2: `[[0, -1], [1, 0]]`.
#[inline]
pub fn j() -> Mat2 {
    Mat2::new(0.0, -1.0, 1.0, 0.0)
}

/// Rotation matrix of angle `eta`.
#[inline]
pub fn rot(eta: f64) -> Mat2 {
    let (s, c) = eta.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// Reflection `diag(1, -1)`.
#[inline]
pub fn reflection() -> Mat2 {
    Mat2::new(1.0, 0.0, 0.0, -1.0)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Relative tolerance below which a singular value is treated as an exact
/// zero by [`condition_number`]: `max(m, n) · ε · σ_max`.
fn zero_threshold(m: &DMatrix<f64>, sigma_max: f64) -> f64 {
    m.nrows().max(m.ncols()) as f64 * f64::EPSILON * sigma_max
}

/// Number of singular values strictly above `tol_rel · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, tol_rel: f64) -> usize {
    let sv = singular_values(m);
    let Some(&smax) = sv.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rel * smax).count()
}

/// Ratio of the largest to the smallest singular value.
///
/// Returns `f64::INFINITY` when the smallest singular value is zero to
/// working precision (at or below `max(m, n) · ε · σ_max`), i.e. when the
/// matrix is structurally rank deficient.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = singular_values(m);
    let (Some(&smax), Some(&smin)) = (sv.first(), sv.last()) else {
        return f64::INFINITY;
    };
    if smax == 0.0 || smin <= zero_threshold(m, smax) {
        return f64::INFINITY;
    }
    smax / smin
}

/// 2-norm condition number of a 2×2 matrix.
pub fn cond2(m: &Mat2) -> f64 {
    let sv = m.singular_values();
    let (hi, lo) = (sv[0].max(sv[1]), sv[0].min(sv[1]));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Copy a fixed-size matrix block into `dst` at `(row, col)`.
pub(crate) fn put(dst: &mut DMatrix<f64>, row: usize, col: usize, src: &Mat2) {
    for i in 0..2 {
        for k in 0..2 {
            dst[(row + i, col + k)] = src[(i, k)];
        }
    }
}

pub(crate) fn put_col(dst: &mut DMatrix<f64>, row: usize, col: usize, src: &Vec2) {
    dst[(row, col)] = src[0];
    dst[(row + 1, col)] = src[1];
}
