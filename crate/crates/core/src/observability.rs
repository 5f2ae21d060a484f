//! First-order observability of the linearized motor model.
//!
//! Without injection the measured output is `δis`; the matrix `O` gathers
//! `δis` and its first two time derivatives as linear functions of
//! `(δφs, δφr, δω, δTl)`. With injection the virtual measurement
//! `δĩs = Cv·δx` is added and the 8×5 matrix `Os = (C; Cv; CA; CvA)` is
//! used; `Os′ = (C; Cv; (CA)₂)` corresponds to the algebraic flux inversion
//! used by classical injection-based schemes.

use crate::dynamics::{rated, Equilibrium, MotorParams};
use crate::error::{Error, Result};
use crate::linalg::{cond2, j, put, put_col, Mat2, Vec2};
use crate::magnetics::{EnergyModel, DEGENERACY_COND};
use nalgebra::DMatrix;

pub use crate::linalg::{condition_number, numerical_rank, singular_values};

/// Default relative rank tolerance.
pub const RANK_TOL: f64 = 1e-8;

/// Default injection direction for `Cv` (V).
pub fn default_injection() -> Vec2 {
    Vec2::new(20.0, 0.0)
}

/// Row/column scaling applied before rank and conditioning.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Scaling {
    /// Raw SI units.
    #[default]
    Si,
    /// Per-unit on rated voltage, current and electrical speed.
    PerUnit,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    pub rank_tol: f64,
    pub scaling: Scaling,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { rank_tol: RANK_TOL, scaling: Scaling::Si }
    }
}

/// The intermediate matrices of the no-injection analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMatrices {
    pub m: Mat2,
    pub omega_r: Mat2,
    pub x_r: Mat2,
    /// `Hsr·J·φ̄r`.
    pub v: Vec2,
}

fn inverse_checked(m: &Mat2, what: &'static str) -> Result<Mat2> {
    let cond = cond2(m);
    if cond.is_nan() || cond > DEGENERACY_COND {
        return Err(Error::Degenerate { what, cond });
    }
    m.try_inverse().ok_or(Error::Degenerate { what, cond: f64::INFINITY })
}

/// `Ω_r = Rr·Hrs − Rr·Hrr·Hsr⁻¹·Hss`, `X_r = Hsr·J·Hsr⁻¹`,
/// `M = Hsr·Ω_r + Hss·J·ω̄s − X_r·Hss·ω̄g`, `v = Hsr·J·φ̄r`.
pub fn build_m(eq: &Equilibrium, params: &MotorParams) -> Result<MMatrices> {
    let h = &eq.hessian;
    let jm = j();
    let sr_inv = inverse_checked(&h.sr, "Hsr")?;
    let omega_r = h.rs() * params.rr - h.rr * sr_inv * h.ss * params.rr;
    let x_r = h.sr * jm * sr_inv;
    let m = h.sr * omega_r + h.ss * jm * eq.inputs.omega_s - x_r * h.ss * eq.omega_g;
    let v = h.sr * jm * eq.state.phir;
    inverse_checked(&m, "M")?;
    Ok(MMatrices { m, omega_r, x_r, v })
}

/// 6×6 observability matrix without injection; columns
/// `(δφs, δφr, δω, δTl)`, row blocks `δis`, `dδis/dt`, `d²δis/dt²`.
pub fn build_o(eq: &Equilibrium, params: &MotorParams) -> Result<DMatrix<f64>> {
    let mm = build_m(eq, params)?;
    let h = &eq.hessian;
    let jm = j();
    let np = params.np();
    let jl = params.inertia;
    let ws = eq.inputs.omega_s;
    let m_inv = inverse_checked(&mm.m, "M")?;
    let mut o = DMatrix::zeros(6, 6);
    put(&mut o, 0, 0, &h.ss);
    put(&mut o, 0, 2, &h.sr);
    put(&mut o, 2, 0, &(-mm.m));
    put_col(&mut o, 2, 4, &mm.v);
    let k = mm.v * (eq.is.transpose() * jm) * (np * np / jl);
    put(&mut o, 4, 0, &k);
    put_col(&mut o, 4, 4, &(mm.m * jm * m_inv * mm.v * ws));
    // The load torque enters the speed equation with a minus sign.
    put_col(&mut o, 4, 5, &(-mm.v * (np / jl)));
    Ok(o)
}

/// The next derivative row block `d³δis/dt³`, reduced modulo the rows of
/// `O`: `(np²/Jl)·v·īsᵀJ·dδφs/dt` with `dδφs/dt` taken from the stator
/// equation. Returns a 2×6 block.
pub fn o_next_derivative_block(eq: &Equilibrium, params: &MotorParams) -> Result<DMatrix<f64>> {
    let mm = build_m(eq, params)?;
    let h = &eq.hessian;
    let jm = j();
    let np = params.np();
    let k = mm.v * (eq.is.transpose() * jm) * (np * np / params.inertia);
    let mut blk = DMatrix::zeros(2, 6);
    put(&mut blk, 0, 0, &(k * (-h.ss * params.rs - jm * eq.inputs.omega_s)));
    put(&mut blk, 0, 2, &(k * (-h.sr * params.rs)));
    Ok(blk)
}

/// Linearized model with physical and virtual outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedModel {
    /// 5×5 state matrix over `(δφs, δφr, δω)`; the speed row is zero.
    pub a: DMatrix<f64>,
    /// 2×5 physical output `δīs = C·δx`.
    pub c: DMatrix<f64>,
    /// 2×5 virtual output `δĩs = Cv·δx`.
    pub cv: DMatrix<f64>,
    /// 6×6 state matrix over `(δφs, δφr, δω, δTl)` including the mechanics.
    pub a_full: DMatrix<f64>,
}

pub fn build_linearized<M: EnergyModel + ?Sized>(
    eq: &Equilibrium,
    u_tilde: &Vec2,
    params: &MotorParams,
    model: &M,
) -> LinearizedModel {
    let h = &eq.hessian;
    let jm = j();
    let (rs, rr) = (params.rs, params.rr);
    let ws = eq.inputs.omega_s;
    let mut a = DMatrix::zeros(5, 5);
    put(&mut a, 0, 0, &(-h.ss * rs - jm * ws));
    put(&mut a, 0, 2, &(-h.sr * rs));
    put(&mut a, 2, 0, &(-h.rs() * rr));
    put(&mut a, 2, 2, &(-h.rr * rr - jm * eq.omega_g));
    put_col(&mut a, 2, 4, &(jm * eq.state.phir));

    let mut c = DMatrix::zeros(2, 5);
    put(&mut c, 0, 0, &h.ss);
    put(&mut c, 0, 2, &h.sr);

    let (dss, dsr) = model.third_contractions(&eq.state.phis, &eq.state.phir, u_tilde);
    let mut cv = DMatrix::zeros(2, 5);
    put(&mut cv, 0, 0, &dss);
    put(&mut cv, 0, 2, &dsr);

    let np = params.np();
    let mut a_full = DMatrix::zeros(6, 6);
    a_full.view_mut((0, 0), (5, 5)).copy_from(&a);
    // (Jl/np)·dδω/dt = np·īsᵀJ·δφs − np·φ̄sᵀJ·δis − δTl
    let gain = np / params.inertia;
    let row_phis = (eq.is.transpose() * jm) * np - (eq.state.phis.transpose() * jm * h.ss) * np;
    let row_phir = -(eq.state.phis.transpose() * jm * h.sr) * np;
    for k in 0..2 {
        a_full[(4, k)] = gain * row_phis[k];
        a_full[(4, 2 + k)] = gain * row_phir[k];
    }
    a_full[(4, 5)] = -gain;
    LinearizedModel { a, c, cv, a_full }
}

fn vstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let cols = blocks[0].ncols();
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// `Os = (C; Cv; CA; CvA)`, 8×5.
pub fn build_os(lin: &LinearizedModel) -> DMatrix<f64> {
    let ca = &lin.c * &lin.a;
    let cva = &lin.cv * &lin.a;
    vstack(&[&lin.c, &lin.cv, &ca, &cva])
}

/// `Os′ = (C; Cv; (CA)₂)`, 5×5, where `(CA)₂` is the q-axis row of `CA`.
pub fn build_os_prime(lin: &LinearizedModel) -> DMatrix<f64> {
    let ca = &lin.c * &lin.a;
    let row = ca.rows(1, 1).into_owned();
    vstack(&[&lin.c, &lin.cv, &row])
}

/// Six-column extension including `δTl`: `(C; Cv; CA; CvA; CA²)` built on
/// the full 6-state dynamics.
pub fn build_os_with_load_torque(lin: &LinearizedModel) -> DMatrix<f64> {
    let pad = |m: &DMatrix<f64>| {
        let mut out = DMatrix::zeros(m.nrows(), 6);
        out.view_mut((0, 0), (m.nrows(), 5)).copy_from(m);
        out
    };
    let c = pad(&lin.c);
    let cv = pad(&lin.cv);
    let ca = &c * &lin.a_full;
    let cva = &cv * &lin.a_full;
    let caa = &ca * &lin.a_full;
    vstack(&[&c, &cv, &ca, &cva, &caa])
}

/// Kalman observability matrix `(C; CA; …; CA^derivatives)`.
pub fn kalman_observability(a: &DMatrix<f64>, c: &DMatrix<f64>, derivatives: usize) -> DMatrix<f64> {
    let mut blocks = vec![c.clone()];
    for k in 0..derivatives {
        let next = &blocks[k] * a;
        blocks.push(next);
    }
    let refs: Vec<&DMatrix<f64>> = blocks.iter().collect();
    vstack(&refs)
}

/// Per-unit bases: flux `V/ω`, speed `ω`, current `√2·I_rms`, time `1/ω`.
#[derive(Debug, Clone, Copy)]
pub struct PerUnitBase {
    pub flux: f64,
    pub speed: f64,
    pub current: f64,
}

impl PerUnitBase {
    pub fn rated() -> Self {
        let w = rated::electrical_speed();
        PerUnitBase { flux: rated::VOLTAGE_PEAK / w, speed: w, current: rated::CURRENT_RMS * 2f64.sqrt() }
    }

    fn column_scales(&self) -> [f64; 5] {
        [self.flux, self.flux, self.flux, self.flux, self.speed]
    }
}

/// Scale a stacked matrix whose 2-row blocks carry `orders[k]` time
/// derivatives of a current (`Cv` counts as one derivative).
fn scale_per_unit(m: &DMatrix<f64>, orders: &[u32]) -> DMatrix<f64> {
    let base = PerUnitBase::rated();
    let cols = base.column_scales();
    let mut out = m.clone();
    let mut row = 0;
    for &order in orders {
        let rows_in_block = if row + 2 <= m.nrows() { 2 } else { m.nrows() - row };
        let s = 1.0 / (base.current * base.speed.powi(order as i32));
        for r in row..row + rows_in_block {
            for c in 0..m.ncols() {
                out[(r, c)] *= s * cols[c];
            }
        }
        row += rows_in_block;
    }
    out
}

/// Everything computed at one operating point.
#[derive(Debug, Clone)]
pub struct ObservabilityReport {
    pub o: DMatrix<f64>,
    pub os: DMatrix<f64>,
    pub os_prime: DMatrix<f64>,
    pub rank_o: usize,
    pub rank_os: usize,
    pub cond_os: f64,
    pub cond_os_prime: f64,
    pub m: Mat2,
    pub omega_r: Mat2,
    pub x_r: Mat2,
    pub v: Vec2,
    pub linearized: LinearizedModel,
}

pub fn analyze<M: EnergyModel + ?Sized>(
    eq: &Equilibrium,
    u_tilde: &Vec2,
    model: &M,
    params: &MotorParams,
    opts: &AnalysisOptions,
) -> Result<ObservabilityReport> {
    let mm = build_m(eq, params)?;
    let o = build_o(eq, params)?;
    let lin = build_linearized(eq, u_tilde, params, model);
    let (os, os_prime) = match opts.scaling {
        Scaling::Si => (build_os(&lin), build_os_prime(&lin)),
        Scaling::PerUnit => (
            scale_per_unit(&build_os(&lin), &[0, 1, 1, 2]),
            scale_per_unit(&build_os_prime(&lin), &[0, 1, 1]),
        ),
    };
    Ok(ObservabilityReport {
        rank_o: numerical_rank(&o, opts.rank_tol),
        rank_os: numerical_rank(&os, opts.rank_tol),
        cond_os: condition_number(&os),
        cond_os_prime: condition_number(&os_prime),
        o,
        os,
        os_prime,
        m: mm.m,
        omega_r: mm.omega_r,
        x_r: mm.x_r,
        v: mm.v,
        linearized: lin,
    })
}

/// One row of a condition-number sweep along ω̄s = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub flux: f64,
    pub load_torque: f64,
    pub cond_os: f64,
    pub cond_os_prime: f64,
    pub rank_o: usize,
    pub rank_os: usize,
    pub feasible: bool,
}

/// Analyze every `(flux, Tl)` pair on the ω̄s = 0 line. Points where the
/// equilibrium or the analysis fails are returned with `feasible = false`
/// and NaN condition numbers. Rows are ordered flux-major.
pub fn condition_sweep<M: EnergyModel + ?Sized>(
    flux_levels: &[f64],
    torque_grid: &[f64],
    u_tilde: &Vec2,
    model: &M,
    params: &MotorParams,
    opts: &AnalysisOptions,
) -> Vec<SweepRow> {
    use rayon::prelude::*;
    let points: Vec<(f64, f64)> =
        flux_levels.iter().flat_map(|&f| torque_grid.iter().map(move |&t| (f, t))).collect();
    points
        .par_iter()
        .map(|&(flux, tl)| {
            let res = crate::dynamics::equilibrium_zero_stator_speed(flux, tl, model, params)
                .and_then(|eq| analyze(&eq, u_tilde, model, params, opts));
            match res {
                Ok(r) => SweepRow {
                    flux,
                    load_torque: tl,
                    cond_os: r.cond_os,
                    cond_os_prime: r.cond_os_prime,
                    rank_o: r.rank_o,
                    rank_os: r.rank_os,
                    feasible: true,
                },
                Err(_) => SweepRow {
                    flux,
                    load_torque: tl,
                    cond_os: f64::NAN,
                    cond_os_prime: f64::NAN,
                    rank_o: 0,
                    rank_os: 0,
                    feasible: false,
                },
            }
        })
        .collect()
}
