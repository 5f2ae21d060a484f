//! Pulsating HF signal injection.
//!
//! The stator voltage is `us = ūs + ũ·s(Ω t)` with `s` a zero-mean
//! 1-periodic waveform and `Ω` in Hz. To first order the stator current
//! carries a ripple `(1/Ω)·Hss·ũ·S(Ω t)` where `S` is the zero-mean
//! primitive of `s`; the demodulation filters below recover the slow part
//! of the current and the virtual measurement `Hss·ũ` from samples.

use crate::dynamics::{ImInputs, InputSignal, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{Flux2, Vec2};
use crate::magnetics::{EnergyModel, SaliencyParams};
use std::f64::consts::PI;

/// Tolerance used to decide that a phase sits exactly on a breakpoint.
const PHASE_SNAP: f64 = 1e-9;

/// 1-periodic zero-mean injection waveform.
#[derive(Debug, Clone, PartialEq)]
pub enum Waveform {
    /// `+1` on `[0, ½)`, `−1` on `[½, 1)`.
    Square,
    /// `sin(2πσ)`.
    Sine,
    /// Piecewise constant over equal sub-intervals of the period.
    Stepped(Vec<f64>),
}

const SQUARE_LEVELS: [f64; 2] = [1.0, -1.0];

impl Waveform {
    /// Stepped waveform; the levels must average to zero.
    pub fn stepped(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("stepped waveform needs finite levels".into()));
        }
        let mean = levels.iter().sum::<f64>() / levels.len() as f64;
        let scale = levels.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if mean.abs() > 1e-12 * scale {
            return Err(Error::InvalidInput(format!("waveform mean must be zero, got {mean:e}")));
        }
        Ok(Waveform::Stepped(levels))
    }

    fn levels(&self) -> Option<&[f64]> {
        match self {
            Waveform::Square => Some(&SQUARE_LEVELS),
            Waveform::Stepped(l) => Some(l),
            Waveform::Sine => None,
        }
    }

    /// Whether `s` is piecewise constant with breakpoints at `k/n`.
    pub fn breakpoints(&self) -> Option<usize> {
        self.levels().map(|l| l.len())
    }

    /// `s(x)` for an unwrapped phase `x` (periods), right-continuous.
    pub fn value(&self, x: f64) -> f64 {
        match self.levels() {
            None => (2.0 * PI * x).sin(),
            Some(l) => {
                let n = l.len() as f64;
                let idx = (x * n + PHASE_SNAP).floor();
                l[idx.rem_euclid(n) as usize]
            }
        }
    }

    /// Left limit of `s` at `x`.
    pub fn value_left(&self, x: f64) -> f64 {
        match self.levels() {
            None => (2.0 * PI * x).sin(),
            Some(l) => {
                let n = l.len() as f64;
                let idx = (x * n - PHASE_SNAP).ceil() - 1.0;
                l[idx.rem_euclid(n) as usize]
            }
        }
    }

    /// Zero-mean primitive `S(x)` (continuous).
    pub fn primitive(&self, x: f64) -> f64 {
        match self.levels() {
            None => -(2.0 * PI * x).cos() / (2.0 * PI),
            Some(l) => {
                let n = l.len();
                let w = 1.0 / n as f64;
                let phase = x.rem_euclid(1.0);
                // Raw primitive P(σ) = ∫₀^σ s, then subtract its mean.
                let mut p_start = 0.0;
                let mut mean = 0.0;
                let mut value = None;
                for (k, &lv) in l.iter().enumerate() {
                    let lo = k as f64 * w;
                    if value.is_none() && (phase < lo + w || k == n - 1) {
                        value = Some(p_start + lv * (phase - lo));
                    }
                    mean += p_start * w + lv * w * w / 2.0;
                    p_start += lv * w;
                }
                value.unwrap_or(0.0) - mean
            }
        }
    }

    /// `∫₀¹ S(σ)² dσ`.
    pub fn primitive_mean_square(&self) -> f64 {
        match self.levels() {
            None => 1.0 / (8.0 * PI * PI),
            Some(l) => {
                let w = 1.0 / l.len() as f64;
                let mut acc = 0.0;
                for (k, &lv) in l.iter().enumerate() {
                    let a = self.primitive(k as f64 * w);
                    let b = a + lv * w;
                    acc += w * (a * a + a * b + b * b) / 3.0;
                }
                acc
            }
        }
    }

    /// Largest `|S|` over a period.
    pub fn primitive_peak(&self) -> f64 {
        match self.levels() {
            None => 1.0 / (2.0 * PI),
            Some(l) => (0..=l.len())
                .map(|k| self.primitive(k as f64 / l.len() as f64).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// `S(σ)` for a phase `σ ∈ [0, 1)`.
pub fn waveform_primitive(kind: &Waveform, sigma: f64) -> f64 {
    kind.primitive(sigma)
}

/// Injection settings.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionSpec {
    pub waveform: Waveform,
    /// Injection frequency (Hz); the period is `1/Ω`.
    pub omega_hz: f64,
    /// Direction and amplitude of the injected voltage (V).
    pub u_tilde: Vec2,
}

impl InjectionSpec {
    /// 20 V, 500 Hz square wave along the d axis.
    pub fn default_square() -> Self {
        InjectionSpec { waveform: Waveform::Square, omega_hz: 500.0, u_tilde: Vec2::new(20.0, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_hz > 0.0 && self.omega_hz.is_finite()) {
            return Err(Error::InvalidInput(format!("injection frequency must be positive, got {}", self.omega_hz)));
        }
        if !self.u_tilde.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("injection amplitude must be finite".into()));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        1.0 / self.omega_hz
    }

    /// Injected voltage at `t`.
    pub fn voltage(&self, t: f64) -> Vec2 {
        self.u_tilde * self.waveform.value(self.omega_hz * t)
    }

    pub fn voltage_left(&self, t: f64) -> Vec2 {
        self.u_tilde * self.waveform.value_left(self.omega_hz * t)
    }

    /// `(1/Ω)·ũ·S(Ω t)`, the first-order stator-flux ripple.
    pub fn flux_ripple(&self, t: f64) -> Flux2 {
        self.u_tilde * (self.waveform.primitive(self.omega_hz * t) / self.omega_hz)
    }

    /// Default integration step: 200 samples per injection period.
    pub fn default_dt(&self) -> f64 {
        self.period() / 200.0
    }

    /// Number of samples per period for `dt`; fails unless `dt` divides the
    /// period into an even number of steps.
    pub fn samples_per_period(&self, dt: f64) -> Result<usize> {
        let n = self.period() / dt;
        let rounded = n.round();
        if rounded.is_nan() || rounded < 2.0 || (n - rounded).abs() > 1e-6 * rounded || !(rounded as usize).is_multiple_of(2) {
            return Err(Error::Resolution(format!(
                "dt = {dt:e} s must divide the injection period {:e} s into an even number of steps (got {n})",
                self.period()
            )));
        }
        Ok(rounded as usize)
    }

    /// Warn threshold: injection frequency should exceed ten times the
    /// fastest electrical eigenvalue of the linear model (rad/s → Hz).
    pub fn is_well_separated(&self, fastest_eigenvalue: f64) -> bool {
        2.0 * PI * self.omega_hz >= 10.0 * fastest_eigenvalue.abs()
    }
}

/// Base inputs plus pulsating injection, optionally gated to `[on, off)`.
#[derive(Debug, Clone)]
pub struct InjectedInputs {
    pub base: ImInputs,
    pub spec: InjectionSpec,
    pub window: Option<(f64, f64)>,
}

impl InjectedInputs {
    pub fn new(base: ImInputs, spec: InjectionSpec) -> Self {
        InjectedInputs { base, spec, window: None }
    }

    fn active(&self, t: f64, left: bool) -> bool {
        match self.window {
            None => true,
            Some((on, off)) if left => t > on + PHASE_SNAP * self.spec.period() && t <= off + PHASE_SNAP * self.spec.period(),
            Some((on, off)) => t >= on - PHASE_SNAP * self.spec.period() && t < off - PHASE_SNAP * self.spec.period(),
        }
    }
}

impl InputSignal for InjectedInputs {
    fn inputs(&self, t: f64) -> ImInputs {
        let mut u = self.base;
        if self.active(t, false) {
            u.us += self.spec.voltage(t);
        }
        u
    }

    fn inputs_left(&self, t: f64) -> ImInputs {
        let mut u = self.base;
        if self.active(t, true) {
            u.us += self.spec.voltage_left(t);
        }
        u
    }
}

/// Predicted virtual measurement `Hss(φs, φr)·ũ` (A/s).
pub fn predicted_virtual_current<M: EnergyModel + ?Sized>(
    model: &M,
    phis_lf: &Flux2,
    phir_lf: &Flux2,
    u_tilde: &Vec2,
) -> Vec2 {
    model.hessian(phis_lf, phir_lf).ss * u_tilde
}

/// Output of the demodulation filters. Entries before `lf_start` /
/// `hf_start` are NaN (the filter windows are not yet filled).
#[derive(Debug, Clone)]
pub struct Demodulated {
    pub lf: Vec<Vec2>,
    pub hf: Vec<Vec2>,
    pub lf_start: usize,
    pub hf_start: usize,
    pub samples_per_period: usize,
}

impl Demodulated {
    /// Mean of the HF output over `[from, len)`.
    pub fn mean_hf_from(&self, from: usize) -> Vec2 {
        let from = from.max(self.hf_start);
        let n = self.hf.len().saturating_sub(from);
        if n == 0 {
            return Vec2::new(f64::NAN, f64::NAN);
        }
        self.hf[from..].iter().sum::<Vec2>() / n as f64
    }
}

/// Demodulate the stator current of a trajectory.
pub fn demodulate(traj: &Trajectory, spec: &InjectionSpec) -> Result<Demodulated> {
    demodulate_signal(&traj.t, &traj.is, traj.dt, spec)
}

/// Sliding one-period filters on a uniformly sampled 2-vector signal:
///
/// - `lf(t) = Ω ∫_{t−T}^{t} i(τ) dτ`;
/// - `hf(t) = Ω ∫ (i(τ − T/2) − lf(τ))·S(Ω(τ − T/2)) dτ / ∫ S²(Ω(τ − T/2)) dτ`,
///   both integrals over `[t − T, t]`.
///
/// Integrals use the trapezoidal rule on the sample grid, and the half
/// period delay is an index offset of `N/2` samples. The lag on the `S`
/// reference matches the lag on the current, so that `hf` recovers `c` for
/// a ripple `(c/Ω)·S(Ω t)`.
pub fn demodulate_signal(t: &[f64], signal: &[Vec2], dt: f64, spec: &InjectionSpec) -> Result<Demodulated> {
    spec.validate()?;
    if t.len() != signal.len() {
        return Err(Error::InvalidInput("time and signal lengths differ".into()));
    }
    let n = spec.samples_per_period(dt)?;
    if n < 100 {
        return Err(Error::Resolution(format!("{n} samples per injection period, need at least 100")));
    }
    let len = signal.len();
    if len < 3 * n + 1 {
        return Err(Error::Resolution(format!(
            "{len} samples cover less than 3 injection periods of {n} samples"
        )));
    }
    let half = n / 2;
    let nan = Vec2::new(f64::NAN, f64::NAN);

    // Prefix sums for the sliding trapezoid.
    let mut prefix = Vec::with_capacity(len + 1);
    prefix.push(Vec2::zeros());
    for v in signal {
        let last = *prefix.last().unwrap();
        prefix.push(last + v);
    }
    let scale = spec.omega_hz * dt;
    let mut lf = vec![nan; len];
    for k in n..len {
        let inner = prefix[k + 1] - prefix[k - n];
        lf[k] = (inner - (signal[k - n] + signal[k]) * 0.5) * scale;
    }

    // Reference S(Ω(t_j − T/2)) for j ≥ half.
    let s_ref: Vec<f64> = (0..len)
        .map(|j| if j >= half { spec.waveform.primitive(spec.omega_hz * t[j - half]) } else { f64::NAN })
        .collect();
    let mut prod = vec![Vec2::zeros(); len];
    let mut sq = vec![0.0; len];
    for jdx in n..len {
        prod[jdx] = (signal[jdx - half] - lf[jdx]) * s_ref[jdx];
        sq[jdx] = s_ref[jdx] * s_ref[jdx];
    }
    let mut p_prefix = Vec::with_capacity(len + 1);
    let mut s_prefix = Vec::with_capacity(len + 1);
    p_prefix.push(Vec2::zeros());
    s_prefix.push(0.0);
    for jdx in 0..len {
        p_prefix.push(p_prefix[jdx] + prod[jdx]);
        s_prefix.push(s_prefix[jdx] + sq[jdx]);
    }
    let mut hf = vec![nan; len];
    for k in 2 * n..len {
        let num = p_prefix[k + 1] - p_prefix[k - n] - (prod[k - n] + prod[k]) * 0.5;
        let den = s_prefix[k + 1] - s_prefix[k - n] - (sq[k - n] + sq[k]) * 0.5;
        hf[k] = num * (spec.omega_hz / den);
    }
    Ok(Demodulated { lf, hf, lf_start: n, hf_start: 2 * n, samples_per_period: n })
}

/// Least-squares fit of `(a, b, σ)` from virtual currents measured at
/// several injection orientations `θ` with magnitude `u_mag`.
///
/// Unknowns `(a, p, q) = (a, b cos σ, b sin σ)`; each sample contributes
/// `i_d = ‖ũ‖(a cos θ + p cos θ + q sin θ)` and
/// `i_q = ‖ũ‖(a sin θ + q cos θ − p sin θ)`.
pub fn fit_saliency(samples: &[(f64, Vec2)], u_mag: f64) -> Result<SaliencyParams> {
    if !(u_mag > 0.0 && u_mag.is_finite()) {
        return Err(Error::IllPosedFit(format!("injection magnitude must be positive, got {u_mag}")));
    }
    let mut angles: Vec<f64> = samples.iter().map(|(th, _)| th.rem_euclid(2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    let mut distinct = 0usize;
    let mut last: Option<f64> = None;
    for a in &angles {
        if last.is_none_or(|l| (a - l).abs() > 1e-9) {
            distinct += 1;
            last = Some(*a);
        }
    }
    if let (Some(first), Some(l)) = (angles.first(), last) {
        if distinct > 1 && (2.0 * PI - l + first).abs() < 1e-9 {
            distinct -= 1;
        }
    }
    if samples.len() < 3 || distinct < 3 {
        return Err(Error::IllPosedFit(format!(
            "need at least 3 distinct orientations, got {distinct} from {} samples",
            samples.len()
        )));
    }
    let rows = samples.len() * 2;
    let mut a = nalgebra::DMatrix::<f64>::zeros(rows, 3);
    let mut rhs = nalgebra::DVector::<f64>::zeros(rows);
    for (k, (theta, i)) in samples.iter().enumerate() {
        let (s, c) = theta.sin_cos();
        a[(2 * k, 0)] = c * u_mag;
        a[(2 * k, 1)] = c * u_mag;
        a[(2 * k, 2)] = s * u_mag;
        a[(2 * k + 1, 0)] = s * u_mag;
        a[(2 * k + 1, 1)] = -s * u_mag;
        a[(2 * k + 1, 2)] = c * u_mag;
        rhs[2 * k] = i[0];
        rhs[2 * k + 1] = i[1];
    }
    let normal = a.transpose() * &a;
    let cond = crate::linalg::condition_number(&normal);
    if cond.is_nan() || cond >= 1e12 {
        return Err(Error::IllPosedFit(format!("orientation set is degenerate (normal matrix condition {cond:.3e})")));
    }
    let svd = a.svd(true, true);
    let x = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::IllPosedFit(e.to_string()))?;
    Ok(SaliencyParams::from_components(x[0], x[1], x[2]))
}

/// `count` orientations equally spaced over `[0, 2π)`.
pub fn equispaced_orientations(count: usize) -> Vec<f64> {
    (0..count).map(|k| 2.0 * PI * k as f64 / count as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnetics::LinearMagnetics;
    use proptest::prelude::*;

    #[test]
    fn square_primitive_is_triangle() {
        let w = Waveform::Square;
        assert_eq!(w.primitive(0.0), -0.25);
        assert!((w.primitive(0.5) - 0.25).abs() < 1e-15);
        assert!((w.primitive(0.25)).abs() < 1e-15);
        assert!((w.primitive(0.75)).abs() < 1e-15);
        assert!((w.primitive_peak() - 0.25).abs() < 1e-15);
        // ∫ S² of a triangle wave with peak 1/4 is (1/4)²/3.
        assert!((w.primitive_mean_square() - 1.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn sine_primitive() {
        let w = Waveform::Sine;
        for k in 0..10 {
            let x = k as f64 / 10.0;
            assert!((w.primitive(x) + (2.0 * PI * x).cos() / (2.0 * PI)).abs() < 1e-15);
        }
    }

    #[test]
    fn primitives_have_zero_mean() {
        for w in [Waveform::Square, Waveform::Sine, Waveform::stepped(vec![2.0, -1.0, 0.5, -1.5]).unwrap()] {
            // Midpoint rule is exact enough for the piecewise-linear / smooth S.
            let n = 20000;
            let mean: f64 = (0..n).map(|k| w.primitive((k as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
            assert!(mean.abs() < 1e-9, "{w:?}: {mean}");
        }
    }

    #[test]
    fn square_sampling_is_right_continuous() {
        let w = Waveform::Square;
        assert_eq!(w.value(0.0), 1.0);
        assert_eq!(w.value(0.5), -1.0);
        assert_eq!(w.value(0.5 - 1e-12), -1.0);
        assert_eq!(w.value_left(0.5), 1.0);
        assert_eq!(w.value_left(1.0), -1.0);
        assert_eq!(w.value(3.25), 1.0);
    }

    #[test]
    fn nonzero_mean_rejected() {
        assert!(Waveform::stepped(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn linear_virtual_current_and_ripple() {
        let m = LinearMagnetics::table_two();
        let u = Vec2::new(20.0, 0.0);
        let i = predicted_virtual_current(&m, &Flux2::new(0.3, 0.1), &Flux2::zeros(), &u);
        assert!((i - Vec2::new(93.75, 0.0)).norm() < 1e-12);
        let ripple = i[0] * Waveform::Square.primitive_peak() / 500.0;
        assert!((ripple - 0.046875).abs() < 1e-15);
        assert_eq!(predicted_virtual_current(&m, &Flux2::zeros(), &Flux2::zeros(), &Vec2::zeros()), Vec2::zeros());
    }

    fn synthetic(spec: &InjectionSpec, c0: Vec2, c1: Vec2, periods: usize) -> (Vec<f64>, Vec<Vec2>, f64) {
        let dt = spec.default_dt();
        let n = 200 * periods;
        let t: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
        let s: Vec<Vec2> = t
            .iter()
            .map(|&tt| c0 + c1 * (spec.waveform.primitive(spec.omega_hz * tt) / spec.omega_hz))
            .collect();
        (t, s, dt)
    }

    #[test]
    fn demodulation_recovers_synthetic_components() {
        for waveform in [Waveform::Square, Waveform::Sine] {
            let spec = InjectionSpec { waveform, omega_hz: 500.0, u_tilde: Vec2::new(20.0, 0.0) };
            let (c0, c1) = (Vec2::new(1.0, 2.0), Vec2::new(3.0, -1.0));
            let (t, s, dt) = synthetic(&spec, c0, c1, 6);
            let d = demodulate_signal(&t, &s, dt, &spec).unwrap();
            for k in d.lf_start..t.len() {
                assert!((d.lf[k] - c0).norm() <= 0.005 * c0.norm());
            }
            for k in d.hf_start..t.len() {
                assert!((d.hf[k] - c1).norm() <= 0.005 * c1.norm(), "{:?} at {k}", d.hf[k]);
            }
            assert!(d.hf[d.hf_start - 1][0].is_nan());
        }
    }

    #[test]
    fn demodulation_of_constant_has_no_hf() {
        let spec = InjectionSpec::default_square();
        let (t, s, dt) = synthetic(&spec, Vec2::new(1.5, -0.7), Vec2::zeros(), 5);
        let d = demodulate_signal(&t, &s, dt, &spec).unwrap();
        for k in d.hf_start..t.len() {
            assert!(d.hf[k].norm() < 1e-9);
        }
    }

    #[test]
    fn demodulation_rejects_bad_grids() {
        let spec = InjectionSpec::default_square();
        let (t, s, _) = synthetic(&spec, Vec2::zeros(), Vec2::zeros(), 5);
        // 50 samples per period.
        assert!(matches!(demodulate_signal(&t, &s, spec.period() / 50.0, &spec), Err(Error::Resolution(_))));
        // dt not dividing the period.
        assert!(matches!(demodulate_signal(&t, &s, spec.period() / 200.5, &spec), Err(Error::Resolution(_))));
        // too short
        let (t, s, dt) = synthetic(&spec, Vec2::zeros(), Vec2::zeros(), 2);
        assert!(matches!(demodulate_signal(&t, &s, dt, &spec), Err(Error::Resolution(_))));
    }

    fn samples_from(sal: &SaliencyParams, count: usize, u_mag: f64) -> Vec<(f64, Vec2)> {
        equispaced_orientations(count).into_iter().map(|th| (th, sal.virtual_current(th, u_mag))).collect()
    }

    #[test]
    fn fit_recovers_known_parameters() {
        let truth = SaliencyParams { a: 4.0, b: 2f64.sqrt(), sigma: PI / 4.0 };
        let fit = fit_saliency(&samples_from(&truth, 8, 20.0), 20.0).unwrap();
        assert!((fit.a - truth.a).abs() < 1e-10);
        assert!((fit.b - truth.b).abs() < 1e-10);
        assert!((fit.sigma - truth.sigma).abs() < 1e-10);
    }

    #[test]
    fn fit_without_saliency() {
        let truth = SaliencyParams { a: 4.6875, b: 0.0, sigma: 0.0 };
        let fit = fit_saliency(&samples_from(&truth, 16, 20.0), 20.0).unwrap();
        assert!(fit.b <= 1e-12 * fit.a);
    }

    #[test]
    fn fit_rejects_degenerate_orientations() {
        let truth = SaliencyParams { a: 4.0, b: 1.0, sigma: 0.3 };
        let two: Vec<_> = [0.0, 1.0].iter().map(|&th| (th, truth.virtual_current(th, 20.0))).collect();
        assert!(matches!(fit_saliency(&two, 20.0), Err(Error::IllPosedFit(_))));
        let repeated: Vec<_> = [0.0, 0.0, 2.0 * PI, 1.0].iter().map(|&th| (th, truth.virtual_current(th, 20.0))).collect();
        assert!(matches!(fit_saliency(&repeated, 20.0), Err(Error::IllPosedFit(_))));
    }

    #[test]
    fn gated_injection_window() {
        let spec = InjectionSpec::default_square();
        let inj = InjectedInputs { base: ImInputs::default(), spec, window: Some((0.01, 0.02)) };
        assert_eq!(inj.inputs(0.005).us, Vec2::zeros());
        assert_eq!(inj.inputs(0.01).us, Vec2::new(20.0, 0.0));
        assert_eq!(inj.inputs_left(0.01).us, Vec2::zeros());
        assert_eq!(inj.inputs(0.02).us, Vec2::zeros());
        assert_eq!(inj.inputs_left(0.02).us, Vec2::new(-20.0, 0.0));
    }

    proptest! {
        #[test]
        fn fit_round_trip(a in 1.0..50.0f64, b in 0.01..10.0f64, sigma in -3.1..3.1f64, count in 3usize..20) {
            let truth = SaliencyParams { a, b, sigma };
            let fit = fit_saliency(&samples_from(&truth, count, 20.0), 20.0).unwrap();
            prop_assert!((fit.a - a).abs() < 1e-10 * a);
            prop_assert!((fit.b - b).abs() < 1e-10 * a);
            prop_assert!((fit.sigma - sigma).abs() < 1e-8);
        }
    }
}
