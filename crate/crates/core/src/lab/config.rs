//! Lab configuration: a flat file of dotted `section.key = value` lines.
//!
//! ```text
//! # comment
//! nominal_flux = 1.2732395447351628
//! motor.rs = 13.0
//! magnetics.kind = "saturated"
//! injection.u_tilde = [20.0, 0.0]
//! characterize.flux_pct = [5.0, 75.0, 100.0, 125.0, 150.0]
//! ```
//!
//! Values are TOML scalars or arrays. Every key is optional; missing keys take
//! the defaults of [`LabConfig::default`]. `[section]` headers are accepted
//! as well, though [`LabConfig::to_config_string`] always writes dotted keys.

use std::f64::consts::PI;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::dynamics::{rated, MotorParams};
use crate::error::{Error, Result};
use crate::injection::{InjectionSpec, Waveform};
use crate::magnetics::{LinearMagParams, LinearMagnetics, Magnetics, SaturatedMagParams, SaturatedMagnetics};
use crate::observability::{AnalysisOptions, Scaling, RANK_TOL};
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MagneticsConfig {
    Linear(LinearMagParams),
    Saturated(SaturatedMagParams),
}

impl MagneticsConfig {
    pub fn build(&self) -> Result<Magnetics> {
        Ok(match self {
            MagneticsConfig::Linear(p) => Magnetics::Linear(LinearMagnetics::new(*p)?),
            MagneticsConfig::Saturated(p) => Magnetics::Saturated(SaturatedMagnetics::new(*p)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integration step (s). `None` means 200 samples per injection period.
    pub dt: Option<f64>,
    /// Length of every injection run (s).
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizeConfig {
    pub flux_pct: Vec<f64>,
    pub omega_s_max: f64,
    pub omega_s_steps: usize,
    pub orientations: usize,
}

impl CharacterizeConfig {
    /// `omega_s_steps` stator speeds evenly spaced over `[0, omega_s_max]`.
    pub fn omega_s_grid(&self) -> Vec<f64> {
        match self.omega_s_steps {
            0 => Vec::new(),
            1 => vec![0.0],
            n => (0..n).map(|k| self.omega_s_max * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservabilityConfig {
    pub flux_pct: Vec<f64>,
    pub torque_min: f64,
    pub torque_max: f64,
    pub torque_step: f64,
    pub rank_tol: f64,
    pub per_unit: bool,
}

impl ObservabilityConfig {
    pub fn torque_grid(&self) -> Vec<f64> {
        let n = ((self.torque_max - self.torque_min) / self.torque_step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.torque_min + k as f64 * self.torque_step).collect()
    }

    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            rank_tol: self.rank_tol,
            scaling: if self.per_unit { Scaling::PerUnit } else { Scaling::Si },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub omega_hz: Vec<f64>,
    pub flux_pct: f64,
    pub omega_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    pub motor: MotorParams,
    pub magnetics: MagneticsConfig,
    pub injection: InjectionSpec,
    pub sim: SimConfig,
    /// Flux corresponding to 100% (Wb).
    pub nominal_flux: f64,
    pub characterize: CharacterizeConfig,
    pub observability: ObservabilityConfig,
    pub convergence: ConvergenceConfig,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            motor: MotorParams::TABLE_ONE,
            magnetics: MagneticsConfig::Saturated(SaturatedMagParams::TABLE_TWO),
            injection: InjectionSpec::default_square(),
            sim: SimConfig { dt: None, duration: 0.02 },
            nominal_flux: rated::nominal_flux(),
            characterize: CharacterizeConfig {
                flux_pct: vec![5.0, 75.0, 100.0, 125.0, 150.0],
                omega_s_max: 2.0 * PI * 10.0,
                omega_s_steps: 25,
                orientations: 16,
            },
            observability: ObservabilityConfig {
                flux_pct: vec![50.0, 100.0, 150.0],
                torque_min: -5.0,
                torque_max: 5.0,
                torque_step: 0.1,
                rank_tol: RANK_TOL,
                per_unit: false,
            },
            convergence: ConvergenceConfig { omega_hz: vec![250.0, 500.0, 1000.0, 2000.0], flux_pct: 100.0, omega_s: 0.0 },
        }
    }
}

// File layout. Every field is optional so that partial files overlay the defaults.

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    nominal_flux: Option<f64>,
    #[serde(default)]
    motor: RawMotor,
    #[serde(default)]
    magnetics: RawMagnetics,
    #[serde(default)]
    injection: RawInjection,
    #[serde(default)]
    sim: RawSim,
    #[serde(default)]
    characterize: RawCharacterize,
    #[serde(default)]
    observability: RawObservability,
    #[serde(default)]
    convergence: RawConvergence,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawMotor {
    #[serde(alias = "Rs")]
    rs: Option<f64>,
    #[serde(alias = "Rr")]
    rr: Option<f64>,
    pole_pairs: Option<u32>,
    inertia: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawMagnetics {
    kind: Option<String>,
    #[serde(alias = "Lm")]
    lm: Option<f64>,
    #[serde(alias = "Ll")]
    ll: Option<f64>,
    eps_m: Option<f64>,
    eps_l: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawInjection {
    waveform: Option<String>,
    levels: Option<Vec<f64>>,
    omega_hz: Option<f64>,
    u_tilde: Option<[f64; 2]>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSim {
    dt: Option<f64>,
    duration: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCharacterize {
    flux_pct: Option<Vec<f64>>,
    omega_s_max: Option<f64>,
    omega_s_steps: Option<usize>,
    orientations: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawObservability {
    flux_pct: Option<Vec<f64>>,
    torque_min: Option<f64>,
    torque_max: Option<f64>,
    torque_step: Option<f64>,
    rank_tol: Option<f64>,
    per_unit: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConvergence {
    omega_hz: Option<Vec<f64>>,
    flux_pct: Option<f64>,
    omega_s: Option<f64>,
}

/// 1-based line number of byte offset `pos`.
fn line_at(src: &str, pos: usize) -> usize {
    src[..pos.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Line on which `section.key` is assigned, in either dotted or `[section]` form.
fn line_of_key(src: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = h.trim().to_string();
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else { continue };
        let lhs = lhs.trim();
        let full = if current.is_empty() { lhs.to_string() } else { format!("{current}.{lhs}") };
        let wanted = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        if full.eq_ignore_ascii_case(&wanted) {
            return Some(i + 1);
        }
    }
    None
}

fn positive(src: &str, section: &str, key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(line_of_key(src, section, key), format!("{section}.{key} must be positive and finite, got {v}")))
    }
}

fn non_empty<T>(src: &str, section: &str, key: &str, v: Vec<T>) -> Result<Vec<T>> {
    if v.is_empty() {
        Err(Error::config(line_of_key(src, section, key), format!("{section}.{key} must not be empty")))
    } else {
        Ok(v)
    }
}

impl LabConfig {
    /// Parse a configuration file; keys not present keep their defaults.
    pub fn parse(src: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(src).map_err(|e| {
            let line = e.span().map(|s| line_at(src, s.start));
            Error::config(line, e.message().to_string())
        })?;
        let d = LabConfig::default();
        let at = |section: &str, key: &str| line_of_key(src, section, key);

        let motor = MotorParams {
            rs: raw.motor.rs.unwrap_or(d.motor.rs),
            rr: raw.motor.rr.unwrap_or(d.motor.rr),
            pole_pairs: raw.motor.pole_pairs.unwrap_or(d.motor.pole_pairs),
            inertia: raw.motor.inertia.unwrap_or(d.motor.inertia),
        };
        motor.validate().map_err(|e| Error::config(at("motor", "rs").or(at("motor", "rr")), e.to_string()))?;

        let m = &raw.magnetics;
        let magnetics = match m.kind.as_deref().unwrap_or("saturated") {
            "linear" => {
                if m.eps_m.is_some() || m.eps_l.is_some() {
                    let line = at("magnetics", "eps_m").or(at("magnetics", "eps_l"));
                    return Err(Error::config(line, "saturation factors given for linear magnetics"));
                }
                let p = LinearMagParams {
                    lm: m.lm.unwrap_or(LinearMagParams::TABLE_TWO.lm),
                    ll: m.ll.unwrap_or(LinearMagParams::TABLE_TWO.ll),
                };
                p.validate().map_err(|e| Error::config(at("magnetics", "lm").or(at("magnetics", "ll")), e.to_string()))?;
                MagneticsConfig::Linear(p)
            }
            "saturated" => {
                let t = SaturatedMagParams::TABLE_TWO;
                let p = SaturatedMagParams {
                    lm: m.lm.unwrap_or(t.lm),
                    ll: m.ll.unwrap_or(t.ll),
                    eps_m: m.eps_m.unwrap_or(t.eps_m),
                    eps_l: m.eps_l.unwrap_or(t.eps_l),
                };
                p.validate().map_err(|e| {
                    let line = ["lm", "ll", "eps_m", "eps_l"].iter().find_map(|k| at("magnetics", k));
                    Error::config(line, e.to_string())
                })?;
                MagneticsConfig::Saturated(p)
            }
            other => {
                return Err(Error::config(
                    at("magnetics", "kind"),
                    format!("magnetics.kind must be \"linear\" or \"saturated\", got {other:?}"),
                ))
            }
        };

        let inj = &raw.injection;
        let waveform = match (inj.waveform.as_deref(), &inj.levels) {
            (None | Some("square"), None) => Waveform::Square,
            (Some("sine"), None) => Waveform::Sine,
            (Some("stepped"), Some(levels)) => Waveform::stepped(levels.clone())
                .map_err(|e| Error::config(at("injection", "levels"), e.to_string()))?,
            (Some("stepped"), None) => {
                return Err(Error::config(at("injection", "waveform"), "stepped waveform needs injection.levels"))
            }
            (_, Some(_)) => {
                return Err(Error::config(at("injection", "levels"), "injection.levels requires waveform = \"stepped\""))
            }
            (Some(other), None) => {
                return Err(Error::config(
                    at("injection", "waveform"),
                    format!("injection.waveform must be square, sine or stepped, got {other:?}"),
                ))
            }
        };
        let injection = InjectionSpec {
            waveform,
            omega_hz: inj.omega_hz.unwrap_or(d.injection.omega_hz),
            u_tilde: inj.u_tilde.map(|[a, b]| Vec2::new(a, b)).unwrap_or(d.injection.u_tilde),
        };
        injection.validate().map_err(|e| Error::config(at("injection", "omega_hz"), e.to_string()))?;

        let sim = SimConfig {
            dt: raw.sim.dt.map(|v| positive(src, "sim", "dt", v)).transpose()?,
            duration: positive(src, "sim", "duration", raw.sim.duration.unwrap_or(d.sim.duration))?,
        };
        let nominal_flux = positive(src, "", "nominal_flux", raw.nominal_flux.unwrap_or(d.nominal_flux))?;

        let c = raw.characterize;
        let characterize = CharacterizeConfig {
            flux_pct: non_empty(src, "characterize", "flux_pct", c.flux_pct.unwrap_or(d.characterize.flux_pct))?,
            omega_s_max: c.omega_s_max.unwrap_or(d.characterize.omega_s_max),
            omega_s_steps: c.omega_s_steps.unwrap_or(d.characterize.omega_s_steps),
            orientations: c.orientations.unwrap_or(d.characterize.orientations),
        };
        if characterize.orientations < 3 {
            return Err(Error::config(at("characterize", "orientations"), "at least 3 orientations are needed"));
        }
        if characterize.omega_s_steps == 0 || !characterize.omega_s_max.is_finite() {
            let line = at("characterize", "omega_s_steps").or(at("characterize", "omega_s_max"));
            return Err(Error::config(line, "stator speed grid must be finite and non-empty"));
        }

        let o = raw.observability;
        let observability = ObservabilityConfig {
            flux_pct: non_empty(src, "observability", "flux_pct", o.flux_pct.unwrap_or(d.observability.flux_pct))?,
            torque_min: o.torque_min.unwrap_or(d.observability.torque_min),
            torque_max: o.torque_max.unwrap_or(d.observability.torque_max),
            torque_step: positive(src, "observability", "torque_step", o.torque_step.unwrap_or(d.observability.torque_step))?,
            rank_tol: positive(src, "observability", "rank_tol", o.rank_tol.unwrap_or(d.observability.rank_tol))?,
            per_unit: o.per_unit.unwrap_or(d.observability.per_unit),
        };
        let (lo, hi) = (observability.torque_min, observability.torque_max);
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::config(at("observability", "torque_max"), "torque bounds must be finite with torque_min <= torque_max"));
        }

        let v = raw.convergence;
        let convergence = ConvergenceConfig {
            omega_hz: non_empty(src, "convergence", "omega_hz", v.omega_hz.unwrap_or(d.convergence.omega_hz))?,
            flux_pct: positive(src, "convergence", "flux_pct", v.flux_pct.unwrap_or(d.convergence.flux_pct))?,
            omega_s: v.omega_s.unwrap_or(d.convergence.omega_s),
        };
        if let Some(bad) = convergence.omega_hz.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
            return Err(Error::config(at("convergence", "omega_hz"), format!("injection frequencies must be positive, got {bad}")));
        }

        Ok(LabConfig { motor, magnetics, injection, sim, nominal_flux, characterize, observability, convergence })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::config(None, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&src)
    }

    /// Canonical text form: every key, dotted, in a fixed order.
    pub fn to_config_string(&self) -> String {
        fn num(x: f64) -> String {
            toml::Value::Float(x).to_string()
        }
        fn list(xs: &[f64]) -> String {
            let items: Vec<String> = xs.iter().map(|&x| num(x)).collect();
            format!("[{}]", items.join(", "))
        }
        let mut lines = vec![format!("nominal_flux = {}", num(self.nominal_flux))];
        let m = &self.motor;
        lines.push(format!("motor.rs = {}", num(m.rs)));
        lines.push(format!("motor.rr = {}", num(m.rr)));
        lines.push(format!("motor.pole_pairs = {}", m.pole_pairs));
        lines.push(format!("motor.inertia = {}", num(m.inertia)));
        match self.magnetics {
            MagneticsConfig::Linear(p) => {
                lines.push("magnetics.kind = \"linear\"".into());
                lines.push(format!("magnetics.lm = {}", num(p.lm)));
                lines.push(format!("magnetics.ll = {}", num(p.ll)));
            }
            MagneticsConfig::Saturated(p) => {
                lines.push("magnetics.kind = \"saturated\"".into());
                lines.push(format!("magnetics.lm = {}", num(p.lm)));
                lines.push(format!("magnetics.ll = {}", num(p.ll)));
                lines.push(format!("magnetics.eps_m = {}", num(p.eps_m)));
                lines.push(format!("magnetics.eps_l = {}", num(p.eps_l)));
            }
        }
        match &self.injection.waveform {
            Waveform::Square => lines.push("injection.waveform = \"square\"".into()),
            Waveform::Sine => lines.push("injection.waveform = \"sine\"".into()),
            Waveform::Stepped(levels) => {
                lines.push("injection.waveform = \"stepped\"".into());
                lines.push(format!("injection.levels = {}", list(levels)));
            }
        }
        lines.push(format!("injection.omega_hz = {}", num(self.injection.omega_hz)));
        lines.push(format!("injection.u_tilde = {}", list(self.injection.u_tilde.as_slice())));
        if let Some(dt) = self.sim.dt {
            lines.push(format!("sim.dt = {}", num(dt)));
        }
        lines.push(format!("sim.duration = {}", num(self.sim.duration)));
        let c = &self.characterize;
        lines.push(format!("characterize.flux_pct = {}", list(&c.flux_pct)));
        lines.push(format!("characterize.omega_s_max = {}", num(c.omega_s_max)));
        lines.push(format!("characterize.omega_s_steps = {}", c.omega_s_steps));
        lines.push(format!("characterize.orientations = {}", c.orientations));
        let o = &self.observability;
        lines.push(format!("observability.flux_pct = {}", list(&o.flux_pct)));
        lines.push(format!("observability.torque_min = {}", num(o.torque_min)));
        lines.push(format!("observability.torque_max = {}", num(o.torque_max)));
        lines.push(format!("observability.torque_step = {}", num(o.torque_step)));
        lines.push(format!("observability.rank_tol = {}", num(o.rank_tol)));
        lines.push(format!("observability.per_unit = {}", o.per_unit));
        let v = &self.convergence;
        lines.push(format!("convergence.omega_hz = {}", list(&v.omega_hz)));
        lines.push(format!("convergence.flux_pct = {}", num(v.flux_pct)));
        lines.push(format!("convergence.omega_s = {}", num(v.omega_s)));
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    /// SHA-256 of the canonical text form, as lowercase hex.
    pub fn sha256(&self) -> String {
        Sha256::digest(self.to_config_string().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Integration step for injection runs with `spec`.
    pub fn dt_for(&self, spec: &InjectionSpec) -> f64 {
        self.sim.dt.unwrap_or_else(|| spec.default_dt())
    }

    pub fn flux_at(&self, pct: f64) -> f64 {
        self.nominal_flux * pct / 100.0
    }
}
