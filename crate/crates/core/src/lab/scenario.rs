//! Scenario files for single trajectory runs.
//!
//! One directive per line, `#` starts a comment:
//!
//! ```text
//! duration 0.1
//! dt 1e-5                       # optional, defaults to the lab config
//! locked_rotor true             # optional, defaults to false
//! initial 1.3 0 1.27 0 0        # phis_d phis_q phir_d phir_q omega
//! segment 0    30.95 0 0 0 off  # t_start us_d us_q omega_s tl injection
//! segment 0.05 30.95 0 0 0 on
//! ```
//!
//! Segments hold their inputs until the next segment starts; the first one
//! must start at 0. Injection uses the lab config's injection settings.

use super::config::LabConfig;
use crate::dynamics::{simulate, ImInputs, ImState, InputSignal, Trajectory};
use crate::error::{Error, Result};
use crate::injection::{demodulate, Demodulated, InjectionSpec};
use crate::{Flux2, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub us: Vec2,
    pub omega_s: f64,
    pub load_torque: f64,
    pub inject: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub duration: f64,
    pub dt: Option<f64>,
    pub locked_rotor: bool,
    pub initial: ImState,
    pub segments: Vec<Segment>,
}

fn numbers(line: usize, args: &[&str], expected: usize, what: &str) -> Result<Vec<f64>> {
    if args.len() != expected {
        return Err(Error::config(Some(line), format!("{what} takes {expected} values, got {}", args.len())));
    }
    args.iter()
        .map(|a| {
            a.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::config(Some(line), format!("{what}: {a:?} is not a finite number")))
        })
        .collect()
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Self> {
        let mut duration = None;
        let mut dt = None;
        let mut locked_rotor = None;
        let mut initial = None;
        let mut segments: Vec<Segment> = Vec::new();

        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let words: Vec<&str> = text.split_whitespace().collect();
            let (key, args) = (words[0], &words[1..]);
            let once = |seen: bool| {
                if seen {
                    Err(Error::config(Some(line), format!("{key} given twice")))
                } else {
                    Ok(())
                }
            };
            match key {
                "duration" | "dt" => {
                    let v = numbers(line, args, 1, key)?[0];
                    if v <= 0.0 {
                        return Err(Error::config(Some(line), format!("{key} must be positive")));
                    }
                    let slot = if key == "duration" { &mut duration } else { &mut dt };
                    once(slot.is_some())?;
                    *slot = Some(v);
                }
                "locked_rotor" => {
                    once(locked_rotor.is_some())?;
                    locked_rotor = Some(match args {
                        ["true"] => true,
                        ["false"] => false,
                        _ => return Err(Error::config(Some(line), "locked_rotor takes true or false")),
                    });
                }
                "initial" => {
                    once(initial.is_some())?;
                    let v = numbers(line, args, 5, key)?;
                    initial = Some(ImState::new(Flux2::new(v[0], v[1]), Flux2::new(v[2], v[3]), v[4]));
                }
                "segment" => {
                    if args.len() != 6 {
                        return Err(Error::config(Some(line), format!("segment takes 6 values, got {}", args.len())));
                    }
                    let v = numbers(line, &args[..5], 5, key)?;
                    let inject = match args[5] {
                        "on" => true,
                        "off" => false,
                        other => return Err(Error::config(Some(line), format!("injection flag must be on or off, got {other:?}"))),
                    };
                    match segments.last() {
                        None if v[0] != 0.0 => return Err(Error::config(Some(line), "the first segment must start at 0")),
                        Some(prev) if v[0] <= prev.t_start => {
                            return Err(Error::config(Some(line), "segment start times must increase"))
                        }
                        _ => {}
                    }
                    segments.push(Segment { t_start: v[0], us: Vec2::new(v[1], v[2]), omega_s: v[3], load_torque: v[4], inject });
                }
                other => return Err(Error::config(Some(line), format!("unknown directive {other:?}"))),
            }
        }

        let missing = |what: &str| Error::config(None, format!("scenario has no {what} line"));
        if segments.is_empty() {
            return Err(missing("segment"));
        }
        Ok(Scenario {
            duration: duration.ok_or_else(|| missing("duration"))?,
            dt,
            locked_rotor: locked_rotor.unwrap_or(false),
            initial: initial.ok_or_else(|| missing("initial"))?,
            segments,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::config(None, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&src)
    }
}

/// Piecewise-constant inputs with per-segment injection.
#[derive(Debug, Clone)]
pub struct ScenarioSignal {
    segments: Vec<Segment>,
    spec: InjectionSpec,
    tol: f64,
}

impl ScenarioSignal {
    pub fn new(segments: Vec<Segment>, spec: InjectionSpec, dt: f64) -> Self {
        ScenarioSignal { segments, spec, tol: 1e-6 * dt }
    }

    fn eval(&self, seg: &Segment, t: f64, left: bool) -> ImInputs {
        let mut us = seg.us;
        if seg.inject {
            us += if left { self.spec.voltage_left(t) } else { self.spec.voltage(t) };
        }
        ImInputs { us, omega_s: seg.omega_s, load_torque: seg.load_torque }
    }
}

impl InputSignal for ScenarioSignal {
    fn inputs(&self, t: f64) -> ImInputs {
        let seg = self.segments.iter().rev().find(|s| s.t_start <= t + self.tol).unwrap_or(&self.segments[0]);
        self.eval(seg, t, false)
    }

    fn inputs_left(&self, t: f64) -> ImInputs {
        let seg = self.segments.iter().rev().find(|s| s.t_start < t - self.tol).unwrap_or(&self.segments[0]);
        self.eval(seg, t, true)
    }
}

/// Run a scenario and split the stator current into LF and HF parts.
/// The step must divide the injection period evenly.
pub fn run_scenario(cfg: &LabConfig, scenario: &Scenario) -> Result<(Trajectory, Demodulated)> {
    let model = cfg.magnetics.build()?;
    let dt = scenario.dt.unwrap_or_else(|| cfg.dt_for(&cfg.injection));
    cfg.injection.samples_per_period(dt)?;
    let signal = ScenarioSignal::new(scenario.segments.clone(), cfg.injection.clone(), dt);
    let traj = simulate(&scenario.initial, &signal, scenario.duration, dt, &model, &cfg.motor, scenario.locked_rotor)?;
    let demod = demodulate(&traj, &cfg.injection)?;
    Ok((traj, demod))
}
