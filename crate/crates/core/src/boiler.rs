//! Steam-boiler water level simulation.
//!
//! Two pumps feed the boiler and steam leaves at a constant rate, so the
//! level obeys `dw/dt = u1 + u2 - r` with `u_i` either `0` or `P_i`. A pump
//! switched on starts delivering `T_i` minutes later; switching off acts
//! immediately. Rates are piecewise constant, so the level is integrated
//! exactly between switching instants. Times are in minutes, volumes in
//! liters.

use std::io;

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::time::Resolution;
use crate::verifier::ResponseBound;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoilerConfig {
    pub w0: f64,
    /// Delivery rates `P_1`, `P_2` in l/min.
    pub pump_rates: [f64; 2],
    /// Start delays `T_1`, `T_2` in minutes.
    pub start_delays: [f64; 2],
    /// Steam outflow `r` in l/min.
    pub vaporization: f64,
    /// Heater power; does not affect the level.
    pub power: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl BoilerConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let finite = [
            self.w0,
            self.pump_rates[0],
            self.pump_rates[1],
            self.start_delays[0],
            self.start_delays[1],
            self.vaporization,
            self.power,
            self.w_min,
            self.w_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(SimError::InvalidConfig("all parameters must be finite".into()));
        }
        if !(self.w_min < self.w0 && self.w0 < self.w_max) {
            return Err(SimError::InvalidConfig(format!(
                "need w_min < w0 < w_max, got {} < {} < {}",
                self.w_min, self.w0, self.w_max
            )));
        }
        if self.w0 <= 0.0 {
            return Err(SimError::InvalidConfig("initial level must be positive".into()));
        }
        if self.pump_rates.iter().any(|&p| p < 0.0) || self.vaporization < 0.0 {
            return Err(SimError::InvalidConfig("rates must be non-negative".into()));
        }
        if self.start_delays.iter().any(|&t| t < 0.0) {
            return Err(SimError::InvalidConfig("pump delays must be non-negative".into()));
        }
        Ok(())
    }

    /// Largest net inflow, with both pumps delivering.
    pub fn max_fill_rate(&self) -> f64 {
        self.pump_rates[0] + self.pump_rates[1] - self.vaporization
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpState {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpCommand {
    pub time: f64,
    /// 1 or 2.
    pub pump: u8,
    pub command: PumpState,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PumpCommandSchedule(pub Vec<PumpCommand>);

impl PumpCommandSchedule {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for c in &self.0 {
            if c.pump != 1 && c.pump != 2 {
                return Err(SimError::InvalidSchedule(format!("unknown pump {}", c.pump)));
            }
            if !c.time.is_finite() || c.time < 0.0 {
                return Err(SimError::InvalidSchedule(format!("invalid command time {}", c.time)));
            }
        }
        if self.0.windows(2).any(|w| w[1].time < w[0].time) {
            return Err(SimError::InvalidSchedule("command times must be non-decreasing".into()));
        }
        Ok(())
    }

    /// Instants at which pumps actually start or stop delivering, in time
    /// order. A pending start is cancelled by an intervening stop.
    pub fn effects(&self, cfg: &BoilerConfig) -> Vec<SwitchEvent> {
        let mut effects = Vec::new();
        for pump in 1..=2u8 {
            let delay = cfg.start_delays[usize::from(pump - 1)];
            let mut on = false;
            let mut pending: Option<f64> = None;
            for c in self.0.iter().filter(|c| c.pump == pump) {
                if let Some(at) = pending {
                    if at <= c.time {
                        effects.push(SwitchEvent {
                            time: at,
                            pump,
                            on: true,
                        });
                        on = true;
                        pending = None;
                    }
                }
                match c.command {
                    PumpState::On if !on && pending.is_none() => pending = Some(c.time + delay),
                    PumpState::On => {}
                    PumpState::Off => {
                        pending = None;
                        if on {
                            effects.push(SwitchEvent {
                                time: c.time,
                                pump,
                                on: false,
                            });
                            on = false;
                        }
                    }
                }
            }
            if let Some(at) = pending {
                effects.push(SwitchEvent {
                    time: at,
                    pump,
                    on: true,
                });
            }
        }
        effects.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.pump.cmp(&b.pump)));
        effects
    }
}

/// A pump starting or stopping delivery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub time: f64,
    pub pump: u8,
    pub on: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpMode {
    Off,
    Pump1,
    Pump2,
    Both,
}

impl PumpMode {
    fn of(on: [bool; 2]) -> Self {
        match on {
            [false, false] => PumpMode::Off,
            [true, false] => PumpMode::Pump1,
            [false, true] => PumpMode::Pump2,
            [true, true] => PumpMode::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub w: f64,
    pub u1: f64,
    pub u2: f64,
    pub mode: PumpMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub samples: Vec<Sample>,
    /// Effective switches within the horizon.
    pub switches: Vec<SwitchEvent>,
}

impl Trajectory {
    /// Writes the samples as CSV with header `t,w,u1,u2,mode`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Sample at `t`, if `t` lies on the sampling grid.
    pub fn at(&self, t: f64) -> Option<&Sample> {
        let k = (t / self.dt).round();
        if (k * self.dt - t).abs() > 1e-9 * t.abs().max(1.0) {
            return None;
        }
        self.samples.get(k as usize)
    }
}

/// Piecewise-linear level: segment start times, start levels, and rates.
struct Segments {
    starts: Vec<f64>,
    levels: Vec<f64>,
    on: Vec<[bool; 2]>,
    cfg: BoilerConfig,
}

impl Segments {
    fn new(cfg: &BoilerConfig, effects: &[SwitchEvent]) -> Self {
        let mut s = Segments {
            starts: vec![0.0],
            levels: vec![cfg.w0],
            on: vec![[false, false]],
            cfg: *cfg,
        };
        for e in effects {
            let last = s.starts.len() - 1;
            let mut on = s.on[last];
            on[usize::from(e.pump - 1)] = e.on;
            if e.time <= s.starts[last] {
                s.on[last] = on;
            } else {
                let level = s.levels[last] + s.rate(last) * (e.time - s.starts[last]);
                s.starts.push(e.time);
                s.levels.push(level);
                s.on.push(on);
            }
        }
        s
    }

    fn inflow(&self, i: usize) -> [f64; 2] {
        let on = self.on[i];
        [
            if on[0] { self.cfg.pump_rates[0] } else { 0.0 },
            if on[1] { self.cfg.pump_rates[1] } else { 0.0 },
        ]
    }

    fn rate(&self, i: usize) -> f64 {
        let [u1, u2] = self.inflow(i);
        u1 + u2 - self.cfg.vaporization
    }

    fn segment(&self, t: f64) -> usize {
        self.starts.partition_point(|&s| s <= t).saturating_sub(1)
    }

    fn sample(&self, t: f64) -> Sample {
        let i = self.segment(t);
        let [u1, u2] = self.inflow(i);
        Sample {
            t,
            w: self.levels[i] + self.rate(i) * (t - self.starts[i]),
            u1,
            u2,
            mode: PumpMode::of(self.on[i]),
        }
    }
}

/// Simulates the level over `[0, horizon]`, sampled every `dt` minutes.
pub fn simulate(
    cfg: &BoilerConfig,
    sched: &PumpCommandSchedule,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    sched.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::InvalidParameters(format!("dt must be positive, got {dt}")));
    }
    if !(horizon >= dt && horizon.is_finite()) {
        return Err(SimError::InvalidParameters(format!(
            "horizon {horizon} must be at least dt {dt}"
        )));
    }
    let effects = sched.effects(cfg);
    let segments = Segments::new(cfg, &effects);
    let steps = (horizon / dt * (1.0 + 1e-12)).floor() as usize;
    let samples = (0..=steps).map(|k| segments.sample(k as f64 * dt)).collect();
    Ok(Trajectory {
        dt,
        samples,
        switches: effects.into_iter().filter(|e| e.time <= horizon).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    NearLowLimit,
    NearHighLimit,
    ModeSwitch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub time: f64,
    pub kind: CriticalKind,
    /// Distance to the nearest level limit, in liters.
    pub margin: f64,
}

/// Samples entering the `threshold` band around either limit (first sample
/// of each visit) and every effective pump switch.
pub fn find_critical_points(traj: &Trajectory, cfg: &BoilerConfig, threshold: f64) -> Vec<CriticalPoint> {
    let mut points = Vec::new();
    let mut near = [false, false];
    for s in &traj.samples {
        let low = (s.w - cfg.w_min).abs();
        let high = (s.w - cfg.w_max).abs();
        for (k, (margin, kind)) in [(low, CriticalKind::NearLowLimit), (high, CriticalKind::NearHighLimit)]
            .into_iter()
            .enumerate()
        {
            let inside = margin <= threshold;
            if inside && !near[k] {
                points.push(CriticalPoint {
                    time: s.t,
                    kind,
                    margin,
                });
            }
            near[k] = inside;
        }
    }
    let segments = Segments::new(cfg, &traj.switches);
    for e in &traj.switches {
        let w = segments.sample(e.time).w;
        points.push(CriticalPoint {
            time: e.time,
            kind: CriticalKind::ModeSwitch,
            margin: (w - cfg.w_min).abs().min((cfg.w_max - w).abs()),
        });
    }
    points.sort_by(|a, b| a.time.total_cmp(&b.time));
    points
}

/// Minutes the level can go uncorrected before reaching a limit, under
/// worst-case drain (no pump) and worst-case fill (both pumps). `None`
/// when the corresponding rate never moves the level towards that limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub low: Option<f64>,
    pub high: Option<f64>,
}

impl Slack {
    pub fn binding(&self) -> Option<f64> {
        match (self.low, self.high) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

pub fn response_slack(cfg: &BoilerConfig, w: f64) -> Result<Slack, SimError> {
    cfg.validate()?;
    if !(cfg.w_min < w && w < cfg.w_max) {
        return Err(SimError::InvalidParameters(format!(
            "level {w} is outside ({}, {})",
            cfg.w_min, cfg.w_max
        )));
    }
    let r = cfg.vaporization;
    let fill = cfg.max_fill_rate();
    Ok(Slack {
        low: (r > 0.0).then(|| (w - cfg.w_min) / r),
        high: (fill > 0.0).then(|| (cfg.w_max - w) / fill),
    })
}

/// Largest actuation delay, in ticks, that keeps the level within its
/// limits from level `w`.
pub fn required_response_bound(cfg: &BoilerConfig, w: f64, resolution: &Resolution) -> Result<ResponseBound, SimError> {
    let slack = response_slack(cfg, w)?;
    Ok(match slack.binding() {
        Some(minutes) => ResponseBound::Bounded(resolution.floor_minutes_to_ticks(minutes)),
        None => ResponseBound::Unbounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t1: f64) -> BoilerConfig {
        BoilerConfig {
            w0: 50.0,
            pump_rates: [10.0, 10.0],
            start_delays: [t1, 0.0],
            vaporization: 4.0,
            power: 1.0,
            w_min: 40.0,
            w_max: 60.0,
        }
    }

    fn on(time: f64, pump: u8) -> PumpCommand {
        PumpCommand {
            time,
            pump,
            command: PumpState::On,
        }
    }

    fn off(time: f64, pump: u8) -> PumpCommand {
        PumpCommand {
            time,
            pump,
            command: PumpState::Off,
        }
    }

    #[test]
    fn immediate_pump() {
        let t = simulate(&cfg(0.0), &PumpCommandSchedule(vec![on(0.0, 1)]), 1.0, 0.25).unwrap();
        assert!((t.at(1.0).unwrap().w - 56.0).abs() < 1e-12);
    }

    #[test]
    fn delayed_pump() {
        let t = simulate(&cfg(0.5), &PumpCommandSchedule(vec![on(0.0, 1)]), 1.0, 0.25).unwrap();
        assert!((t.at(0.5).unwrap().w - 48.0).abs() < 1e-12);
        assert!((t.at(1.0).unwrap().w - 51.0).abs() < 1e-12);
        assert_eq!(t.at(0.25).unwrap().mode, PumpMode::Off);
        assert_eq!(t.at(0.5).unwrap().mode, PumpMode::Pump1);
    }

    #[test]
    fn equilibrium() {
        let mut c = cfg(0.0);
        c.vaporization = 0.0;
        let t = simulate(&c, &PumpCommandSchedule::default(), 2.0, 0.1).unwrap();
        assert!(t.samples.iter().all(|s| s.w == 50.0));
        assert!(find_critical_points(&t, &c, 1.0).is_empty());
    }

    #[test]
    fn off_cancels_pending_start() {
        let sched = PumpCommandSchedule(vec![on(0.0, 1), off(0.2, 1)]);
        assert!(sched.effects(&cfg(0.5)).is_empty());
        let sched = PumpCommandSchedule(vec![on(0.0, 1), off(0.7, 1)]);
        let e = sched.effects(&cfg(0.5));
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].time, e[0].on), (0.5, true));
        assert_eq!((e[1].time, e[1].on), (0.7, false));
    }

    #[test]
    fn draining_hits_low_band_once() {
        let t = simulate(&cfg(0.0), &PumpCommandSchedule::default(), 2.0, 0.25).unwrap();
        let pts = find_critical_points(&t, &cfg(0.0), 2.0);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].kind, CriticalKind::NearLowLimit);
        assert_eq!(pts[0].time, 2.0);
    }

    #[test]
    fn delayed_switch_is_critical() {
        let t = simulate(&cfg(0.5), &PumpCommandSchedule(vec![on(0.1, 1)]), 1.0, 0.25).unwrap();
        let pts: Vec<_> = find_critical_points(&t, &cfg(0.5), 0.5)
            .into_iter()
            .filter(|p| p.kind == CriticalKind::ModeSwitch)
            .collect();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].time - 0.6).abs() < 1e-12);
    }

    #[test]
    fn slack_sides() {
        let s = response_slack(&cfg(0.0), 50.0).unwrap();
        assert_eq!(s.low, Some(2.5));
        assert_eq!(s.high, Some(10.0 / 16.0));
        let mut c = cfg(0.0);
        c.pump_rates = [12.0, 8.0];
        assert_eq!(response_slack(&c, 50.0).unwrap().binding(), Some(0.625));
        c.vaporization = 0.0;
        assert_eq!(response_slack(&c, 50.0).unwrap().low, None);
    }

    #[test]
    fn bound_in_ticks() {
        let r = Resolution::new(1.0).unwrap();
        let b = required_response_bound(&cfg(0.0), 50.0, &r).unwrap();
        assert_eq!(b, ResponseBound::Bounded(37_500));
        let mut c = cfg(0.0);
        c.vaporization = 0.0;
        c.pump_rates = [0.0, 0.0];
        assert_eq!(required_response_bound(&c, 50.0, &r).unwrap(), ResponseBound::Unbounded);
        assert!(required_response_bound(&c, 70.0, &r).is_err());
    }

    #[test]
    fn csv_header() {
        let t = simulate(&cfg(0.0), &PumpCommandSchedule::default(), 0.5, 0.25).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,w,u1,u2,mode\n0.0,50.0,0.0,0.0,off\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
