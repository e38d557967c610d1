//! Response bounds found by stepping the simulator tick by tick.

use jitterbound::boiler::{simulate, BoilerConfig, PumpCommand, PumpCommandSchedule, PumpState};
use jitterbound::{Resolution, Ticks};

const LEVEL_TOLERANCE: f64 = 1e-9;

/// Last tick at which the level, simulated from `w` under `sched`, is still
/// inside the limits, or `None` if it never leaves them within `horizon`
/// ticks.
fn last_inside(cfg: &BoilerConfig, sched: &PumpCommandSchedule, res: &Resolution, horizon: Ticks) -> Option<Ticks> {
    let dt = 1.0 / res.ticks_per_minute();
    let traj = simulate(cfg, sched, horizon as f64 * dt, dt).expect("valid simulation");
    let inside = |w: f64| w >= cfg.w_min - LEVEL_TOLERANCE && w <= cfg.w_max + LEVEL_TOLERANCE;
    traj.samples.iter().position(|s| !inside(s.w)).map(|k| k as Ticks - 1)
}

/// Smallest number of ticks after which an uncorrected level starting at
/// `w` is out of limits, minus one: under no pumping, and under both pumps
/// running from time zero.
pub fn bound(cfg: &BoilerConfig, w: f64, res: &Resolution, horizon: Ticks) -> Option<Ticks> {
    let mut c = *cfg;
    c.w0 = w;
    let drain = last_inside(&c, &PumpCommandSchedule::default(), res, horizon);
    c.start_delays = [0.0, 0.0];
    let both = PumpCommandSchedule(
        (1..=2)
            .map(|pump| PumpCommand {
                time: 0.0,
                pump,
                command: PumpState::On,
            })
            .collect(),
    );
    let fill = last_inside(&c, &both, res, horizon);
    match (drain, fill) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}
