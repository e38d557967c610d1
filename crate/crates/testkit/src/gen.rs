//! Random models for oracle comparisons.

use jitterbound::{
    alt_compose, atomic_action, seq_compose, Activation, AltMergeMode, Bound, ChainComponent, DelayBounds,
    JitterInterval, JitterSpec, PeriodSpec, Ticks, TimeChain, TimedAutomaton, Zone,
};
use rand::Rng;

pub fn interval<R: Rng>(rng: &mut R, max: Ticks) -> JitterInterval {
    let a = rng.random_range(0..=max);
    let b = rng.random_range(0..=max);
    JitterInterval::new(a.min(b), a.max(b)).expect("ordered")
}

/// Jitter spec whose total stays within `max`.
pub fn spec<R: Rng>(rng: &mut R, max: Ticks) -> JitterSpec {
    let h = rng.random_range(0..=max / 3);
    let hardware = JitterInterval::new(h, h).expect("constant");
    let software = interval(rng, max / 3);
    let communication = interval(rng, max - h - software.max);
    JitterSpec::new(hardware, software, communication).expect("valid")
}

/// Random time chain of `1..=max_len` components whose total jitters are at
/// most `max_bound`. With `periodic`, the first component may be a periodic
/// sampler whose period exceeds the chain's worst-case latency.
pub fn chain<R: Rng>(rng: &mut R, max_len: usize, max_bound: Ticks, periodic: bool) -> TimeChain {
    let len = rng.random_range(1..=max_len);
    let specs: Vec<JitterSpec> = (0..len).map(|_| spec(rng, max_bound)).collect();
    let worst: Ticks = specs
        .iter()
        .map(|s| s.hardware.max + s.software.max + s.communication.max)
        .sum();
    let sampled = periodic && rng.random_bool(0.3);
    let components = specs
        .into_iter()
        .enumerate()
        .map(|(i, spec)| {
            let out_chan = format!("c{}", i + 1);
            let activation = if i == 0 && sampled {
                let jit = interval(rng, 3);
                Activation::Periodic {
                    period: PeriodSpec::new(worst + 1 + rng.random_range(0..=3), jit.min, jit.max).expect("valid"),
                    out_chan,
                }
            } else {
                Activation::EventTriggered {
                    in_chan: format!("c{i}"),
                    out_chan,
                }
            };
            ChainComponent {
                name: format!("N{}", i + 1),
                spec,
                activation,
            }
        })
        .collect();
    TimeChain::new(components)
}

fn bound<R: Rng>(rng: &mut R, max: Ticks, allow_strict: bool) -> Bound {
    let v = rng.random_range(-max..=max);
    if allow_strict && rng.random_bool(0.3) {
        Bound::lt(v)
    } else {
        Bound::le(v)
    }
}

/// Random zone of dimension `dim` built from a handful of constraints with
/// constants in `-max..=max`. May be empty.
pub fn zone<R: Rng>(rng: &mut R, dim: usize, max: Ticks, allow_strict: bool) -> Zone {
    let n = rng.random_range(0..=2 * dim);
    let constraints: Vec<(usize, usize, Bound)> = (0..n)
        .map(|_| {
            let i = rng.random_range(0..dim);
            let mut j = rng.random_range(0..dim);
            while j == i {
                j = rng.random_range(0..dim);
            }
            (i, j, bound(rng, max, allow_strict))
        })
        .collect();
    Zone::from_constraints(dim, constraints)
}

/// Random single constraint `(i, j, bound)` over `dim` clocks.
pub fn constraint<R: Rng>(rng: &mut R, dim: usize, max: Ticks, allow_strict: bool) -> (usize, usize, Bound) {
    let i = rng.random_range(0..dim);
    let mut j = rng.random_range(0..dim);
    while j == i {
        j = rng.random_range(0..dim);
    }
    (i, j, bound(rng, max, allow_strict))
}

/// Atomic action with random bounds in `0..=max`, with its bounds.
pub fn atomic<R: Rng>(
    rng: &mut R,
    max: Ticks,
    in_chan: Option<&str>,
    out_chan: Option<&str>,
) -> (TimedAutomaton, Ticks, Ticks) {
    let i = interval(rng, max);
    let a = atomic_action(DelayBounds::new(i.min, i.max).expect("ordered"), in_chan, out_chan).expect("atomic");
    (a, i.min, i.max)
}

/// Random nesting of sequential and (fully merged) alternative compositions
/// over `leaves` atomic actions, with the traversal interval it should have.
pub fn pattern<R: Rng>(rng: &mut R, leaves: usize, max: Ticks) -> (TimedAutomaton, Ticks, Ticks) {
    if leaves <= 1 {
        return atomic(rng, max, None, None);
    }
    let left = rng.random_range(1..leaves);
    let (a, al, au) = pattern(rng, left, max);
    let (b, bl, bu) = pattern(rng, leaves - left, max);
    if rng.random_bool(0.5) {
        (seq_compose(&a, &b).expect("seq"), al + bl, au + bu)
    } else {
        (
            alt_compose(&a, &b, AltMergeMode::MergeBoth).expect("alt"),
            al.min(bl),
            au.max(bu),
        )
    }
}

/// Random boiler with `w0` strictly between its limits.
pub fn boiler<R: Rng>(rng: &mut R) -> jitterbound::boiler::BoilerConfig {
    let w_min = rng.random_range(10.0..50.0);
    let w_max = w_min + rng.random_range(5.0..40.0);
    jitterbound::boiler::BoilerConfig {
        w0: rng.random_range(w_min + 0.5..w_max - 0.5),
        pump_rates: [rng.random_range(1.0..30.0), rng.random_range(1.0..30.0)],
        start_delays: [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)],
        vaporization: rng.random_range(1.0..20.0),
        power: 1.0,
        w_min,
        w_max,
    }
}
