//! Integer-time run enumeration of a single automaton.
//!
//! Synchronisations are ignored: every edge fires on its own, as if the
//! environment were always ready.

use std::collections::{HashSet, VecDeque};

use jitterbound::{Ticks, TimedAutomaton};

use crate::discrete::satisfied;

/// Range of delays observed between two events over all runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observed {
    pub min: Ticks,
    /// `None` when some run exceeds the horizon.
    pub max: Option<Ticks>,
}

fn caps(a: &TimedAutomaton) -> Vec<Ticks> {
    a.max_constants().iter().map(|k| k + 1).collect()
}

fn invariant_holds(a: &TimedAutomaton, loc: usize, clocks: &[Ticks]) -> bool {
    a.location(loc).invariant.iter().all(|c| satisfied(c, |i| clocks[i]))
}

/// Discrete successors of `(loc, clocks)`: one tick of delay, or one edge.
/// Each successor carries the edge taken, if any.
fn successors(
    a: &TimedAutomaton,
    caps: &[Ticks],
    loc: usize,
    clocks: &[Ticks],
) -> Vec<(Option<usize>, usize, Vec<Ticks>)> {
    let mut out = Vec::new();
    let delayed: Vec<Ticks> = clocks
        .iter()
        .enumerate()
        .map(|(i, &c)| if i == 0 { 0 } else { (c + 1).min(caps[i]) })
        .collect();
    if invariant_holds(a, loc, &delayed) {
        out.push((None, loc, delayed));
    }
    for &e in a.outgoing(loc) {
        let edge = &a.edges()[e];
        if !edge.guard.iter().all(|c| satisfied(c, |i| clocks[i])) {
            continue;
        }
        let mut next = clocks.to_vec();
        for x in &edge.resets {
            next[x.get()] = 0;
        }
        let target = a.endpoints(e).1;
        if invariant_holds(a, target, &next) {
            out.push((Some(e), target, next));
        }
    }
    out
}

/// Delays from first entering any location in `from` to next entering any
/// location in `to`, starting at the initial location with all clocks zero.
/// `None` if `to` is never reached after `from`.
pub fn delays(a: &TimedAutomaton, from: &[&str], to: &[&str], horizon: Ticks) -> Option<Observed> {
    let idx = |ids: &[&str]| -> Vec<usize> {
        ids.iter()
            .map(|id| a.location_index(id).unwrap_or_else(|| panic!("no location {id}")))
            .collect()
    };
    let from = idx(from);
    let to = idx(to);
    let caps = caps(a);
    let init_loc = a.initial_index();
    let init = (init_loc, vec![0; caps.len()], from.contains(&init_loc).then_some(0));
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init);
    let mut min: Option<Ticks> = None;
    let mut max: Option<Ticks> = Some(0);
    while let Some((loc, clocks, timer)) = queue.pop_front() {
        for (edge, target, next) in successors(a, &caps, loc, &clocks) {
            let mut t = timer;
            if edge.is_none() {
                t = t.map(|v| v + 1);
                if t.is_some_and(|v| v > horizon) {
                    max = None;
                    continue;
                }
            }
            if let (Some(_), Some(v), true) = (edge, t, to.contains(&target)) {
                min = Some(min.map_or(v, |m| m.min(v)));
                max = max.map(|m| m.max(v));
                continue;
            }
            if edge.is_some() && t.is_none() && from.contains(&target) {
                t = Some(0);
            }
            let s = (target, next, t);
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    min.map(|min| Observed { min, max })
}

/// Separations between consecutive firings of edges leaving `location`,
/// over the first `activations` firings of every run.
pub fn separations(a: &TimedAutomaton, location: &str, activations: usize, horizon: Ticks) -> Option<Observed> {
    let src = a
        .location_index(location)
        .unwrap_or_else(|| panic!("no location {location}"));
    let caps = caps(a);
    let init = (a.initial_index(), vec![0; caps.len()], None::<Ticks>, 0usize);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init);
    let mut min: Option<Ticks> = None;
    let mut max: Option<Ticks> = Some(0);
    while let Some((loc, clocks, since, count)) = queue.pop_front() {
        for (edge, target, next) in successors(a, &caps, loc, &clocks) {
            let mut since = since;
            let mut count = count;
            match edge {
                None => {
                    since = since.map(|v| v + 1);
                    if since.is_some_and(|v| v > horizon) {
                        max = None;
                        continue;
                    }
                }
                Some(_) if loc == src => {
                    if let Some(v) = since {
                        min = Some(min.map_or(v, |m| m.min(v)));
                        max = max.map(|m| m.max(v));
                    }
                    count += 1;
                    if count == activations {
                        continue;
                    }
                    since = Some(0);
                }
                Some(_) => {}
            }
            let s = (target, next, since, count);
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    min.map(|min| Observed { min, max })
}

/// Times at which the `n`-th firing of an edge leaving `location` can occur,
/// measured from time zero.
pub fn activation_times(a: &TimedAutomaton, location: &str, n: usize, horizon: Ticks) -> Option<Observed> {
    let src = a
        .location_index(location)
        .unwrap_or_else(|| panic!("no location {location}"));
    let caps = caps(a);
    let init = (a.initial_index(), vec![0; caps.len()], 0 as Ticks, 0usize);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init);
    let mut min: Option<Ticks> = None;
    let mut max: Option<Ticks> = Some(0);
    while let Some((loc, clocks, now, count)) = queue.pop_front() {
        for (edge, target, next) in successors(a, &caps, loc, &clocks) {
            let mut now = now;
            let mut count = count;
            match edge {
                None => {
                    now += 1;
                    if now > horizon {
                        max = None;
                        continue;
                    }
                }
                Some(_) if loc == src => {
                    count += 1;
                    if count == n {
                        min = Some(min.map_or(now, |m| m.min(now)));
                        max = max.map(|m| m.max(now));
                        continue;
                    }
                }
                Some(_) => {}
            }
            let s = (target, next, now, count);
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    min.map(|min| Observed { min, max })
}

/// Time from leaving the initial location to first entering a Post
/// location. Time only passes in locations carrying an invariant, so fused
/// interface locations are crossed instantly, as a synchronised handoff
/// between separate automata would be.
pub fn traversal(a: &TimedAutomaton, horizon: Ticks) -> Option<Observed> {
    use jitterbound::LocationKind;
    let caps = caps(a);
    let init = (a.initial_index(), vec![0; caps.len()], 0 as Ticks);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init);
    let mut min: Option<Ticks> = None;
    let mut max: Option<Ticks> = Some(0);
    while let Some((loc, clocks, t)) = queue.pop_front() {
        let dwell = !a.location(loc).invariant.is_empty();
        for (edge, target, next) in successors(a, &caps, loc, &clocks) {
            let mut t = t;
            if edge.is_none() {
                if !dwell {
                    continue;
                }
                t += 1;
                if t > horizon {
                    max = None;
                    continue;
                }
            } else if a.location(target).kind == LocationKind::Post {
                min = Some(min.map_or(t, |m| m.min(t)));
                max = max.map(|m| m.max(t));
                continue;
            }
            let s = (target, next, t);
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    min.map(|min| Observed { min, max })
}
