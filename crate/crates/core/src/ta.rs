//! Timed automata and networks of timed automata.
//!
//! Clocks are numbered per automaton starting at 1; index 0 is the constant
//! zero clock. A [`Network`] lays the clocks of its members out one after
//! another, so member `a`'s local clock `i` becomes global clock
//! `offset(a) + i - 1`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::time::Ticks;
use crate::zone::{Bound, Zone};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClockIndex(pub u16);

impl ClockIndex {
    pub const ZERO: ClockIndex = ClockIndex(0);

    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClockId {
    pub index: ClockIndex,
    pub name: String,
}

/// `left - right ≺ bound`, where either side may be the zero clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClockConstraint {
    pub left: ClockIndex,
    pub right: ClockIndex,
    pub bound: Bound,
}

impl ClockConstraint {
    /// `x <= c`
    pub fn le(x: ClockIndex, c: Ticks) -> Self {
        ClockConstraint {
            left: x,
            right: ClockIndex::ZERO,
            bound: Bound::le(c),
        }
    }

    /// `x < c`
    pub fn lt(x: ClockIndex, c: Ticks) -> Self {
        ClockConstraint {
            left: x,
            right: ClockIndex::ZERO,
            bound: Bound::lt(c),
        }
    }

    /// `x >= c`
    pub fn ge(x: ClockIndex, c: Ticks) -> Self {
        ClockConstraint {
            left: ClockIndex::ZERO,
            right: x,
            bound: Bound::le(-c),
        }
    }

    /// `x > c`
    pub fn gt(x: ClockIndex, c: Ticks) -> Self {
        ClockConstraint {
            left: ClockIndex::ZERO,
            right: x,
            bound: Bound::lt(-c),
        }
    }

    /// `x - y ≺ bound`
    pub fn diff(x: ClockIndex, y: ClockIndex, bound: Bound) -> Self {
        ClockConstraint {
            left: x,
            right: y,
            bound,
        }
    }

    pub fn map_clocks(&self, f: impl Fn(ClockIndex) -> ClockIndex) -> Self {
        let map = |c: ClockIndex| if c.is_zero() { c } else { f(c) };
        ClockConstraint {
            left: map(self.left),
            right: map(self.right),
            bound: self.bound,
        }
    }

    /// Absolute value of the constant, `None` for the trivial infinite bound.
    pub fn magnitude(&self) -> Option<Ticks> {
        self.bound.value().map(i64::abs)
    }

    /// Renders with `name(i)` giving the name of clock `i >= 1`.
    pub fn render(&self, name: impl Fn(ClockIndex) -> String) -> String {
        let Some(value) = self.bound.value() else {
            return "true".to_string();
        };
        let strict = self.bound.is_strict();
        match (self.left.is_zero(), self.right.is_zero()) {
            (false, true) => format!("{} {} {}", name(self.left), if strict { "<" } else { "<=" }, value),
            (true, false) => format!("{} {} {}", name(self.right), if strict { ">" } else { ">=" }, -value),
            (false, false) => format!(
                "{} - {} {} {}",
                name(self.left),
                name(self.right),
                if strict { "<" } else { "<=" },
                value
            ),
            (true, true) => if self.bound >= Bound::LE_ZERO { "true" } else { "false" }.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocationKind {
    Pre,
    Post,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub id: String,
    pub kind: LocationKind,
    pub invariant: Vec<ClockConstraint>,
}

impl Location {
    pub fn new(id: impl Into<String>, kind: LocationKind) -> Self {
        Location {
            id: id.into(),
            kind,
            invariant: Vec::new(),
        }
    }

    pub fn with_invariant(mut self, c: ClockConstraint) -> Self {
        self.invariant.push(c);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SyncDirection {
    Emit,
    Receive,
}

impl SyncDirection {
    pub fn symbol(self) -> char {
        match self {
            SyncDirection::Emit => '!',
            SyncDirection::Receive => '?',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sync {
    pub channel: String,
    pub direction: SyncDirection,
}

impl fmt::Display for Sync {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.channel, self.direction.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub guard: Vec<ClockConstraint>,
    pub sync: Option<Sync>,
    pub resets: Vec<ClockIndex>,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            guard: Vec::new(),
            sync: None,
            resets: Vec::new(),
        }
    }

    pub fn with_guard(mut self, c: ClockConstraint) -> Self {
        self.guard.push(c);
        self
    }

    pub fn emit(mut self, channel: impl Into<String>) -> Self {
        self.sync = Some(Sync {
            channel: channel.into(),
            direction: SyncDirection::Emit,
        });
        self
    }

    pub fn receive(mut self, channel: impl Into<String>) -> Self {
        self.sync = Some(Sync {
            channel: channel.into(),
            direction: SyncDirection::Receive,
        });
        self
    }

    pub fn with_reset(mut self, x: ClockIndex) -> Self {
        self.resets.push(x);
        self
    }
}

/// A timed automaton with a validated, indexed structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedAutomaton {
    name: String,
    clocks: Vec<ClockId>,
    locations: Vec<Location>,
    edges: Vec<Edge>,
    initial: usize,
    location_index: HashMap<String, usize>,
    endpoints: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
}

impl TimedAutomaton {
    /// Validates and indexes an automaton. Clock `clock_names[i]` gets index
    /// `i + 1`.
    pub fn new(
        name: impl Into<String>,
        clock_names: Vec<String>,
        locations: Vec<Location>,
        edges: Vec<Edge>,
        initial: &str,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        let bad = |msg: String| ModelError::MalformedAutomaton(format!("{name}: {msg}"));
        if clock_names.len() >= u16::MAX as usize {
            return Err(bad("too many clocks".into()));
        }
        let mut seen = HashSet::new();
        for c in &clock_names {
            if c.is_empty() || !seen.insert(c.as_str()) {
                return Err(bad(format!("clock name `{c}` is empty or duplicated")));
            }
        }
        let clocks: Vec<ClockId> = clock_names
            .into_iter()
            .enumerate()
            .map(|(i, name)| ClockId {
                index: ClockIndex(i as u16 + 1),
                name,
            })
            .collect();
        let mut location_index = HashMap::new();
        for (i, l) in locations.iter().enumerate() {
            if l.id.is_empty() || location_index.insert(l.id.clone(), i).is_some() {
                return Err(bad(format!("location id `{}` is empty or duplicated", l.id)));
            }
        }
        let clock_ok = |c: ClockIndex| c.get() <= clocks.len();
        let constraint_ok = |c: &ClockConstraint| clock_ok(c.left) && clock_ok(c.right);
        for l in &locations {
            if !l.invariant.iter().all(constraint_ok) {
                return Err(bad(format!("invariant of `{}` references an unknown clock", l.id)));
            }
        }
        let mut endpoints = Vec::with_capacity(edges.len());
        let mut outgoing = vec![Vec::new(); locations.len()];
        for (k, e) in edges.iter().enumerate() {
            let src = *location_index
                .get(&e.source)
                .ok_or_else(|| bad(format!("edge source `{}` does not exist", e.source)))?;
            let tgt = *location_index
                .get(&e.target)
                .ok_or_else(|| bad(format!("edge target `{}` does not exist", e.target)))?;
            if !e.guard.iter().all(constraint_ok) {
                return Err(bad(format!(
                    "guard of edge {} -> {} references an unknown clock",
                    e.source, e.target
                )));
            }
            if e.resets.iter().any(|r| r.is_zero() || !clock_ok(*r)) {
                return Err(bad(format!(
                    "edge {} -> {} resets an invalid clock",
                    e.source, e.target
                )));
            }
            if let Some(s) = &e.sync {
                if s.channel.is_empty() {
                    return Err(bad("empty channel name".into()));
                }
            }
            endpoints.push((src, tgt));
            outgoing[src].push(k);
        }
        let initial = *location_index
            .get(initial)
            .ok_or_else(|| bad(format!("initial location `{initial}` does not exist")))?;
        Ok(TimedAutomaton {
            name,
            clocks,
            locations,
            edges,
            initial,
            location_index,
            endpoints,
            outgoing,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn clocks(&self) -> &[ClockId] {
        &self.clocks
    }

    pub fn clock_names(&self) -> Vec<String> {
        self.clocks.iter().map(|c| c.name.clone()).collect()
    }

    pub fn clock(&self, name: &str) -> Option<ClockIndex> {
        self.clocks.iter().find(|c| c.name == name).map(|c| c.index)
    }

    pub fn clock_name(&self, index: ClockIndex) -> &str {
        if index.is_zero() {
            "0"
        } else {
            &self.clocks[index.get() - 1].name
        }
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn location(&self, index: usize) -> &Location {
        &self.locations[index]
    }

    pub fn location_index(&self, id: &str) -> Option<usize> {
        self.location_index.get(id).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Source and target location indices of edge `k`.
    pub fn endpoints(&self, k: usize) -> (usize, usize) {
        self.endpoints[k]
    }

    /// Indices of the edges leaving location `loc`.
    pub fn outgoing(&self, loc: usize) -> &[usize] {
        &self.outgoing[loc]
    }

    pub fn initial(&self) -> &str {
        &self.locations[self.initial].id
    }

    pub fn initial_index(&self) -> usize {
        self.initial
    }

    /// Location indices of the given kind, in declaration order.
    pub fn locations_of_kind(&self, kind: LocationKind) -> Vec<usize> {
        (0..self.locations.len())
            .filter(|&i| self.locations[i].kind == kind)
            .collect()
    }

    /// Channels used with the given direction.
    pub fn channels(&self, direction: SyncDirection) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter_map(|e| e.sync.as_ref())
            .filter(|s| s.direction == direction)
            .map(|s| s.channel.clone())
            .collect()
    }

    /// Largest constant compared against each clock, indexed by local clock
    /// index (entry 0 is the zero clock and always 0).
    pub fn max_constants(&self) -> Vec<Ticks> {
        let mut k = vec![0; self.clocks.len() + 1];
        let constraints = self
            .locations
            .iter()
            .flat_map(|l| l.invariant.iter())
            .chain(self.edges.iter().flat_map(|e| e.guard.iter()));
        for c in constraints {
            if let Some(m) = c.magnitude() {
                for x in [c.left, c.right] {
                    let slot = &mut k[x.get()];
                    *slot = (*slot).max(m);
                }
            }
        }
        k[0] = 0;
        k
    }

    /// Copy of this automaton under another name.
    pub fn with_name(&self, name: &str) -> TimedAutomaton {
        TimedAutomaton {
            name: name.to_string(),
            ..self.clone()
        }
    }

    /// Rebuilds the automaton with every clock and location name passed
    /// through `rename`, and every channel through `rename_channel`.
    pub(crate) fn renamed(
        &self,
        rename: impl Fn(&str) -> String,
        rename_channel: impl Fn(&str) -> String,
    ) -> TimedAutomaton {
        let clocks = self.clocks.iter().map(|c| rename(&c.name)).collect();
        let locations = self
            .locations
            .iter()
            .map(|l| Location {
                id: rename(&l.id),
                ..l.clone()
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                source: rename(&e.source),
                target: rename(&e.target),
                sync: e.sync.as_ref().map(|s| Sync {
                    channel: rename_channel(&s.channel),
                    direction: s.direction,
                }),
                ..e.clone()
            })
            .collect();
        TimedAutomaton::new(self.name.clone(), clocks, locations, edges, &rename(self.initial()))
            .expect("injective renaming preserves validity")
    }
}

/// Prefixes every clock, location and channel name with `prefix.`.
///
/// Panics if `prefix` is empty.
pub fn namespace(a: &TimedAutomaton, prefix: &str) -> TimedAutomaton {
    assert!(!prefix.is_empty(), "namespace prefix must be non-empty");
    let p = |s: &str| format!("{prefix}.{s}");
    a.renamed(p, p)
}

/// Prefixes clock and location names only, leaving channels shared.
pub(crate) fn namespace_local(a: &TimedAutomaton, prefix: &str) -> TimedAutomaton {
    a.renamed(|s| format!("{prefix}.{s}"), str::to_string)
}

/// An unmatched synchronisation: `automaton` uses `channel` in `direction`
/// but no other member uses it in the opposite direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChannelViolation {
    pub channel: String,
    pub direction: SyncDirection,
    pub automaton: String,
}

impl fmt::Display for ChannelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (used, missing) = match self.direction {
            SyncDirection::Emit => ("emits", "receiver"),
            SyncDirection::Receive => ("receives", "emitter"),
        };
        write!(
            f,
            "`{}` {used} on channel `{}` but no other component is a {missing}",
            self.automaton, self.channel
        )
    }
}

/// One step of the network: either an internal edge or a binary handshake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeStep {
    Internal {
        automaton: usize,
        edge: usize,
    },
    Sync {
        emitter: (usize, usize),
        receiver: (usize, usize),
    },
}

impl EdgeStep {
    /// `(automaton, edge)` pairs taking part, emitter first.
    pub fn participants(&self) -> Vec<(usize, usize)> {
        match *self {
            EdgeStep::Internal { automaton, edge } => vec![(automaton, edge)],
            EdgeStep::Sync { emitter, receiver } => vec![emitter, receiver],
        }
    }
}

/// A parallel composition of automata with disjoint clock and location
/// names and shared channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    automata: Vec<TimedAutomaton>,
    channels: BTreeSet<String>,
    offsets: Vec<usize>,
    // channel -> automata with at least one receiving edge on it
    receivers: HashMap<String, Vec<usize>>,
}

impl Network {
    /// Builds a network after checking that automaton, clock and location
    /// names are disjoint. Channel matching is not checked here.
    pub fn new(automata: Vec<TimedAutomaton>) -> Result<Self, ModelError> {
        if automata.is_empty() {
            return Err(ModelError::MalformedNetwork("network has no members".into()));
        }
        let mut names = HashSet::new();
        let mut clock_names = HashSet::new();
        let mut location_names = HashSet::new();
        for a in &automata {
            if !names.insert(a.name()) {
                return Err(ModelError::MalformedNetwork(format!(
                    "duplicate automaton name `{}`",
                    a.name()
                )));
            }
            for c in a.clocks() {
                if !clock_names.insert(c.name.as_str()) {
                    return Err(ModelError::MalformedNetwork(format!(
                        "clock name `{}` used by more than one member",
                        c.name
                    )));
                }
            }
            for l in a.locations() {
                if !location_names.insert(l.id.as_str()) {
                    return Err(ModelError::MalformedNetwork(format!(
                        "location name `{}` used by more than one member",
                        l.id
                    )));
                }
            }
        }
        let mut offsets = Vec::with_capacity(automata.len());
        let mut next = 1;
        for a in &automata {
            offsets.push(next);
            next += a.clocks().len();
        }
        let mut channels = BTreeSet::new();
        let mut receivers: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, a) in automata.iter().enumerate() {
            for s in a.edges().iter().filter_map(|e| e.sync.as_ref()) {
                channels.insert(s.channel.clone());
                if s.direction == SyncDirection::Receive {
                    let list = receivers.entry(s.channel.clone()).or_default();
                    if list.last() != Some(&i) {
                        list.push(i);
                    }
                }
            }
        }
        Ok(Network {
            automata,
            channels,
            offsets,
            receivers,
        })
    }

    pub fn automata(&self) -> &[TimedAutomaton] {
        &self.automata
    }

    pub fn automaton(&self, name: &str) -> Option<(usize, &TimedAutomaton)> {
        self.automata.iter().enumerate().find(|(_, a)| a.name() == name)
    }

    pub fn channels(&self) -> &BTreeSet<String> {
        &self.channels
    }

    /// Total number of clocks, excluding the zero clock.
    pub fn clock_count(&self) -> usize {
        self.automata.iter().map(|a| a.clocks().len()).sum()
    }

    /// Zone dimension needed for the network's clocks.
    pub fn dim(&self) -> usize {
        self.clock_count() + 1
    }

    /// Global index of member `a`'s local clock.
    pub fn global_clock(&self, a: usize, local: ClockIndex) -> usize {
        if local.is_zero() {
            0
        } else {
            self.offsets[a] + local.get() - 1
        }
    }

    pub fn global_constraint(&self, a: usize, c: &ClockConstraint) -> (usize, usize, Bound) {
        (self.global_clock(a, c.left), self.global_clock(a, c.right), c.bound)
    }

    /// Clock names in global order.
    pub fn clock_names(&self) -> Vec<String> {
        self.automata.iter().flat_map(|a| a.clock_names()).collect()
    }

    pub fn initial_locations(&self) -> Vec<usize> {
        self.automata.iter().map(TimedAutomaton::initial_index).collect()
    }

    /// Largest constant per global clock (entry 0 is the zero clock).
    pub fn max_constants(&self) -> Vec<Ticks> {
        let mut k = vec![0];
        for a in &self.automata {
            k.extend_from_slice(&a.max_constants()[1..]);
        }
        k
    }

    /// Conjunction of the invariants of the given location vector, in global
    /// clock numbering.
    pub fn invariant(&self, locs: &[usize]) -> Vec<(usize, usize, Bound)> {
        locs.iter()
            .enumerate()
            .flat_map(|(a, &l)| {
                self.automata[a]
                    .location(l)
                    .invariant
                    .iter()
                    .map(move |c| self.global_constraint(a, c))
            })
            .collect()
    }

    /// Location ids of a location vector.
    pub fn location_names(&self, locs: &[usize]) -> Vec<String> {
        locs.iter()
            .enumerate()
            .map(|(a, &l)| self.automata[a].location(l).id.clone())
            .collect()
    }

    /// Guard of a step in global numbering.
    pub fn step_guard(&self, step: &EdgeStep) -> Vec<(usize, usize, Bound)> {
        step.participants()
            .into_iter()
            .flat_map(|(a, e)| {
                self.automata[a].edges()[e]
                    .guard
                    .iter()
                    .map(move |c| self.global_constraint(a, c))
            })
            .collect()
    }

    /// Clocks reset by a step in global numbering.
    pub fn step_resets(&self, step: &EdgeStep) -> Vec<usize> {
        step.participants()
            .into_iter()
            .flat_map(|(a, e)| {
                self.automata[a].edges()[e]
                    .resets
                    .iter()
                    .map(move |&r| self.global_clock(a, r))
            })
            .collect()
    }

    /// Location vector after taking `step` from `locs`.
    pub fn step_target(&self, locs: &[usize], step: &EdgeStep) -> Vec<usize> {
        let mut next = locs.to_vec();
        for (a, e) in step.participants() {
            next[a] = self.automata[a].endpoints(e).1;
        }
        next
    }

    /// Short description such as `Sensor: Idle -> Act` or
    /// `A: Act -> Post [go!] | B: Pre -> Act [go?]`.
    pub fn describe_step(&self, step: &EdgeStep) -> String {
        step.participants()
            .into_iter()
            .map(|(a, e)| {
                let aut = &self.automata[a];
                let edge = &aut.edges()[e];
                let sync = edge.sync.as_ref().map(|s| format!(" [{s}]")).unwrap_or_default();
                format!("{}: {} -> {}{}", aut.name(), edge.source, edge.target, sync)
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// Every step enabled somewhere in `zone` from `locs`: internal edges
    /// whose guard meets the zone, and emit/receive pairs on one channel from
    /// two distinct members whose joint guard meets the zone.
    ///
    /// `zone` may carry extra clocks beyond the network's own.
    pub fn enabled_edges(&self, locs: &[usize], zone: &Zone) -> Result<Vec<EdgeStep>, ModelError> {
        assert_eq!(locs.len(), self.automata.len(), "location vector length");
        assert!(zone.dim() >= self.dim(), "zone too small for network");
        let mut steps = Vec::new();
        if zone.is_empty() {
            return Ok(steps);
        }
        for (a, aut) in self.automata.iter().enumerate() {
            for &e in aut.outgoing(locs[a]) {
                let edge = &aut.edges()[e];
                match &edge.sync {
                    None => {
                        let z = self.apply_guard(zone, a, &edge.guard);
                        if !z.is_empty() {
                            steps.push(EdgeStep::Internal { automaton: a, edge: e });
                        }
                    }
                    Some(s) if s.direction == SyncDirection::Emit => {
                        let partners = self.receivers.get(&s.channel).map(Vec::as_slice).unwrap_or(&[]);
                        if partners.iter().all(|&b| b == a) {
                            return Err(ModelError::MalformedNetwork(format!(
                                "`{}` emits on `{}` but no other member receives it",
                                aut.name(),
                                s.channel
                            )));
                        }
                        let z = self.apply_guard(zone, a, &edge.guard);
                        if z.is_empty() {
                            continue;
                        }
                        for &b in partners.iter().filter(|&&b| b != a) {
                            let other = &self.automata[b];
                            for &f in other.outgoing(locs[b]) {
                                let recv = &other.edges()[f];
                                let matches = recv
                                    .sync
                                    .as_ref()
                                    .is_some_and(|r| r.direction == SyncDirection::Receive && r.channel == s.channel);
                                if matches && !self.apply_guard(&z, b, &recv.guard).is_empty() {
                                    steps.push(EdgeStep::Sync {
                                        emitter: (a, e),
                                        receiver: (b, f),
                                    });
                                }
                            }
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(steps)
    }

    fn apply_guard(&self, zone: &Zone, a: usize, guard: &[ClockConstraint]) -> Zone {
        guard.iter().fold(zone.clone(), |z, c| {
            let (i, j, b) = self.global_constraint(a, c);
            z.constrain_raw(i, j, b)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sender() -> TimedAutomaton {
        TimedAutomaton::new(
            "S",
            vec!["x".into()],
            vec![
                Location::new("S0", LocationKind::Pre),
                Location::new("S1", LocationKind::Post),
            ],
            vec![Edge::new("S0", "S1")
                .with_guard(ClockConstraint::ge(ClockIndex(1), 2))
                .emit("go")],
            "S0",
        )
        .unwrap()
    }

    fn receiver() -> TimedAutomaton {
        TimedAutomaton::new(
            "R",
            vec![],
            vec![
                Location::new("R0", LocationKind::Pre),
                Location::new("R1", LocationKind::Post),
            ],
            vec![Edge::new("R0", "R1").receive("go")],
            "R0",
        )
        .unwrap()
    }

    fn x_range(lo: i64, hi: i64) -> Zone {
        Zone::from_constraints(2, [(1, 0, Bound::le(hi)), (0, 1, Bound::le(-lo))])
    }

    #[test]
    fn namespace_renames_everything() {
        let a = sender();
        let n = namespace(&a, "c1");
        assert_eq!(n.clocks()[0].name, "c1.x");
        assert_eq!(n.edges().len(), a.edges().len());
        assert_eq!(n.edges()[0].sync.as_ref().unwrap().channel, "c1.go");
        assert_eq!(n.initial(), "c1.S0");
        let m = namespace(&a, "c2");
        let cn: HashSet<_> = n.clock_names().into_iter().collect();
        assert!(m.clock_names().iter().all(|c| !cn.contains(c)));
    }

    #[test]
    fn sync_disabled_outside_guard() {
        let net = Network::new(vec![sender(), receiver()]).unwrap();
        let steps = net.enabled_edges(&[0, 0], &x_range(0, 1)).unwrap();
        assert!(steps.is_empty());
    }

    #[test]
    fn sync_enabled_inside_guard() {
        let net = Network::new(vec![sender(), receiver()]).unwrap();
        let steps = net.enabled_edges(&[0, 0], &x_range(0, 5)).unwrap();
        assert_eq!(
            steps,
            vec![EdgeStep::Sync {
                emitter: (0, 0),
                receiver: (1, 0)
            }]
        );
    }

    #[test]
    fn internal_edge() {
        let a = TimedAutomaton::new(
            "A",
            vec![],
            vec![
                Location::new("P", LocationKind::Pre),
                Location::new("Q", LocationKind::Post),
            ],
            vec![Edge::new("P", "Q")],
            "P",
        )
        .unwrap();
        let net = Network::new(vec![a]).unwrap();
        let steps = net.enabled_edges(&[0], &Zone::universe(1)).unwrap();
        assert_eq!(steps, vec![EdgeStep::Internal { automaton: 0, edge: 0 }]);
    }

    #[test]
    fn unmatched_emit_is_malformed() {
        let net = Network::new(vec![sender()]).unwrap();
        let err = net.enabled_edges(&[0], &x_range(0, 5)).unwrap_err();
        assert!(matches!(err, ModelError::MalformedNetwork(_)));
    }

    #[test]
    fn rejects_dangling_edge() {
        let err = TimedAutomaton::new(
            "A",
            vec![],
            vec![Location::new("P", LocationKind::Pre)],
            vec![Edge::new("P", "Nowhere")],
            "P",
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::MalformedAutomaton(_)));
    }

    #[test]
    fn rejects_zero_clock_reset() {
        let err = TimedAutomaton::new(
            "A",
            vec!["x".into()],
            vec![Location::new("P", LocationKind::Pre)],
            vec![Edge::new("P", "P").with_reset(ClockIndex::ZERO)],
            "P",
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::MalformedAutomaton(_)));
    }

    #[test]
    fn network_rejects_shared_clock_names() {
        let err = Network::new(vec![sender(), sender()]).unwrap_err();
        assert!(matches!(err, ModelError::MalformedNetwork(_)));
    }

    #[test]
    fn constraint_rendering() {
        let name = |_: ClockIndex| "x".to_string();
        assert_eq!(ClockConstraint::le(ClockIndex(1), 5).render(name), "x <= 5");
        assert_eq!(ClockConstraint::ge(ClockIndex(1), 2).render(name), "x >= 2");
        assert_eq!(ClockConstraint::gt(ClockIndex(1), 2).render(name), "x > 2");
    }
}
