//! Model templates for timing imperfections.
//!
//! Every template is built from the atomic action `Pre -> Act -> Post`,
//! whose sojourn in `Act` is bracketed by `[l_bound, u_bound]`. Sequential
//! and alternative composition merge interface locations (`Pre`/`Post`) of
//! two templates; parallel composition places templates side by side in a
//! [`Network`] that synchronises on shared channels. The timing wrapper turns
//! a template into a periodically activated one.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::ta::{
    namespace_local, ChannelViolation, ClockConstraint, ClockIndex, Edge, Location, LocationKind, Network,
    SyncDirection, TimedAutomaton,
};
use crate::time::Ticks;

/// Closed delay interval `[l_bound, u_bound]` in ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DelayBounds {
    pub l_bound: Ticks,
    pub u_bound: Ticks,
}

impl DelayBounds {
    pub fn new(l_bound: Ticks, u_bound: Ticks) -> Result<Self, ModelError> {
        let b = DelayBounds { l_bound, u_bound };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.l_bound < 0 || self.l_bound > self.u_bound {
            return Err(ModelError::InvalidBounds {
                lower: self.l_bound,
                upper: self.u_bound,
            });
        }
        Ok(())
    }
}

/// Nominal activation period with an additive jitter window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub period: Ticks,
    pub jit_lb: Ticks,
    pub jit_ub: Ticks,
}

impl PeriodSpec {
    pub fn new(period: Ticks, jit_lb: Ticks, jit_ub: Ticks) -> Result<Self, ModelError> {
        let p = PeriodSpec { period, jit_lb, jit_ub };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.period <= 0 {
            return Err(ModelError::InvalidPeriod(format!(
                "period must be positive, got {}",
                self.period
            )));
        }
        if self.jit_lb > self.jit_ub {
            return Err(ModelError::InvalidPeriod(format!(
                "jitter window [{}, {}] is inverted",
                self.jit_lb, self.jit_ub
            )));
        }
        if self.period.checked_add(self.jit_lb).is_none_or(|s| s <= 0) {
            return Err(ModelError::InvalidPeriod(format!(
                "earliest activation {} + {} must be positive",
                self.period, self.jit_lb
            )));
        }
        if self.period.checked_add(self.jit_ub).is_none() {
            return Err(ModelError::Overflow);
        }
        Ok(())
    }

    /// Earliest separation between activations.
    pub fn earliest(&self) -> Ticks {
        self.period + self.jit_lb
    }

    /// Latest separation between activations.
    pub fn latest(&self) -> Ticks {
        self.period + self.jit_ub
    }
}

/// Which interface locations an alternative composition merges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum AltMergeMode {
    MergePre,
    MergePost,
    #[default]
    MergeBoth,
}

/// `Pre -(in?, x := 0)-> Act{x <= u} -(x >= l, out!)-> Post`.
pub fn atomic_action(
    bounds: DelayBounds,
    in_chan: Option<&str>,
    out_chan: Option<&str>,
) -> Result<TimedAutomaton, ModelError> {
    bounds.validate()?;
    let x = ClockIndex(1);
    let mut enter = Edge::new("Pre", "Act").with_reset(x);
    if let Some(ch) = in_chan {
        enter = enter.receive(ch);
    }
    let mut leave = Edge::new("Act", "Post").with_guard(ClockConstraint::ge(x, bounds.l_bound));
    if let Some(ch) = out_chan {
        leave = leave.emit(ch);
    }
    TimedAutomaton::new(
        "atomic",
        vec!["x".to_string()],
        vec![
            Location::new("Pre", LocationKind::Pre),
            Location::new("Act", LocationKind::Internal).with_invariant(ClockConstraint::le(x, bounds.u_bound)),
            Location::new("Post", LocationKind::Post),
        ],
        vec![enter, leave],
        "Pre",
    )
}

fn unique_of_kind(a: &TimedAutomaton, kind: LocationKind) -> Result<usize, ModelError> {
    match a.locations_of_kind(kind).as_slice() {
        [only] => Ok(*only),
        [] => Err(ModelError::NotComposable(format!(
            "`{}` has no {kind:?} location",
            a.name()
        ))),
        many => Err(ModelError::NotComposable(format!(
            "`{}` has {} {kind:?} locations",
            a.name(),
            many.len()
        ))),
    }
}

fn unique_initial_pre(a: &TimedAutomaton) -> Result<usize, ModelError> {
    let pre = unique_of_kind(a, LocationKind::Pre)?;
    if pre != a.initial_index() {
        return Err(ModelError::NotComposable(format!(
            "the Pre location of `{}` is not its initial location",
            a.name()
        )));
    }
    Ok(pre)
}

fn fresh(base: &str, taken: &mut HashSet<String>) -> String {
    let mut name = base.to_string();
    let mut n = 1;
    while taken.contains(&name) {
        name = format!("{base}_{n}");
        n += 1;
    }
    taken.insert(name.clone());
    name
}

/// How two locations, one from each operand, are fused.
struct Merge {
    a_loc: usize,
    b_loc: usize,
    id: String,
    kind: LocationKind,
}

/// Disjoint union of `a` and `b` with the listed location pairs fused.
/// `b`'s clocks are appended after `a`'s and renamed away from them; `b`'s
/// unmerged locations are renamed away from every name already in use.
fn combine(a: &TimedAutomaton, b: &TimedAutomaton, merges: &[Merge]) -> Result<TimedAutomaton, ModelError> {
    let shift = a.clocks().len() as u16;
    let mut clock_taken: HashSet<String> = a.clock_names().into_iter().collect();
    let mut clocks = a.clock_names();
    for c in b.clocks() {
        clocks.push(fresh(&c.name, &mut clock_taken));
    }
    let shift_clock = |c: ClockIndex| ClockIndex(c.0 + shift);

    let mut taken: HashSet<String> = a
        .locations()
        .iter()
        .enumerate()
        .filter(|(i, _)| !merges.iter().any(|m| m.a_loc == *i))
        .map(|(_, l)| l.id.clone())
        .collect();
    for m in merges {
        if !taken.insert(m.id.clone()) {
            return Err(ModelError::NotComposable(format!(
                "merged location id `{}` collides",
                m.id
            )));
        }
    }
    let a_map: Vec<String> = a
        .locations()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            merges
                .iter()
                .find(|m| m.a_loc == i)
                .map(|m| m.id.clone())
                .unwrap_or_else(|| l.id.clone())
        })
        .collect();
    let b_map: Vec<String> = b
        .locations()
        .iter()
        .enumerate()
        .map(|(i, l)| match merges.iter().find(|m| m.b_loc == i) {
            Some(m) => m.id.clone(),
            None => fresh(&l.id, &mut taken),
        })
        .collect();

    let mut locations = Vec::new();
    for (i, l) in a.locations().iter().enumerate() {
        match merges.iter().find(|m| m.a_loc == i) {
            Some(m) => {
                let mut invariant = l.invariant.clone();
                for c in &b.location(m.b_loc).invariant {
                    let c = c.map_clocks(shift_clock);
                    if !invariant.contains(&c) {
                        invariant.push(c);
                    }
                }
                locations.push(Location {
                    id: m.id.clone(),
                    kind: m.kind,
                    invariant,
                });
            }
            None => locations.push(l.clone()),
        }
    }
    for (i, l) in b.locations().iter().enumerate() {
        if merges.iter().any(|m| m.b_loc == i) {
            continue;
        }
        locations.push(Location {
            id: b_map[i].clone(),
            kind: l.kind,
            invariant: l.invariant.iter().map(|c| c.map_clocks(shift_clock)).collect(),
        });
    }

    let mut edges = Vec::new();
    for (k, e) in a.edges().iter().enumerate() {
        let (s, t) = a.endpoints(k);
        edges.push(Edge {
            source: a_map[s].clone(),
            target: a_map[t].clone(),
            ..e.clone()
        });
    }
    for (k, e) in b.edges().iter().enumerate() {
        let (s, t) = b.endpoints(k);
        edges.push(Edge {
            source: b_map[s].clone(),
            target: b_map[t].clone(),
            guard: e.guard.iter().map(|c| c.map_clocks(shift_clock)).collect(),
            sync: e.sync.clone(),
            resets: e.resets.iter().map(|&r| shift_clock(r)).collect(),
        });
    }
    TimedAutomaton::new(a.name(), clocks, locations, edges, &a_map[a.initial_index()])
}

/// Sequential composition: `a`'s Post is fused with `b`'s Pre.
pub fn seq_compose(a: &TimedAutomaton, b: &TimedAutomaton) -> Result<TimedAutomaton, ModelError> {
    let a_post = unique_of_kind(a, LocationKind::Post)?;
    let b_pre = unique_initial_pre(b)?;
    let mut taken: HashSet<String> = a
        .locations()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != a_post)
        .map(|(_, l)| l.id.clone())
        .collect();
    let id = fresh("Mid", &mut taken);
    combine(
        a,
        b,
        &[Merge {
            a_loc: a_post,
            b_loc: b_pre,
            id,
            kind: LocationKind::Internal,
        }],
    )
}

/// Alternative composition: a nondeterministic choice between `a` and `b`,
/// sharing the interface locations selected by `mode`.
pub fn alt_compose(a: &TimedAutomaton, b: &TimedAutomaton, mode: AltMergeMode) -> Result<TimedAutomaton, ModelError> {
    let mut merges = Vec::new();
    if matches!(mode, AltMergeMode::MergePre | AltMergeMode::MergeBoth) {
        let a_pre = unique_initial_pre(a)?;
        let b_pre = unique_initial_pre(b)?;
        merges.push(Merge {
            a_loc: a_pre,
            b_loc: b_pre,
            id: a.location(a_pre).id.clone(),
            kind: LocationKind::Pre,
        });
    }
    if matches!(mode, AltMergeMode::MergePost | AltMergeMode::MergeBoth) {
        let a_post = unique_of_kind(a, LocationKind::Post)?;
        let b_post = unique_of_kind(b, LocationKind::Post)?;
        merges.push(Merge {
            a_loc: a_post,
            b_loc: b_post,
            id: a.location(a_post).id.clone(),
            kind: LocationKind::Post,
        });
    }
    combine(a, b, &merges)
}

/// Violations of the channel-matching rule: every channel emitted by one
/// member must be received by another, and vice versa.
pub fn check_channel_matching(members: &[TimedAutomaton]) -> Vec<ChannelViolation> {
    let emits: Vec<BTreeSet<String>> = members.iter().map(|m| m.channels(SyncDirection::Emit)).collect();
    let receives: Vec<BTreeSet<String>> = members.iter().map(|m| m.channels(SyncDirection::Receive)).collect();
    let mut violations = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let others =
            |sets: &[BTreeSet<String>], ch: &str| sets.iter().enumerate().any(|(j, s)| j != i && s.contains(ch));
        for ch in &emits[i] {
            if !others(&receives, ch) {
                violations.push(ChannelViolation {
                    channel: ch.clone(),
                    direction: SyncDirection::Emit,
                    automaton: m.name().to_string(),
                });
            }
        }
        for ch in &receives[i] {
            if !others(&emits, ch) {
                violations.push(ChannelViolation {
                    channel: ch.clone(),
                    direction: SyncDirection::Receive,
                    automaton: m.name().to_string(),
                });
            }
        }
    }
    violations
}

/// Parallel composition. Members keep their channels; clock and location
/// names are prefixed with the member's (deduplicated) name.
pub fn par_compose(members: &[TimedAutomaton]) -> Result<Network, ModelError> {
    if members.is_empty() {
        return Err(ModelError::MalformedNetwork("no members to compose".into()));
    }
    let violations = check_channel_matching(members);
    if !violations.is_empty() {
        return Err(ModelError::ChannelMismatch(violations));
    }
    let mut taken = HashSet::new();
    let automata = members
        .iter()
        .map(|m| {
            let name = fresh(m.name(), &mut taken);
            namespace_local(&m.with_name(&name), &name)
        })
        .collect();
    Network::new(automata)
}

/// Wraps `body` in a periodic dispatcher driven by an auxiliary clock `Cl`.
///
/// The body's Pre and Post are fused into an `Idle` location with invariant
/// `Cl <= period + jit_ub`; every edge leaving it additionally requires
/// `Cl >= period + jit_lb` and resets `Cl`. Separations between successive
/// activations therefore lie in `[period + jit_lb, period + jit_ub]`.
pub fn wrap_periodic(body: &TimedAutomaton, p: PeriodSpec) -> Result<TimedAutomaton, ModelError> {
    p.validate()?;
    let pre = unique_initial_pre(body)?;
    let post = unique_of_kind(body, LocationKind::Post)?;
    if !body.outgoing(post).is_empty() {
        return Err(ModelError::NotComposable(format!(
            "the Post location of `{}` has outgoing edges",
            body.name()
        )));
    }
    if let Some(worst) = max_traversal(body) {
        if worst > p.earliest() {
            log::warn!(
                "`{}` may take {worst} ticks, longer than the earliest re-activation at {}",
                body.name(),
                p.earliest()
            );
        }
    }
    let mut clock_taken: HashSet<String> = body.clock_names().into_iter().collect();
    let cl_name = fresh("Cl", &mut clock_taken);
    let mut clocks = body.clock_names();
    clocks.push(cl_name);
    let cl = ClockIndex(clocks.len() as u16);

    let mut taken: HashSet<String> = body
        .locations()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pre && *i != post)
        .map(|(_, l)| l.id.clone())
        .collect();
    let idle = fresh("Idle", &mut taken);
    let map = |i: usize| {
        if i == pre || i == post {
            idle.clone()
        } else {
            body.location(i).id.clone()
        }
    };

    let mut idle_loc =
        Location::new(idle.clone(), LocationKind::Pre).with_invariant(ClockConstraint::le(cl, p.latest()));
    for c in body
        .location(pre)
        .invariant
        .iter()
        .chain(&body.location(post).invariant)
    {
        if !idle_loc.invariant.contains(c) {
            idle_loc.invariant.push(*c);
        }
    }
    let mut locations = vec![idle_loc];
    locations.extend(
        body.locations()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pre && *i != post)
            .map(|(_, l)| l.clone()),
    );
    let edges = body
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let (s, t) = body.endpoints(k);
            let mut edge = Edge {
                source: map(s),
                target: map(t),
                ..e.clone()
            };
            if s == pre {
                edge.guard.push(ClockConstraint::ge(cl, p.earliest()));
                edge.resets.push(cl);
            }
            edge
        })
        .collect();
    TimedAutomaton::new(body.name(), clocks, locations, edges, &idle)
}

/// Fuses the unique Post of `a` back into its Pre so the template can be
/// traversed repeatedly.
pub fn repeat(a: &TimedAutomaton) -> Result<TimedAutomaton, ModelError> {
    let pre = unique_initial_pre(a)?;
    let post = unique_of_kind(a, LocationKind::Post)?;
    if !a.outgoing(post).is_empty() {
        return Err(ModelError::NotComposable(format!(
            "the Post location of `{}` has outgoing edges",
            a.name()
        )));
    }
    let pre_id = a.location(pre).id.clone();
    let map = |i: usize| {
        if i == post {
            pre_id.clone()
        } else {
            a.location(i).id.clone()
        }
    };
    let mut locations: Vec<Location> = a
        .locations()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != post)
        .map(|(_, l)| l.clone())
        .collect();
    for c in &a.location(post).invariant {
        if !locations[pre].invariant.contains(c) {
            locations[pre].invariant.push(*c);
        }
    }
    let edges = a
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let (s, t) = a.endpoints(k);
            Edge {
                source: map(s),
                target: map(t),
                ..e.clone()
            }
        })
        .collect();
    TimedAutomaton::new(a.name(), a.clock_names(), locations, edges, &pre_id)
}

/// Longest Pre-to-Post traversal implied by location invariants, when every
/// intermediate location has an upper bound and the graph is acyclic.
fn max_traversal(a: &TimedAutomaton) -> Option<Ticks> {
    let n = a.locations().len();
    let stay = |i: usize| -> Option<Ticks> {
        let l = a.location(i);
        if l.kind != LocationKind::Internal {
            return Some(0);
        }
        l.invariant
            .iter()
            .filter(|c| !c.left.is_zero() && c.right.is_zero())
            .filter_map(|c| c.bound.value())
            .min()
    };
    let mut memo: HashMap<usize, Option<Ticks>> = HashMap::new();
    fn longest(
        a: &TimedAutomaton,
        i: usize,
        stay: &dyn Fn(usize) -> Option<Ticks>,
        memo: &mut HashMap<usize, Option<Ticks>>,
        on_stack: &mut Vec<bool>,
    ) -> Option<Ticks> {
        if let Some(v) = memo.get(&i) {
            return *v;
        }
        if on_stack[i] {
            return None;
        }
        on_stack[i] = true;
        let here = stay(i);
        let mut best = Some(0);
        for &e in a.outgoing(i) {
            let t = a.endpoints(e).1;
            best = match (best, longest(a, t, stay, memo, on_stack)) {
                (Some(b), Some(v)) => Some(b.max(v)),
                _ => None,
            };
        }
        on_stack[i] = false;
        let v = match (here, best) {
            (Some(h), Some(b)) => Some(h + b),
            _ => None,
        };
        memo.insert(i, v);
        v
    }
    let mut on_stack = vec![false; n];
    longest(a, a.initial_index(), &stay, &mut memo, &mut on_stack)
}

/// Result of the structural well-formedness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellFormedness {
    pub well_formed: bool,
    pub diagnostics: Vec<String>,
}

/// Structural check that `a` looks like a composition of atomic actions:
/// one initial Pre, one Post, every location on some Pre-to-Post path, and
/// every clock reset before it is read on every path.
pub fn is_well_formed(a: &TimedAutomaton) -> WellFormedness {
    let mut diagnostics = Vec::new();
    let pres = a.locations_of_kind(LocationKind::Pre);
    let posts = a.locations_of_kind(LocationKind::Post);
    if pres.len() != 1 {
        diagnostics.push(format!("expected one Pre location, found {}", pres.len()));
    } else if pres[0] != a.initial_index() {
        diagnostics.push(format!("Pre location `{}` is not initial", a.location(pres[0]).id));
    }
    if posts.len() != 1 {
        diagnostics.push(format!("expected one Post location, found {}", posts.len()));
    }

    let n = a.locations().len();
    let forward = reach(n, a.initial_index(), |i| {
        a.outgoing(i).iter().map(|&e| a.endpoints(e).1).collect()
    });
    let mut incoming = vec![Vec::new(); n];
    for k in 0..a.edges().len() {
        let (s, t) = a.endpoints(k);
        incoming[t].push(s);
    }
    let backward = posts
        .first()
        .map(|&p| reach(n, p, |i| incoming[i].clone()))
        .unwrap_or_else(|| vec![false; n]);
    for i in 0..n {
        let id = &a.location(i).id;
        if !forward[i] {
            diagnostics.push(format!("location `{id}` is unreachable from Pre"));
        } else if !posts.is_empty() && !backward[i] {
            diagnostics.push(format!("location `{id}` cannot reach Post"));
        }
    }

    // Must-reset analysis: clocks reset on every path into each location.
    let all: BTreeSet<ClockIndex> = a.clocks().iter().map(|c| c.index).collect();
    let mut reset_in: Vec<BTreeSet<ClockIndex>> = vec![all.clone(); n];
    reset_in[a.initial_index()] = BTreeSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if !forward[i] {
                continue;
            }
            let mut acc: Option<BTreeSet<ClockIndex>> = if i == a.initial_index() {
                Some(BTreeSet::new())
            } else {
                None
            };
            for k in 0..a.edges().len() {
                let (s, t) = a.endpoints(k);
                if t != i || !forward[s] {
                    continue;
                }
                let mut out = reset_in[s].clone();
                out.extend(a.edges()[k].resets.iter().copied());
                acc = Some(match acc {
                    None => out,
                    Some(prev) => prev.intersection(&out).copied().collect(),
                });
            }
            let new = acc.unwrap_or_default();
            if new != reset_in[i] {
                reset_in[i] = new;
                changed = true;
            }
        }
    }
    let used = |cs: &[ClockConstraint]| -> Vec<ClockIndex> {
        cs.iter()
            .flat_map(|c| [c.left, c.right])
            .filter(|c| !c.is_zero())
            .collect()
    };
    for i in (0..n).filter(|&i| forward[i]) {
        let l = a.location(i);
        for c in used(&l.invariant) {
            if !reset_in[i].contains(&c) {
                diagnostics.push(format!(
                    "clock `{}` is read in the invariant of `{}` before being reset",
                    a.clock_name(c),
                    l.id
                ));
            }
        }
    }
    for (k, e) in a.edges().iter().enumerate() {
        let (s, _) = a.endpoints(k);
        if !forward[s] {
            continue;
        }
        for c in used(&e.guard) {
            if !reset_in[s].contains(&c) {
                diagnostics.push(format!(
                    "clock `{}` is read in the guard of {} -> {} before being reset",
                    a.clock_name(c),
                    e.source,
                    e.target
                ));
            }
        }
    }
    diagnostics.dedup();
    WellFormedness {
        well_formed: diagnostics.is_empty(),
        diagnostics,
    }
}

fn reach(n: usize, start: usize, next: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(i) = queue.pop_front() {
        for j in next(i) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atomic(l: Ticks, u: Ticks) -> TimedAutomaton {
        atomic_action(DelayBounds::new(l, u).unwrap(), None, None).unwrap()
    }

    #[test]
    fn atomic_structure() {
        let a = atomic_action(DelayBounds { l_bound: 2, u_bound: 5 }, Some("in"), Some("out")).unwrap();
        assert_eq!(a.locations().len(), 3);
        assert_eq!(a.edges().len(), 2);
        assert_eq!(a.clocks().len(), 1);
        let act = a.location(a.location_index("Act").unwrap());
        assert_eq!(act.invariant, vec![ClockConstraint::le(ClockIndex(1), 5)]);
        assert_eq!(a.edges()[1].guard, vec![ClockConstraint::ge(ClockIndex(1), 2)]);
        assert_eq!(a.edges()[0].sync.as_ref().unwrap().to_string(), "in?");
        assert_eq!(a.edges()[1].sync.as_ref().unwrap().to_string(), "out!");
    }

    #[test]
    fn atomic_zero_delay() {
        let a = atomic(0, 0);
        let act = a.location(1);
        assert_eq!(act.invariant, vec![ClockConstraint::le(ClockIndex(1), 0)]);
        assert_eq!(a.edges()[1].guard, vec![ClockConstraint::ge(ClockIndex(1), 0)]);
    }

    #[test]
    fn atomic_rejects_inverted_bounds() {
        let err = atomic_action(DelayBounds { l_bound: 5, u_bound: 2 }, None, None).unwrap_err();
        assert_eq!(err, ModelError::InvalidBounds { lower: 5, upper: 2 });
        assert!(DelayBounds::new(-1, 2).is_err());
    }

    #[test]
    fn seq_merges_interface() {
        let s = seq_compose(&atomic(2, 5), &atomic(1, 3)).unwrap();
        assert_eq!(s.locations().len(), 5);
        assert_eq!(s.clocks().len(), 2);
        assert_eq!(s.locations_of_kind(LocationKind::Pre).len(), 1);
        assert_eq!(s.locations_of_kind(LocationKind::Post).len(), 1);
        assert!(is_well_formed(&s).well_formed);
        // second component's clock is renamed and re-indexed
        assert_eq!(s.clock_names(), vec!["x", "x_1"]);
    }

    #[test]
    fn seq_requires_interfaces() {
        let both_pre = alt_compose(&atomic(1, 1), &atomic(2, 2), AltMergeMode::MergePost).unwrap();
        assert!(matches!(
            seq_compose(&atomic(1, 2), &both_pre),
            Err(ModelError::NotComposable(_))
        ));
    }

    #[test]
    fn alt_modes() {
        let a = atomic(2, 5);
        let b = atomic(10, 20);
        let both = alt_compose(&a, &b, AltMergeMode::MergeBoth).unwrap();
        assert_eq!(both.locations().len(), 4);
        assert!(is_well_formed(&both).well_formed);
        let pre = alt_compose(&a, &b, AltMergeMode::MergePre).unwrap();
        assert_eq!(pre.locations().len(), 5);
        assert_eq!(pre.locations_of_kind(LocationKind::Post).len(), 2);
        // MergePre leaves Posts alone, so a second MergePre still works
        let again = alt_compose(&pre, &a, AltMergeMode::MergePre).unwrap();
        assert_eq!(again.locations_of_kind(LocationKind::Post).len(), 3);
        let post = alt_compose(&a, &b, AltMergeMode::MergePost).unwrap();
        assert_eq!(post.locations_of_kind(LocationKind::Pre).len(), 2);
    }

    #[test]
    fn channel_matching_cases() {
        let send = atomic_action(DelayBounds::new(1, 2).unwrap(), None, Some("go")).unwrap();
        let recv = atomic_action(DelayBounds::new(1, 2).unwrap(), Some("go"), None).unwrap();
        assert!(check_channel_matching(&[send.clone(), recv.clone()]).is_empty());
        let v = check_channel_matching(std::slice::from_ref(&send));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].channel, "go");
        let m1 = atomic_action(DelayBounds::new(1, 2).unwrap(), Some("b"), Some("a")).unwrap();
        let m2 = atomic_action(DelayBounds::new(1, 2).unwrap(), Some("a"), Some("b")).unwrap();
        assert!(check_channel_matching(&[m1, m2]).is_empty());
    }

    #[test]
    fn par_compose_cases() {
        let send = atomic_action(DelayBounds::new(1, 2).unwrap(), None, Some("go")).unwrap();
        let recv = atomic_action(DelayBounds::new(1, 2).unwrap(), Some("go"), None).unwrap();
        let net = par_compose(&[send.clone(), recv]).unwrap();
        assert_eq!(net.automata().len(), 2);
        assert_eq!(net.automata()[1].name(), "atomic_1");
        assert!(matches!(
            par_compose(std::slice::from_ref(&send)),
            Err(ModelError::ChannelMismatch(_))
        ));
        assert!(par_compose(&[atomic(1, 2)]).is_ok());
    }

    #[test]
    fn wrapper_structure() {
        let w = wrap_periodic(&atomic(1, 2), PeriodSpec::new(10, 0, 2).unwrap()).unwrap();
        assert_eq!(w.locations().len(), 2);
        assert_eq!(w.initial(), "Idle");
        let cl = w.clock("Cl").unwrap();
        assert_eq!(w.location(0).invariant, vec![ClockConstraint::le(cl, 12)]);
        let activation = &w.edges()[0];
        assert!(activation.guard.contains(&ClockConstraint::ge(cl, 10)));
        assert!(activation.resets.contains(&cl));
    }

    #[test]
    fn invalid_period() {
        assert!(matches!(PeriodSpec::new(10, 3, 1), Err(ModelError::InvalidPeriod(_))));
        assert!(matches!(PeriodSpec::new(0, 0, 0), Err(ModelError::InvalidPeriod(_))));
        assert!(matches!(PeriodSpec::new(10, -10, 0), Err(ModelError::InvalidPeriod(_))));
        assert!(PeriodSpec::new(10, -3, 1).is_ok());
    }

    #[test]
    fn well_formedness_diagnostics() {
        assert!(is_well_formed(&atomic(2, 5)).well_formed);
        let x = ClockIndex(1);
        let orphan = TimedAutomaton::new(
            "A",
            vec!["x".into()],
            vec![
                Location::new("Pre", LocationKind::Pre),
                Location::new("Act", LocationKind::Internal).with_invariant(ClockConstraint::le(x, 3)),
                Location::new("Lost", LocationKind::Internal),
                Location::new("Post", LocationKind::Post),
            ],
            vec![Edge::new("Pre", "Act").with_reset(x), Edge::new("Act", "Post")],
            "Pre",
        )
        .unwrap();
        let wf = is_well_formed(&orphan);
        assert!(!wf.well_formed);
        assert!(wf.diagnostics.iter().any(|d| d.contains("`Lost`")));

        let unreset = TimedAutomaton::new(
            "B",
            vec!["x".into()],
            vec![
                Location::new("Pre", LocationKind::Pre),
                Location::new("Act", LocationKind::Internal).with_invariant(ClockConstraint::le(x, 3)),
                Location::new("Post", LocationKind::Post),
            ],
            vec![Edge::new("Pre", "Act"), Edge::new("Act", "Post")],
            "Pre",
        )
        .unwrap();
        let wf = is_well_formed(&unreset);
        assert!(wf.diagnostics.iter().any(|d| d.contains("before being reset")));
    }

    #[test]
    fn repeat_loops_back() {
        let r = repeat(&atomic(1, 2)).unwrap();
        assert_eq!(r.locations().len(), 2);
        assert_eq!(r.edges()[1].target, "Pre");
    }
}
