//! Discrete-time explicit-state checker for bounded response.

use std::collections::{HashSet, VecDeque};

use jitterbound::{ClockConstraint, Network, StateFormula, SyncDirection, Ticks, TimedAutomaton};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Satisfied,
    Violated,
}

/// `(automaton, location)` pairs an atom may denote.
fn atom_index(net: &Network, automaton: &str, location: &str) -> (usize, usize) {
    let (a, ta) = net
        .automaton(automaton)
        .unwrap_or_else(|| panic!("no automaton {automaton}"));
    let qualified = format!("{automaton}.{location}");
    let l = ta
        .location_index(&qualified)
        .or_else(|| ta.location_index(location))
        .unwrap_or_else(|| panic!("no location {location} in {automaton}"));
    (a, l)
}

enum Formula {
    Atom(usize, usize),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    fn new(net: &Network, f: &StateFormula) -> Self {
        match f {
            StateFormula::Atom { automaton, location } => {
                let (a, l) = atom_index(net, automaton, location);
                Formula::Atom(a, l)
            }
            StateFormula::And(fs) => Formula::And(fs.iter().map(|g| Formula::new(net, g)).collect()),
            StateFormula::Or(fs) => Formula::Or(fs.iter().map(|g| Formula::new(net, g)).collect()),
        }
    }

    fn holds(&self, locs: &[usize]) -> bool {
        match self {
            Formula::Atom(a, l) => locs[*a] == *l,
            Formula::And(fs) => fs.iter().all(|f| f.holds(locs)),
            Formula::Or(fs) => fs.iter().any(|f| f.holds(locs)),
        }
    }
}

pub(crate) fn satisfied(c: &ClockConstraint, value: impl Fn(usize) -> Ticks) -> bool {
    let diff = value(c.left.get()) - value(c.right.get());
    match c.bound.value() {
        None => true,
        Some(v) if c.bound.is_strict() => diff < v,
        Some(v) => diff <= v,
    }
}

fn no_diagonals(a: &TimedAutomaton) {
    let diagonal = |c: &ClockConstraint| !c.left.is_zero() && !c.right.is_zero();
    let any = a.locations().iter().flat_map(|l| &l.invariant).any(diagonal)
        || a.edges().iter().flat_map(|e| &e.guard).any(diagonal);
    assert!(
        !any,
        "the discrete oracle caps clocks and cannot handle difference constraints"
    );
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    locs: Vec<usize>,
    clocks: Vec<Ticks>,
    armed: bool,
    z: Ticks,
}

/// Integer-time semantics of `net` with the response monitor attached.
struct Stepper<'a> {
    net: &'a Network,
    stim: Formula,
    resp: Formula,
    caps: Vec<Ticks>,
    offsets: Vec<usize>,
    /// `z` saturates here.
    z_cap: Ticks,
}

impl<'a> Stepper<'a> {
    fn new(net: &'a Network, stimulus: &StateFormula, response: &StateFormula, z_cap: Ticks) -> Self {
        net.automata().iter().for_each(no_diagonals);
        let offsets = net
            .automata()
            .iter()
            .scan(1, |off, a| {
                let o = *off;
                *off += a.clocks().len();
                Some(o)
            })
            .collect();
        Stepper {
            net,
            stim: Formula::new(net, stimulus),
            resp: Formula::new(net, response),
            caps: net.max_constants().iter().map(|k| k + 1).collect(),
            offsets,
            z_cap,
        }
    }

    fn global(&self, a: usize, local: usize) -> usize {
        if local == 0 {
            0
        } else {
            self.offsets[a] + local - 1
        }
    }

    fn holds_at(&self, a: usize, cs: &[ClockConstraint], clocks: &[Ticks]) -> bool {
        cs.iter().all(|c| satisfied(c, |i| clocks[self.global(a, i)]))
    }

    fn invariants_hold(&self, locs: &[usize], clocks: &[Ticks]) -> bool {
        locs.iter()
            .enumerate()
            .all(|(a, &l)| self.holds_at(a, &self.net.automata()[a].location(l).invariant, clocks))
    }

    /// Applies the monitor, returning the response time if it discharges.
    fn monitor(&self, s: &mut State) -> Option<Ticks> {
        let r = self.resp.holds(&s.locs);
        if s.armed && r {
            let at = s.z;
            s.armed = false;
            s.z = 0;
            Some(at)
        } else {
            if !s.armed && !r && self.stim.holds(&s.locs) {
                s.armed = true;
                s.z = 0;
            }
            None
        }
    }

    fn initial(&self) -> State {
        let mut init = State {
            locs: self.net.initial_locations(),
            clocks: vec![0; self.caps.len()],
            armed: false,
            z: 0,
        };
        assert!(
            self.invariants_hold(&init.locs, &init.clocks),
            "initial state violates its invariant"
        );
        self.monitor(&mut init);
        init
    }

    /// One tick of delay or one discrete move, each with the response time
    /// discharged by it.
    fn successors(&self, s: &State) -> Vec<(State, Option<Ticks>)> {
        let mut succs = Vec::new();

        let mut delayed = s.clone();
        for (i, c) in delayed.clocks.iter_mut().enumerate().skip(1) {
            *c = (*c + 1).min(self.caps[i]);
        }
        if delayed.armed {
            delayed.z = (delayed.z + 1).min(self.z_cap);
        }
        if self.invariants_hold(&delayed.locs, &delayed.clocks) {
            succs.push((delayed, None));
        }

        let automata = self.net.automata();
        let mut moves: Vec<Vec<(usize, usize)>> = Vec::new();
        for (a, ta) in automata.iter().enumerate() {
            for &e in ta.outgoing(s.locs[a]) {
                let edge = &ta.edges()[e];
                match &edge.sync {
                    None => moves.push(vec![(a, e)]),
                    Some(sync) if sync.direction == SyncDirection::Emit => {
                        for (b, tb) in automata.iter().enumerate() {
                            if b == a {
                                continue;
                            }
                            for &f in tb.outgoing(s.locs[b]) {
                                let recv = &tb.edges()[f];
                                if recv
                                    .sync
                                    .as_ref()
                                    .is_some_and(|r| r.direction == SyncDirection::Receive && r.channel == sync.channel)
                                {
                                    moves.push(vec![(a, e), (b, f)]);
                                }
                            }
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        for m in moves {
            let enabled = m
                .iter()
                .all(|&(a, e)| self.holds_at(a, &automata[a].edges()[e].guard, &s.clocks));
            if !enabled {
                continue;
            }
            let mut next = s.clone();
            for &(a, e) in &m {
                let ta = &automata[a];
                for x in &ta.edges()[e].resets {
                    next.clocks[self.global(a, x.get())] = 0;
                }
                next.locs[a] = ta.endpoints(e).1;
            }
            if !self.invariants_hold(&next.locs, &next.clocks) {
                continue;
            }
            let discharged = self.monitor(&mut next);
            succs.push((next, discharged));
        }
        succs
    }
}

/// Checks `stimulus ->_bound response` on `net` by enumerating integer-time
/// runs, applying the same monitor rules as the symbolic explorer:
/// a stimulus arms the monitor only while idle and not answered on the spot,
/// a response disarms it, and an armed state that overshoots the bound or
/// can neither delay nor move is a violation.
pub fn check(net: &Network, stimulus: &StateFormula, response: &StateFormula, bound: Ticks) -> Outcome {
    explore(net, stimulus, response, bound).0
}

/// As [`check`], also returning the number of discrete states visited.
pub fn explore(net: &Network, stimulus: &StateFormula, response: &StateFormula, bound: Ticks) -> (Outcome, usize) {
    let stepper = Stepper::new(net, stimulus, response, bound + 1);
    let init = stepper.initial();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init);
    while let Some(s) = queue.pop_front() {
        if s.armed && s.z > bound {
            return (Outcome::Violated, seen.len());
        }
        let succs = stepper.successors(&s);
        if s.armed && succs.is_empty() {
            return (Outcome::Violated, seen.len());
        }
        for (n, _) in succs {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    (Outcome::Satisfied, seen.len())
}

/// Smallest bound in `0..=cap` for which [`check`] holds.
pub fn worst_case(net: &Network, stimulus: &StateFormula, response: &StateFormula, cap: Ticks) -> Option<Ticks> {
    (0..=cap).find(|&d| check(net, stimulus, response, d) == Outcome::Satisfied)
}

/// Smallest response time in `0..=cap` observed on any run.
pub fn best_case(net: &Network, stimulus: &StateFormula, response: &StateFormula, cap: Ticks) -> Option<Ticks> {
    let stepper = Stepper::new(net, stimulus, response, cap + 1);
    let init = stepper.initial();
    let mut best: Option<Ticks> = None;
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init);
    while let Some(s) = queue.pop_front() {
        for (n, discharged) in stepper.successors(&s) {
            if let Some(t) = discharged.filter(|&t| t <= cap) {
                best = Some(best.map_or(t, |b| b.min(t)));
            }
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    best
}
