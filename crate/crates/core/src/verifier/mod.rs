//! Bounded response-time verification.
//!
//! A query `stimulus ->_d response` holds when, on every run, each state
//! satisfying `stimulus` is followed by a state satisfying `response` within
//! `d` ticks. The explorer decides it by forward symbolic reachability over
//! the network product with a monitor fused into every symbolic state:
//!
//! * `Idle`: no stimulus is pending; the monitor clock `z` is unconstrained.
//! * `Armed`: a stimulus is pending; `z` measures the time since the oldest
//!   unanswered one.
//!
//! After every discrete step the monitor discharges when `response` holds and
//! arms (resetting `z`) when `stimulus` holds while idle. A reachable armed
//! state admitting `z > d`, or an armed timelock, is a violation.

mod formula;

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, VerifyError};
use crate::ta::{EdgeStep, Network};
use crate::time::Ticks;
use crate::zone::{Bound, Zone};

pub use formula::{ResolvedFormula, StateFormula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub stimulus: StateFormula,
    pub response: StateFormula,
    pub bound: Ticks,
}

impl Query {
    pub fn new(stimulus: StateFormula, response: StateFormula, bound: Ticks) -> Result<Self, VerifyError> {
        if bound < 0 {
            return Err(VerifyError::InvalidQuery(format!(
                "bound must be non-negative, got {bound}"
            )));
        }
        if stimulus == response {
            log::warn!("stimulus and response are the same formula `{stimulus}`; the query holds trivially");
        }
        Ok(Query {
            stimulus,
            response,
            bound,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonitorMode {
    Idle,
    Armed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolicState {
    /// Location index per automaton.
    pub locations: Vec<usize>,
    pub mode: MonitorMode,
    /// Delay-closed zone over the network clocks followed by `z`.
    pub zone: Zone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// Some armed state lets `z` exceed the bound.
    DeadlineMissed,
    /// An armed state can neither delay nor take an edge.
    Timelock,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// `None` for the initial state.
    pub step: Option<EdgeStep>,
    pub state: SymbolicState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub kind: ViolationKind,
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    Violated(Trace),
    ResourceExhausted { states: usize },
}

impl Verdict {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Verdict::Satisfied)
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated(_) => "violated",
            Verdict::ResourceExhausted { .. } => "resource_exhausted",
        }
    }
}

/// Verdict plus exploration statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exploration {
    pub verdict: Verdict,
    pub states_explored: usize,
    /// Idle states from which neither delay nor an edge is possible.
    pub idle_timelocks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SearchOrder {
    #[default]
    Bfs,
    Dfs,
    Random {
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    /// Largest bound tried by [`worst_case_response`]; defaults to a value
    /// derived from the network's constants.
    pub max_bound: Option<Ticks>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            max_bound: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResponseBound {
    Bounded(Ticks),
    Unbounded,
}

/// A symbolic successor together with the step that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Successor {
    pub step: EdgeStep,
    pub state: SymbolicState,
    /// Earliest value of `z` at which this step discharged a pending
    /// stimulus.
    pub discharged_at: Option<Ticks>,
}

/// Symbolic semantics of a network instrumented with the response monitor.
pub struct Explorer<'a> {
    net: &'a Network,
    stimulus: ResolvedFormula,
    response: ResolvedFormula,
    bound: Option<Ticks>,
    z: usize,
    max_consts: Vec<Ticks>,
}

impl<'a> Explorer<'a> {
    /// Explorer checking `query`.
    pub fn new(net: &'a Network, query: &Query) -> Result<Self, VerifyError> {
        Self::build(net, &query.stimulus, &query.response, Some(query.bound), query.bound)
    }

    /// Explorer that only observes response times, tracking `z` exactly up
    /// to `horizon`.
    pub fn observer(
        net: &'a Network,
        stimulus: &StateFormula,
        response: &StateFormula,
        horizon: Ticks,
    ) -> Result<Self, VerifyError> {
        Self::build(net, stimulus, response, None, horizon)
    }

    fn build(
        net: &'a Network,
        stimulus: &StateFormula,
        response: &StateFormula,
        bound: Option<Ticks>,
        z_const: Ticks,
    ) -> Result<Self, VerifyError> {
        let mut max_consts = net.max_constants();
        max_consts.push(z_const.max(0));
        Ok(Explorer {
            net,
            stimulus: stimulus.resolve(net)?,
            response: response.resolve(net)?,
            bound,
            z: net.dim(),
            max_consts,
        })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    /// Zone dimension: zero clock, network clocks, monitor clock.
    pub fn dim(&self) -> usize {
        self.z + 1
    }

    /// Index of the monitor clock.
    pub fn monitor_clock(&self) -> usize {
        self.z
    }

    /// Clock names for rendering zones, `z` last.
    pub fn clock_names(&self) -> Vec<String> {
        let mut names = self.net.clock_names();
        names.push("z".to_string());
        names
    }

    pub fn render_zone(&self, zone: &Zone) -> String {
        let names = self.clock_names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        zone.render(&refs)
    }

    fn with_invariant(&self, zone: Zone, locs: &[usize]) -> Zone {
        self.net
            .invariant(locs)
            .into_iter()
            .fold(zone, |z, (i, j, b)| z.constrain_raw(i, j, b))
    }

    /// Time successors of `zone` at `locs`, clipped by the location
    /// invariants. Empty if `zone` is empty or violates them.
    pub fn delay(&self, locs: &[usize], zone: &Zone) -> Zone {
        let inside = self.with_invariant(zone.clone(), locs);
        match inside.up() {
            Ok(up) => self.with_invariant(up, locs),
            Err(_) => inside,
        }
    }

    /// Applies the monitor to a zone just entered at `locs`; returns the new
    /// mode, the zone, and the discharge time if a stimulus was answered.
    fn monitor(&self, mode: MonitorMode, locs: &[usize], zone: Zone) -> (MonitorMode, Zone, Option<Ticks>) {
        let resp = self.response.eval(locs);
        match mode {
            MonitorMode::Armed if resp => {
                let at = -zone.get(0, self.z).value().expect("lower bound is finite");
                let freed = zone.free(self.z).expect("non-empty zone");
                (MonitorMode::Idle, freed, Some(at))
            }
            MonitorMode::Armed => (MonitorMode::Armed, zone, None),
            MonitorMode::Idle if !resp && self.stimulus.eval(locs) => {
                let armed = zone.reset(&[self.z]).expect("non-empty zone");
                (MonitorMode::Armed, armed, None)
            }
            MonitorMode::Idle => (MonitorMode::Idle, zone, None),
        }
    }

    pub fn initial(&self) -> Result<SymbolicState, VerifyError> {
        let locs = self.net.initial_locations();
        let zero = self.with_invariant(Zone::zero(self.dim()), &locs);
        if zero.is_empty() {
            return Err(
                ModelError::MalformedNetwork("initial locations violate their invariants at time 0".into()).into(),
            );
        }
        let (mode, zone, _) = self.monitor(MonitorMode::Idle, &locs, zero);
        let zone = self.delay(&locs, &zone).extrapolate(&self.max_consts);
        Ok(SymbolicState {
            locations: locs,
            mode,
            zone,
        })
    }

    /// Every symbolic successor of `s`: take an enabled step, apply resets
    /// and target invariants, update the monitor, then let time elapse.
    pub fn successors(&self, s: &SymbolicState) -> Result<Vec<Successor>, VerifyError> {
        let mut out = Vec::new();
        for step in self.net.enabled_edges(&s.locations, &s.zone)? {
            let guarded = self
                .net
                .step_guard(&step)
                .into_iter()
                .fold(s.zone.clone(), |z, (i, j, b)| z.constrain_raw(i, j, b));
            let Ok(reset) = guarded.reset(&self.net.step_resets(&step)) else {
                continue;
            };
            let locs = self.net.step_target(&s.locations, &step);
            let entered = self.with_invariant(reset, &locs);
            if entered.is_empty() {
                continue;
            }
            let (mode, zone, discharged_at) = self.monitor(s.mode, &locs, entered);
            let zone = self.delay(&locs, &zone).extrapolate(&self.max_consts);
            out.push(Successor {
                step,
                state: SymbolicState {
                    locations: locs,
                    mode,
                    zone,
                },
                discharged_at,
            });
        }
        Ok(out)
    }

    /// Armed state admitting `z > bound`.
    pub fn misses_deadline(&self, s: &SymbolicState) -> bool {
        match self.bound {
            Some(d) if s.mode == MonitorMode::Armed => s.zone.intersects_raw(0, self.z, Bound::lt(-d)),
            _ => false,
        }
    }

    fn is_timelock(&self, s: &SymbolicState, successors: &[Successor]) -> bool {
        successors.is_empty() && !s.zone.is_time_unbounded()
    }

    /// Checks that `trace` starts at the initial state, that each state is a
    /// successor of its predecessor via the recorded step, and that the last
    /// state violates the query.
    pub fn replay(&self, trace: &Trace) -> Result<bool, VerifyError> {
        let Some(first) = trace.steps.first() else {
            return Ok(false);
        };
        if first.step.is_some() || first.state != self.initial()? {
            return Ok(false);
        }
        for pair in trace.steps.windows(2) {
            let found = self
                .successors(&pair[0].state)?
                .into_iter()
                .any(|succ| Some(succ.step) == pair[1].step && succ.state == pair[1].state);
            if !found {
                return Ok(false);
            }
        }
        let last = &trace.steps.last().expect("non-empty").state;
        Ok(match trace.kind {
            ViolationKind::DeadlineMissed => self.misses_deadline(last),
            ViolationKind::Timelock => {
                last.mode == MonitorMode::Armed && self.is_timelock(last, &self.successors(last)?)
            }
        })
    }

    /// Forward reachability with passed/waiting lists and inclusion
    /// subsumption keyed by `(locations, mode)`.
    pub fn explore(&self, limits: &Limits, order: SearchOrder) -> Result<Exploration, VerifyError> {
        let mut search = Search::new(order);
        let init = self.initial()?;
        let root = search.push_node(init, None, None);
        if self.misses_deadline(&search.nodes[root].state) {
            return Ok(search.finish(Verdict::Violated(search.trace(root, ViolationKind::DeadlineMissed))));
        }
        search.admit(root);
        while let Some(i) = search.pop() {
            if search.nodes[i].covered {
                continue;
            }
            search.explored += 1;
            if search.explored > limits.max_states {
                let states = search.explored - 1;
                return Ok(search.finish(Verdict::ResourceExhausted { states }));
            }
            let state = search.nodes[i].state.clone();
            let succs = self.successors(&state)?;
            if self.is_timelock(&state, &succs) {
                if state.mode == MonitorMode::Armed {
                    return Ok(search.finish(Verdict::Violated(search.trace(i, ViolationKind::Timelock))));
                }
                search.idle_timelocks += 1;
            }
            for succ in succs {
                if self.misses_deadline(&succ.state) {
                    let n = search.push_node(succ.state, Some(i), Some(succ.step));
                    return Ok(search.finish(Verdict::Violated(search.trace(n, ViolationKind::DeadlineMissed))));
                }
                if !search.subsumed(&succ.state) {
                    let n = search.push_node(succ.state, Some(i), Some(succ.step));
                    search.admit(n);
                }
            }
        }
        Ok(search.finish(Verdict::Satisfied))
    }

    /// Smallest value of `z` at which any pending stimulus can be answered,
    /// over the whole reachable state space.
    pub fn earliest_response(&self, limits: &Limits) -> Result<Option<Ticks>, VerifyError> {
        let mut search = Search::new(SearchOrder::Bfs);
        let root = search.push_node(self.initial()?, None, None);
        search.admit(root);
        let mut best: Option<Ticks> = None;
        // Stimulus and response holding together initially answers at 0.
        if self.stimulus.eval(&search.nodes[root].state.locations)
            && self.response.eval(&search.nodes[root].state.locations)
        {
            best = Some(0);
        }
        while let Some(i) = search.pop() {
            if search.nodes[i].covered {
                continue;
            }
            search.explored += 1;
            if search.explored > limits.max_states {
                return Err(VerifyError::InvalidQuery(format!(
                    "state limit of {} reached while observing response times",
                    limits.max_states
                )));
            }
            let state = search.nodes[i].state.clone();
            for succ in self.successors(&state)? {
                if let Some(at) = succ.discharged_at {
                    best = Some(best.map_or(at, |b| b.min(at)));
                } else if state.mode == MonitorMode::Idle
                    && self.stimulus.eval(&succ.state.locations)
                    && self.response.eval(&succ.state.locations)
                {
                    best = Some(0);
                }
                if !search.subsumed(&succ.state) {
                    let n = search.push_node(succ.state, Some(i), Some(succ.step));
                    search.admit(n);
                }
            }
        }
        Ok(best)
    }
}

struct Node {
    state: SymbolicState,
    parent: Option<usize>,
    step: Option<EdgeStep>,
    covered: bool,
}

struct Search {
    nodes: Vec<Node>,
    passed: HashMap<(Vec<usize>, MonitorMode), Vec<usize>>,
    waiting: VecDeque<usize>,
    order: SearchOrder,
    rng: Option<ChaCha8Rng>,
    explored: usize,
    idle_timelocks: usize,
}

impl Search {
    fn new(order: SearchOrder) -> Self {
        let rng = match order {
            SearchOrder::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Search {
            nodes: Vec::new(),
            passed: HashMap::new(),
            waiting: VecDeque::new(),
            order,
            rng,
            explored: 0,
            idle_timelocks: 0,
        }
    }

    fn push_node(&mut self, state: SymbolicState, parent: Option<usize>, step: Option<EdgeStep>) -> usize {
        self.nodes.push(Node {
            state,
            parent,
            step,
            covered: false,
        });
        self.nodes.len() - 1
    }

    fn subsumed(&self, s: &SymbolicState) -> bool {
        self.passed
            .get(&(s.locations.clone(), s.mode))
            .is_some_and(|list| list.iter().any(|&j| self.nodes[j].state.zone.includes(&s.zone)))
    }

    /// Records node `n` as passed and waiting, retiring stored nodes whose
    /// zones it includes.
    fn admit(&mut self, n: usize) {
        let key = (self.nodes[n].state.locations.clone(), self.nodes[n].state.mode);
        let list = self.passed.entry(key).or_default();
        let zone = self.nodes[n].state.zone.clone();
        let nodes = &mut self.nodes;
        list.retain(|&j| {
            if zone.includes(&nodes[j].state.zone) {
                nodes[j].covered = true;
                false
            } else {
                true
            }
        });
        list.push(n);
        self.waiting.push_back(n);
    }

    fn pop(&mut self) -> Option<usize> {
        match self.order {
            SearchOrder::Bfs => self.waiting.pop_front(),
            SearchOrder::Dfs => self.waiting.pop_back(),
            SearchOrder::Random { .. } => {
                if self.waiting.is_empty() {
                    return None;
                }
                let rng = self.rng.as_mut().expect("seeded");
                let k = rng.random_range(0..self.waiting.len());
                self.waiting.swap_remove_back(k)
            }
        }
    }

    fn trace(&self, mut n: usize, kind: ViolationKind) -> Trace {
        let mut steps = Vec::new();
        loop {
            let node = &self.nodes[n];
            steps.push(TraceStep {
                step: node.step,
                state: node.state.clone(),
            });
            match node.parent {
                Some(p) => n = p,
                None => break,
            }
        }
        steps.reverse();
        Trace { kind, steps }
    }

    fn finish(&self, verdict: Verdict) -> Exploration {
        Exploration {
            verdict,
            states_explored: self.explored,
            idle_timelocks: self.idle_timelocks,
        }
    }
}

/// Checks `query` on `net`.
pub fn explore(net: &Network, query: &Query, limits: &Limits, order: SearchOrder) -> Result<Exploration, VerifyError> {
    Explorer::new(net, query)?.explore(limits, order)
}

/// Default search ceiling for response-time bounds: twice the sum of all
/// clock constants, plus one.
pub fn default_bound_cap(net: &Network) -> Ticks {
    let sum: Ticks = net.max_constants().iter().sum();
    sum.saturating_mul(2).saturating_add(1)
}

/// Smallest `d` for which `stimulus ->_d response` holds, found by binary
/// search over `[0, cap]`.
pub fn worst_case_response(
    net: &Network,
    stimulus: &StateFormula,
    response: &StateFormula,
    limits: &Limits,
) -> Result<ResponseBound, VerifyError> {
    let cap = limits.max_bound.unwrap_or_else(|| default_bound_cap(net));
    let holds = |d: Ticks| -> Result<bool, VerifyError> {
        let q = Query {
            stimulus: stimulus.clone(),
            response: response.clone(),
            bound: d,
        };
        match explore(net, &q, limits, SearchOrder::Bfs)?.verdict {
            Verdict::Satisfied => Ok(true),
            Verdict::Violated(_) => Ok(false),
            Verdict::ResourceExhausted { states } => Err(VerifyError::InvalidQuery(format!(
                "state limit reached after {states} states at bound {d}"
            ))),
        }
    };
    if !holds(cap)? {
        return Ok(ResponseBound::Unbounded);
    }
    let (mut lo, mut hi) = (0, cap);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(ResponseBound::Bounded(lo))
}

/// Smallest time in which a stimulus can be answered on some run.
pub fn best_case_response(
    net: &Network,
    stimulus: &StateFormula,
    response: &StateFormula,
    limits: &Limits,
) -> Result<ResponseBound, VerifyError> {
    let cap = limits.max_bound.unwrap_or_else(|| default_bound_cap(net));
    let earliest = Explorer::observer(net, stimulus, response, cap)?.earliest_response(limits)?;
    Ok(match earliest {
        Some(t) if t <= cap => ResponseBound::Bounded(t),
        _ => ResponseBound::Unbounded,
    })
}
