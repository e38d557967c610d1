//! Jitter intervals and end-to-end time chains.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::patterns::{atomic_action, par_compose, repeat, wrap_periodic, DelayBounds, PeriodSpec};
use crate::ta::{ClockConstraint, ClockIndex, Edge, Location, LocationKind, Network, TimedAutomaton};
use crate::time::Ticks;
use crate::verifier::StateFormula;

/// Closed interval of ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JitterInterval {
    pub min: Ticks,
    pub max: Ticks,
}

impl JitterInterval {
    pub fn new(min: Ticks, max: Ticks) -> Result<Self, ModelError> {
        let j = JitterInterval { min, max };
        j.validate()?;
        Ok(j)
    }

    pub fn constant(v: Ticks) -> Result<Self, ModelError> {
        Self::new(v, v)
    }

    pub fn zero() -> Self {
        JitterInterval { min: 0, max: 0 }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.min < 0 || self.min > self.max {
            return Err(ModelError::InvalidJitter(format!(
                "interval [{}, {}] must satisfy 0 <= min <= max",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn checked_add(self, other: JitterInterval) -> Option<JitterInterval> {
        Some(JitterInterval {
            min: self.min.checked_add(other.min)?,
            max: self.max.checked_add(other.max)?,
        })
    }

    pub fn width(&self) -> Ticks {
        self.max - self.min
    }

    pub fn contains(&self, t: Ticks) -> bool {
        self.min <= t && t <= self.max
    }
}

/// Hardware, software and communication jitter of one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JitterSpec {
    pub hardware: JitterInterval,
    pub software: JitterInterval,
    pub communication: JitterInterval,
}

impl JitterSpec {
    pub fn new(
        hardware: JitterInterval,
        software: JitterInterval,
        communication: JitterInterval,
    ) -> Result<Self, ModelError> {
        let s = JitterSpec {
            hardware,
            software,
            communication,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.hardware.validate()?;
        self.software.validate()?;
        self.communication.validate()?;
        if self.hardware.min != self.hardware.max {
            return Err(ModelError::InvalidJitter(format!(
                "hardware jitter must be constant, got [{}, {}]",
                self.hardware.min, self.hardware.max
            )));
        }
        Ok(())
    }
}

/// Total jitter: the component-wise sum of the three intervals.
pub fn total_jitter(spec: &JitterSpec) -> Result<JitterInterval, ModelError> {
    spec.validate()?;
    spec.hardware
        .checked_add(spec.software)
        .and_then(|j| j.checked_add(spec.communication))
        .ok_or(ModelError::Overflow)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Activation {
    EventTriggered { in_chan: String, out_chan: String },
    Periodic { period: PeriodSpec, out_chan: String },
}

impl Activation {
    pub fn in_chan(&self) -> Option<&str> {
        match self {
            Activation::EventTriggered { in_chan, .. } => Some(in_chan),
            Activation::Periodic { .. } => None,
        }
    }

    pub fn out_chan(&self) -> &str {
        match self {
            Activation::EventTriggered { out_chan, .. } | Activation::Periodic { out_chan, .. } => out_chan,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainComponent {
    pub name: String,
    pub spec: JitterSpec,
    pub activation: Activation,
}

/// Ordered sequence of components from sensing to actuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeChain {
    pub components: Vec<ChainComponent>,
    /// Name under which queries refer to the chain's stimulus.
    pub stimulus_label: String,
    /// Name under which queries refer to the chain's response.
    pub response_label: String,
}

impl TimeChain {
    pub fn new(components: Vec<ChainComponent>) -> Self {
        TimeChain {
            components,
            stimulus_label: "stimulus".into(),
            response_label: "response".into(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.components.is_empty() {
            return Err(ModelError::InvalidChain(
                "a time chain needs at least one component".into(),
            ));
        }
        let mut names = HashSet::new();
        for (i, c) in self.components.iter().enumerate() {
            if c.name.is_empty() || c.name.contains('.') || c.name.contains(char::is_whitespace) {
                return Err(ModelError::InvalidChain(format!("invalid component name `{}`", c.name)));
            }
            if c.name == SOURCE || c.name == SINK {
                return Err(ModelError::InvalidChain(format!(
                    "component name `{}` is reserved",
                    c.name
                )));
            }
            if !names.insert(c.name.as_str()) {
                return Err(ModelError::InvalidChain(format!("duplicate component `{}`", c.name)));
            }
            c.spec.validate()?;
            if let Activation::Periodic { period, .. } = &c.activation {
                if i > 0 {
                    return Err(ModelError::InvalidChain(format!(
                        "only the first component may be periodic, `{}` is at position {}",
                        c.name,
                        i + 1
                    )));
                }
                period.validate()?;
            }
        }
        let mut outs = HashSet::new();
        let mut ins = HashSet::new();
        for c in &self.components {
            if !outs.insert(c.activation.out_chan()) {
                return Err(ModelError::InvalidChain(format!(
                    "output channel `{}` is used twice",
                    c.activation.out_chan()
                )));
            }
            if let Some(ch) = c.activation.in_chan() {
                if !ins.insert(ch) {
                    return Err(ModelError::InvalidChain(format!("input channel `{ch}` is used twice")));
                }
            }
        }
        let mismatches: Vec<_> = self
            .components
            .windows(2)
            .filter_map(|w| {
                let out = w[0].activation.out_chan();
                match w[1].activation.in_chan() {
                    Some(inp) if inp == out => None,
                    _ => Some(crate::ta::ChannelViolation {
                        channel: out.to_string(),
                        direction: crate::ta::SyncDirection::Emit,
                        automaton: w[0].name.clone(),
                    }),
                }
            })
            .collect();
        if !mismatches.is_empty() {
            return Err(ModelError::ChannelMismatch(mismatches));
        }
        Ok(())
    }
}

const SOURCE: &str = "Source";
const SINK: &str = "Sink";

/// Network realizing a time chain, with the formulas marking its ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainModel {
    pub network: Network,
    /// The first component becomes active.
    pub stimulus: StateFormula,
    /// The last component's output has been delivered.
    pub response: StateFormula,
    /// Per-component total jitter, in chain order.
    pub bounds: Vec<JitterInterval>,
    /// Per-component atomic action before looping or wrapping.
    pub bodies: Vec<TimedAutomaton>,
}

/// Builds the network of a time chain.
///
/// Each component collapses to one atomic action bounded by its total
/// jitter. Event-triggered components are re-armed after every traversal;
/// a periodic first component is placed in a timing wrapper. An event
/// source feeds an event-triggered first component once, and a sink
/// receives the last output, passing through `Sink.Got` without delay.
pub fn build_time_chain(chain: &TimeChain) -> Result<ChainModel, ModelError> {
    chain.validate()?;
    let mut members = Vec::new();
    let mut bounds = Vec::new();
    let mut bodies = Vec::new();
    for c in &chain.components {
        let j = total_jitter(&c.spec)?;
        bounds.push(j);
        let delay = DelayBounds::new(j.min, j.max)?;
        let body = atomic_action(delay, c.activation.in_chan(), Some(c.activation.out_chan()))?.with_name(&c.name);
        let member = match &c.activation {
            Activation::EventTriggered { .. } => repeat(&body)?,
            Activation::Periodic { period, .. } => wrap_periodic(&body, *period)?,
        };
        members.push(member);
        bodies.push(body);
    }
    let first = &chain.components[0];
    if let Some(in_chan) = first.activation.in_chan() {
        members.insert(0, source(in_chan)?);
    }
    let last = chain.components.last().expect("validated non-empty");
    members.push(sink(last.activation.out_chan())?);
    let network = par_compose(&members)?;
    Ok(ChainModel {
        network,
        stimulus: StateFormula::atom(&first.name, "Act"),
        response: StateFormula::atom(SINK, "Got"),
        bounds,
        bodies,
    })
}

fn source(chan: &str) -> Result<TimedAutomaton, ModelError> {
    TimedAutomaton::new(
        SOURCE,
        vec![],
        vec![
            Location::new("Start", LocationKind::Pre),
            Location::new("Sent", LocationKind::Post),
        ],
        vec![Edge::new("Start", "Sent").emit(chan)],
        "Start",
    )
}

fn sink(chan: &str) -> Result<TimedAutomaton, ModelError> {
    let e = ClockIndex(1);
    TimedAutomaton::new(
        SINK,
        vec!["e".into()],
        vec![
            Location::new("Wait", LocationKind::Pre),
            Location::new("Got", LocationKind::Internal).with_invariant(ClockConstraint::le(e, 0)),
        ],
        vec![
            Edge::new("Wait", "Got").receive(chan).with_reset(e),
            Edge::new("Got", "Wait"),
        ],
        "Wait",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::{worst_case_response, Limits, ResponseBound};

    fn iv(a: Ticks, b: Ticks) -> JitterInterval {
        JitterInterval::new(a, b).unwrap()
    }

    fn event(name: &str, j: (Ticks, Ticks), i: &str, o: &str) -> ChainComponent {
        ChainComponent {
            name: name.into(),
            spec: JitterSpec::new(JitterInterval::zero(), iv(j.0, j.1), JitterInterval::zero()).unwrap(),
            activation: Activation::EventTriggered {
                in_chan: i.into(),
                out_chan: o.into(),
            },
        }
    }

    #[test]
    fn sums() {
        let s = JitterSpec::new(iv(20, 20), iv(10, 30), iv(5, 50)).unwrap();
        assert_eq!(total_jitter(&s).unwrap(), iv(35, 100));
        let z = JitterSpec::new(iv(0, 0), iv(0, 0), iv(0, 0)).unwrap();
        assert_eq!(total_jitter(&z).unwrap(), iv(0, 0));
        let c = JitterSpec::new(iv(20, 20), iv(0, 0), iv(7, 7)).unwrap();
        assert_eq!(total_jitter(&c).unwrap(), iv(27, 27));
    }

    #[test]
    fn hardware_must_be_constant() {
        assert!(matches!(
            JitterSpec::new(iv(1, 2), iv(0, 0), iv(0, 0)),
            Err(ModelError::InvalidJitter(_))
        ));
    }

    #[test]
    fn overflow() {
        let s = JitterSpec {
            hardware: iv(Ticks::MAX, Ticks::MAX),
            software: iv(1, 1),
            communication: iv(0, 0),
        };
        assert_eq!(total_jitter(&s), Err(ModelError::Overflow));
    }

    #[test]
    fn two_stage_chain() {
        let chain = TimeChain::new(vec![event("A", (2, 5), "a", "b"), event("B", (1, 3), "b", "c")]);
        let m = build_time_chain(&chain).unwrap();
        let wcrt = worst_case_response(&m.network, &m.stimulus, &m.response, &Limits::default()).unwrap();
        assert_eq!(wcrt, ResponseBound::Bounded(8));
    }

    #[test]
    fn constant_singleton() {
        let chain = TimeChain::new(vec![event("A", (4, 4), "a", "b")]);
        let m = build_time_chain(&chain).unwrap();
        let wcrt = worst_case_response(&m.network, &m.stimulus, &m.response, &Limits::default()).unwrap();
        assert_eq!(wcrt, ResponseBound::Bounded(4));
    }

    #[test]
    fn broken_link() {
        let chain = TimeChain::new(vec![event("A", (2, 5), "a", "b"), event("B", (1, 3), "x", "c")]);
        assert!(matches!(build_time_chain(&chain), Err(ModelError::ChannelMismatch(_))));
    }

    #[test]
    fn periodic_only_first() {
        let p = ChainComponent {
            name: "P".into(),
            spec: JitterSpec::new(iv(0, 0), iv(1, 1), iv(0, 0)).unwrap(),
            activation: Activation::Periodic {
                period: PeriodSpec::new(10, 0, 2).unwrap(),
                out_chan: "b".into(),
            },
        };
        let chain = TimeChain::new(vec![event("A", (2, 5), "a", "b"), p.clone()]);
        assert!(matches!(build_time_chain(&chain), Err(ModelError::InvalidChain(_))));
        let chain = TimeChain::new(vec![p, event("B", (1, 3), "b", "c")]);
        let m = build_time_chain(&chain).unwrap();
        assert_eq!(m.network.automata().len(), 3);
    }

    #[test]
    fn reserved_names() {
        let chain = TimeChain::new(vec![event("Sink", (2, 5), "a", "b")]);
        assert!(matches!(build_time_chain(&chain), Err(ModelError::InvalidChain(_))));
    }
}
