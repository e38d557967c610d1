//! Closes a single pattern body with a one-shot source and a sink so its
//! response time can be queried.

use jitterbound::{
    par_compose, ClockConstraint, ClockIndex, Edge, Location, LocationKind, Network, StateFormula, SyncDirection,
    TimedAutomaton,
};

pub const IN: &str = "go";
pub const OUT: &str = "done";

pub struct Harness {
    pub network: Network,
    /// Any location entered by receiving on [`IN`].
    pub stimulus: StateFormula,
    pub response: StateFormula,
}

pub fn source() -> TimedAutomaton {
    TimedAutomaton::new(
        "Src",
        vec![],
        vec![
            Location::new("Start", LocationKind::Pre),
            Location::new("Sent", LocationKind::Post),
        ],
        vec![Edge::new("Start", "Sent").emit(IN)],
        "Start",
    )
    .expect("source")
}

pub fn sink() -> TimedAutomaton {
    let e = ClockIndex(1);
    TimedAutomaton::new(
        "Snk",
        vec!["e".into()],
        vec![
            Location::new("Wait", LocationKind::Pre),
            Location::new("Got", LocationKind::Internal).with_invariant(ClockConstraint::le(e, 0)),
        ],
        vec![
            Edge::new("Wait", "Got").receive(OUT).with_reset(e),
            Edge::new("Got", "Wait"),
        ],
        "Wait",
    )
    .expect("sink")
}

/// `body` must receive on [`IN`] and emit on [`OUT`].
pub fn close(body: &TimedAutomaton) -> Harness {
    let body = body.with_name("Body");
    let mut entered: Vec<String> = body
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            e.sync
                .as_ref()
                .is_some_and(|s| s.direction == SyncDirection::Receive && s.channel == IN)
        })
        .map(|(k, _)| body.location(body.endpoints(k).1).id.clone())
        .collect();
    entered.sort();
    entered.dedup();
    let atoms: Vec<StateFormula> = entered.into_iter().map(|l| StateFormula::atom("Body", l)).collect();
    let stimulus = if atoms.len() == 1 {
        atoms.into_iter().next().expect("one")
    } else {
        StateFormula::Or(atoms)
    };
    Harness {
        network: par_compose(&[source(), body, sink()]).expect("matched channels"),
        stimulus,
        response: StateFormula::atom("Snk", "Got"),
    }
}
