//! Timing models of networked automation systems.
//!
//! Components of a sensing-to-actuation chain are described by jitter
//! bounds, turned into timed automata through a small set of structural
//! patterns, and composed into a network. Bounded response-time properties
//! (`stimulus` is always followed by `response` within `d` ticks) are then
//! decided by zone-based symbolic exploration.
//!
//! The crate is organised bottom-up:
//!
//! * [`zone`]: difference bound matrices over clocks.
//! * [`ta`]: timed automata and their network product semantics.
//! * [`patterns`]: atomic actions, sequential/alternative/parallel
//!   composition and the periodic timing wrapper.
//! * [`jitter`]: jitter intervals and time-chain construction.
//! * [`verifier`]: symbolic reachability with a response-time monitor.
//! * [`boiler`]: the steam-boiler level simulator used to pick deadlines.
//! * [`frontend`]: model documents, reports, and UPPAAL export.

pub mod boiler;
pub mod error;
pub mod frontend;
pub mod jitter;
pub mod patterns;
pub mod ta;
pub mod time;
pub mod verifier;
pub mod zone;

pub use error::{ModelError, SimError, VerifyError};
pub use jitter::{
    build_time_chain, total_jitter, Activation, ChainComponent, ChainModel, JitterInterval, JitterSpec, TimeChain,
};
pub use patterns::{
    alt_compose, atomic_action, check_channel_matching, is_well_formed, par_compose, seq_compose, wrap_periodic,
    AltMergeMode, DelayBounds, PeriodSpec,
};
pub use ta::{
    ClockConstraint, ClockId, ClockIndex, Edge, Location, LocationKind, Network, Sync, SyncDirection, TimedAutomaton,
};
pub use time::{Resolution, Ticks};
pub use verifier::{
    explore, worst_case_response, Limits, MonitorMode, Query, ResponseBound, SearchOrder, StateFormula, Verdict,
};
pub use zone::{Bound, Zone};
