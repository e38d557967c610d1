//! Verification reports and trace documents.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::time::{Resolution, Ticks};
use crate::verifier::{Explorer, MonitorMode, ResponseBound, Trace, Verdict, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Satisfied,
    Violated,
    ResourceExhausted,
}

impl VerdictKind {
    pub fn of(v: &Verdict) -> Self {
        match v {
            Verdict::Satisfied => VerdictKind::Satisfied,
            Verdict::Violated(_) => VerdictKind::Violated,
            Verdict::ResourceExhausted { .. } => VerdictKind::ResourceExhausted,
        }
    }

    /// Process exit code: 0 satisfied, 1 violated, 2 exhausted.
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictKind::Satisfied => 0,
            VerdictKind::Violated => 1,
            VerdictKind::ResourceExhausted => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            VerdictKind::Satisfied => "SATISFIED",
            VerdictKind::Violated => "VIOLATED",
            VerdictKind::ResourceExhausted => "RESOURCE EXHAUSTED",
        }
    }
}

/// A duration reported both in ticks and milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Duration {
    pub ticks: Ticks,
    pub ms: f64,
}

impl Duration {
    pub fn new(ticks: Ticks, r: &Resolution) -> Self {
        Duration {
            ticks,
            ms: r.ticks_to_ms(ticks),
        }
    }

    fn of(b: ResponseBound, r: &Resolution) -> Option<Self> {
        match b {
            ResponseBound::Bounded(t) => Some(Duration::new(t, r)),
            ResponseBound::Unbounded => None,
        }
    }
}

fn show(d: Option<Duration>) -> String {
    match d {
        Some(d) => format!("{} ms ({} ticks)", d.ms, d.ticks),
        None => "unbounded".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStepDoc {
    /// `None` for the initial state.
    pub action: Option<String>,
    pub locations: Vec<String>,
    pub armed: bool,
    pub zone: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub kind: ViolationKind,
    pub steps: Vec<TraceStepDoc>,
}

impl TraceDocument {
    pub fn new(explorer: &Explorer<'_>, trace: &Trace) -> Self {
        let net = explorer.network();
        TraceDocument {
            kind: trace.kind,
            steps: trace
                .steps
                .iter()
                .map(|s| TraceStepDoc {
                    action: s.step.map(|st| net.describe_step(&st)),
                    locations: net.location_names(&s.state.locations),
                    armed: s.state.mode == MonitorMode::Armed,
                    zone: explorer.render_zone(&s.state.zone),
                })
                .collect(),
        }
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let kind = match self.kind {
            ViolationKind::DeadlineMissed => "deadline missed",
            ViolationKind::Timelock => "timelock while armed",
        };
        let _ = writeln!(out, "trace ({kind}, {} steps):", self.steps.len());
        for (i, s) in self.steps.iter().enumerate() {
            let action = s.action.as_deref().unwrap_or("initial");
            let mode = if s.armed { "armed" } else { "idle" };
            let _ = writeln!(out, "  {i:>3}. {action}");
            let _ = writeln!(out, "       at ({}) [{mode}] {}", s.locations.join(", "), s.zone);
        }
        out
    }
}

/// Outcome of checking one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub verdict: VerdictKind,
    pub stimulus: String,
    pub response: String,
    pub bound: Duration,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_case: Option<ResponseEstimate>,
    pub states_explored: usize,
    pub idle_timelocks: usize,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceDocument>,
}

/// Response-time estimate; `None` durations are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseEstimate {
    pub worst: Option<Duration>,
    pub best: Option<Duration>,
}

impl ResponseEstimate {
    pub fn new(worst: ResponseBound, best: ResponseBound, r: &Resolution) -> Self {
        ResponseEstimate {
            worst: Duration::of(worst, r),
            best: Duration::of(best, r),
        }
    }
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} -> {} within {} ({} states, {:.1} ms)",
            self.verdict.label(),
            self.stimulus,
            self.response,
            show(Some(self.bound)),
            self.states_explored,
            self.wall_time_ms
        )
    }

    pub fn render_human(&self, verbose: bool) -> String {
        let mut out = self.summary();
        out.push('\n');
        if !verbose {
            return out;
        }
        if let Some(w) = &self.worst_case {
            let _ = writeln!(out, "worst case: {}", show(w.worst));
            let _ = writeln!(out, "best case: {}", show(w.best));
        }
        if self.idle_timelocks > 0 {
            let _ = writeln!(out, "idle timelocks: {}", self.idle_timelocks);
        }
        if let Some(t) = &self.trace {
            out.push_str(&t.render_human());
        }
        out
    }

    pub fn render_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn parse_machine(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Outcome of a response-time search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseReport {
    pub stimulus: String,
    pub response: String,
    pub estimate: ResponseEstimate,
    pub wall_time_ms: f64,
}

impl ResponseReport {
    pub fn render_human(&self) -> String {
        format!(
            "worst-case response {} -> {}: {}\nbest-case response: {}\n",
            self.stimulus,
            self.response,
            show(self.estimate.worst),
            show(self.estimate.best)
        )
    }

    pub fn render_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
