//! Model documents, verification runs, reports, and export.

mod model;
mod report;
mod uppaal;

use std::time::Instant;

pub use model::{parse_model, render_model, BoilerScenario, Model, SCHEMA_VERSION};
pub use report::{Duration, Report, ResponseEstimate, ResponseReport, TraceDocument, TraceStepDoc, VerdictKind};
pub use uppaal::{
    export_uppaal, parse_xta, UppaalExport, XtaDocument, XtaError, XtaLocation, XtaProcess, XtaTransition,
};

use crate::boiler::required_response_bound;
use crate::error::{ModelError, SimError, VerifyError};
use crate::jitter::{build_time_chain, ChainModel};
use crate::patterns::{check_channel_matching, is_well_formed};
use crate::time::{ResolutionError, Ticks};
use crate::verifier::{
    best_case_response, worst_case_response, Exploration, Explorer, Limits, Query, ResponseBound, SearchOrder, Trace,
    Verdict,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrontendError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema version {0}, expected {SCHEMA_VERSION}")]
    Schema(u32),
    #[error("{field}: {source}")]
    Resolution { field: String, source: ResolutionError },
    #[error("{0}")]
    Invalid(String),
    #[error("no query bound: give one in the model, on the command line, or through a boiler scenario")]
    MissingBound,
    #[error("unsupported for export: {0}")]
    UnsupportedFeature(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Deadline implied by the model's boiler scenario at its critical level.
pub fn derived_bound(model: &Model) -> Result<Option<Ticks>, FrontendError> {
    let Some(b) = &model.boiler else {
        return Ok(None);
    };
    match required_response_bound(&b.config, b.critical_level, &model.resolution)? {
        ResponseBound::Bounded(t) => Ok(Some(t)),
        ResponseBound::Unbounded => Ok(None),
    }
}

/// The bound to check: an explicit override, the model's own, or the one
/// derived from the boiler scenario.
pub fn effective_bound(model: &Model, bound_override: Option<Ticks>) -> Result<Ticks, FrontendError> {
    match bound_override.or(model.bound) {
        Some(b) => Ok(b),
        None => derived_bound(model)?.ok_or(FrontendError::MissingBound),
    }
}

/// Network and query ready for verification.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub chain: ChainModel,
    pub query: Query,
}

pub fn prepare(model: &Model, bound_override: Option<Ticks>) -> Result<Prepared, FrontendError> {
    let chain = build_time_chain(&model.chain)?;
    let bound = effective_bound(model, bound_override)?;
    let query = Query::new(model.stimulus.clone(), model.response.clone(), bound)?;
    query.stimulus.resolve(&chain.network)?;
    query.response.resolve(&chain.network)?;
    Ok(Prepared { chain, query })
}

/// Structural diagnostics: chain shape, channel matching, and
/// well-formedness of every component body. Empty when the model is valid.
pub fn validate_model(model: &Model) -> Vec<String> {
    let mut diagnostics = Vec::new();
    match build_time_chain(&model.chain) {
        Ok(chain) => {
            for v in check_channel_matching(chain.network.automata()) {
                diagnostics.push(v.to_string());
            }
            for body in &chain.bodies {
                let wf = is_well_formed(body);
                diagnostics.extend(wf.diagnostics.into_iter().map(|d| format!("{}: {d}", body.name())));
            }
            for f in [&model.stimulus, &model.response] {
                if let Err(e) = f.resolve(&chain.network) {
                    diagnostics.push(e.to_string());
                }
            }
        }
        Err(ModelError::ChannelMismatch(vs)) => {
            diagnostics.extend(vs.iter().map(|v| format!("unmatched channel: {v}")));
        }
        Err(e) => diagnostics.push(e.to_string()),
    }
    diagnostics
}

/// Result of [`check`]: the report plus the raw trace for replay.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub report: Report,
    pub exploration: Exploration,
    pub prepared: Prepared,
}

impl CheckOutcome {
    pub fn trace(&self) -> Option<&Trace> {
        match &self.exploration.verdict {
            Verdict::Violated(t) => Some(t),
            _ => None,
        }
    }
}

pub fn check(
    model: &Model,
    bound_override: Option<Ticks>,
    limits: &Limits,
    order: SearchOrder,
) -> Result<CheckOutcome, FrontendError> {
    let prepared = prepare(model, bound_override)?;
    let start = Instant::now();
    let explorer = Explorer::new(&prepared.chain.network, &prepared.query)?;
    let exploration = explorer.explore(limits, order)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let trace = match &exploration.verdict {
        Verdict::Violated(t) => Some(TraceDocument::new(&explorer, t)),
        _ => None,
    };
    let report = Report {
        verdict: VerdictKind::of(&exploration.verdict),
        stimulus: prepared.query.stimulus.to_string(),
        response: prepared.query.response.to_string(),
        bound: Duration::new(prepared.query.bound, &model.resolution),
        worst_case: None,
        states_explored: exploration.states_explored,
        idle_timelocks: exploration.idle_timelocks,
        wall_time_ms,
        trace,
    };
    Ok(CheckOutcome {
        report,
        exploration,
        prepared,
    })
}

/// Worst- and best-case response times of the model's query pair.
pub fn response_times(model: &Model, limits: &Limits) -> Result<ResponseReport, FrontendError> {
    let chain = build_time_chain(&model.chain)?;
    let start = Instant::now();
    let worst = worst_case_response(&chain.network, &model.stimulus, &model.response, limits)?;
    let best = best_case_response(&chain.network, &model.stimulus, &model.response, limits)?;
    Ok(ResponseReport {
        stimulus: model.stimulus.to_string(),
        response: model.response.to_string(),
        estimate: ResponseEstimate::new(worst, best, &model.resolution),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// UPPAAL export of the model's network and query.
pub fn export(model: &Model, bound_override: Option<Ticks>) -> Result<UppaalExport, FrontendError> {
    let prepared = prepare(model, bound_override)?;
    export_uppaal(&prepared.chain.network, &prepared.query)
}
