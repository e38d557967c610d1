//! Model documents.
//!
//! A model is a TOML document. Times are given in milliseconds and converted
//! to ticks at the declared resolution; boiler quantities stay in minutes and
//! liters.
//!
//! ```toml
//! schema = 1
//! resolution = 1.0          # ticks per ms
//!
//! [[component]]
//! name = "Sensor"
//! hardware = 0.0
//! software = [3.0, 5.0]
//! communication = [0.0, 0.0]
//! out = "sample"
//! period = 200.0
//! period_jitter = [0.0, 5.0]
//!
//! [[component]]
//! name = "Actuator"
//! software = [15.0, 30.0]
//! in = "sample"
//! out = "act"
//!
//! [query]
//! stimulus = "stimulus"     # or a formula such as "Sensor.Act"
//! response = "response"
//! bound = 40.0
//! ```

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::FrontendError;
use crate::boiler::{BoilerConfig, PumpCommandSchedule};
use crate::jitter::{Activation, ChainComponent, JitterInterval, JitterSpec, TimeChain};
use crate::patterns::PeriodSpec;
use crate::time::{Resolution, Ticks};
use crate::verifier::StateFormula;

pub const SCHEMA_VERSION: u32 = 1;

/// Parsed model with all times in ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub resolution: Resolution,
    pub chain: TimeChain,
    pub stimulus: StateFormula,
    pub response: StateFormula,
    pub bound: Option<Ticks>,
    pub boiler: Option<BoilerScenario>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoilerScenario {
    pub config: BoilerConfig,
    pub schedule: PumpCommandSchedule,
    /// Level at which a stimulus is assumed to occur.
    pub critical_level: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    schema: u32,
    resolution: f64,
    #[serde(rename = "component")]
    components: Vec<RawComponent>,
    query: RawQuery,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boiler: Option<RawBoiler>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    name: String,
    #[serde(default)]
    hardware: f64,
    #[serde(default)]
    software: [f64; 2],
    #[serde(default)]
    communication: [f64; 2],
    #[serde(rename = "in", default, skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(rename = "out")]
    output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period_jitter: Option<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    stimulus: String,
    response: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoiler {
    w0: f64,
    pump_rates: [f64; 2],
    start_delays: [f64; 2],
    vaporization: f64,
    #[serde(default)]
    power: f64,
    w_min: f64,
    w_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    critical_level: Option<f64>,
    #[serde(default, skip_serializing_if = "PumpCommandSchedule::is_empty")]
    schedule: PumpCommandSchedule,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(text: &str, span: Option<Range<usize>>, message: &str) -> FrontendError {
    let (line, column) = line_column(text, span.map_or(0, |s| s.start));
    FrontendError::Parse {
        line,
        column,
        message: message.trim().to_string(),
    }
}

struct Converter {
    resolution: Resolution,
}

impl Converter {
    fn ticks(&self, field: impl Fn() -> String, ms: f64) -> Result<Ticks, FrontendError> {
        self.resolution
            .ms_to_ticks(ms)
            .map_err(|source| FrontendError::Resolution { field: field(), source })
    }

    fn interval(&self, field: impl Fn() -> String, ms: [f64; 2]) -> Result<JitterInterval, FrontendError> {
        let min = self.ticks(|| format!("{}[0]", field()), ms[0])?;
        let max = self.ticks(|| format!("{}[1]", field()), ms[1])?;
        Ok(JitterInterval::new(min, max)?)
    }
}

/// Parses a model document.
pub fn parse_model(text: &str) -> Result<Model, FrontendError> {
    let raw: RawModel = toml::from_str(text).map_err(|e| parse_error(text, e.span(), e.message()))?;
    if raw.schema != SCHEMA_VERSION {
        return Err(FrontendError::Schema(raw.schema));
    }
    let resolution = Resolution::new(raw.resolution).map_err(|source| FrontendError::Resolution {
        field: "resolution".into(),
        source,
    })?;
    let conv = Converter { resolution };
    let mut components = Vec::new();
    for (i, c) in raw.components.into_iter().enumerate() {
        let at = |f: &str| format!("component[{i}].{f}");
        let hardware = conv.ticks(|| at("hardware"), c.hardware)?;
        let spec = JitterSpec::new(
            JitterInterval::new(hardware, hardware)?,
            conv.interval(|| at("software"), c.software)?,
            conv.interval(|| at("communication"), c.communication)?,
        )?;
        let activation = match (c.period, c.input) {
            (Some(period), None) => {
                let jit = c.period_jitter.unwrap_or([0.0, 0.0]);
                Activation::Periodic {
                    period: PeriodSpec::new(
                        conv.ticks(|| at("period"), period)?,
                        conv.ticks(|| at("period_jitter[0]"), jit[0])?,
                        conv.ticks(|| at("period_jitter[1]"), jit[1])?,
                    )?,
                    out_chan: c.output,
                }
            }
            (None, Some(input)) => {
                if c.period_jitter.is_some() {
                    return Err(FrontendError::Invalid(format!(
                        "{}: period_jitter requires period",
                        at("period_jitter")
                    )));
                }
                Activation::EventTriggered {
                    in_chan: input,
                    out_chan: c.output,
                }
            }
            (Some(_), Some(_)) => {
                return Err(FrontendError::Invalid(format!(
                    "component `{}` has both a period and an input channel",
                    c.name
                )))
            }
            (None, None) => {
                return Err(FrontendError::Invalid(format!(
                    "component `{}` needs either a period or an input channel",
                    c.name
                )))
            }
        };
        components.push(ChainComponent {
            name: c.name,
            spec,
            activation,
        });
    }
    let chain = TimeChain::new(components);
    let stimulus = query_formula(&chain, &raw.query.stimulus)?;
    let response = query_formula(&chain, &raw.query.response)?;
    let bound = raw
        .query
        .bound
        .map(|b| conv.ticks(|| "query.bound".into(), b))
        .transpose()?;
    let boiler = raw.boiler.map(|b| {
        let config = BoilerConfig {
            w0: b.w0,
            pump_rates: b.pump_rates,
            start_delays: b.start_delays,
            vaporization: b.vaporization,
            power: b.power,
            w_min: b.w_min,
            w_max: b.w_max,
        };
        BoilerScenario {
            critical_level: b.critical_level.unwrap_or(b.w0),
            config,
            schedule: b.schedule,
        }
    });
    if let Some(b) = &boiler {
        b.config.validate()?;
        b.schedule.validate()?;
    }
    Ok(Model {
        resolution,
        chain,
        stimulus,
        response,
        bound,
        boiler,
    })
}

fn query_formula(chain: &TimeChain, text: &str) -> Result<StateFormula, FrontendError> {
    let text = text.trim();
    let first = chain.components.first();
    if text == chain.stimulus_label {
        let c = first.ok_or_else(|| FrontendError::Invalid("empty chain".into()))?;
        Ok(StateFormula::atom(&c.name, "Act"))
    } else if text == chain.response_label {
        Ok(StateFormula::atom("Sink", "Got"))
    } else {
        Ok(StateFormula::parse(text)?)
    }
}

/// Renders `model` as a canonical document that parses back to it.
pub fn render_model(model: &Model) -> Result<String, FrontendError> {
    let r = &model.resolution;
    let ms = |t: Ticks| r.ticks_to_ms(t);
    let pair = |j: JitterInterval| [ms(j.min), ms(j.max)];
    let components = model
        .chain
        .components
        .iter()
        .map(|c| {
            let (input, period, period_jitter) = match &c.activation {
                Activation::EventTriggered { in_chan, .. } => (Some(in_chan.clone()), None, None),
                Activation::Periodic { period, .. } => (
                    None,
                    Some(ms(period.period)),
                    Some([ms(period.jit_lb), ms(period.jit_ub)]),
                ),
            };
            RawComponent {
                name: c.name.clone(),
                hardware: ms(c.spec.hardware.min),
                software: pair(c.spec.software),
                communication: pair(c.spec.communication),
                input,
                output: c.activation.out_chan().to_string(),
                period,
                period_jitter,
            }
        })
        .collect();
    let raw = RawModel {
        schema: SCHEMA_VERSION,
        resolution: r.ticks_per_ms(),
        components,
        query: RawQuery {
            stimulus: model.stimulus.to_string(),
            response: model.response.to_string(),
            bound: model.bound.map(ms),
        },
        boiler: model.boiler.as_ref().map(|b| RawBoiler {
            w0: b.config.w0,
            pump_rates: b.config.pump_rates,
            start_delays: b.config.start_delays,
            vaporization: b.config.vaporization,
            power: b.config.power,
            w_min: b.config.w_min,
            w_max: b.config.w_max,
            critical_level: Some(b.critical_level),
            schedule: b.schedule.clone(),
        }),
    };
    toml::to_string_pretty(&raw).map_err(|e| FrontendError::Invalid(format!("cannot render model: {e}")))
}
