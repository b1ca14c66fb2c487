//! TOML run configuration.
//!
//! ```toml
//! version = 1
//!
//! [params]
//! E_relative = 0.95      # or E = 0.9
//! M0 = 0.5
//!
//! [sim]
//! grid_points = 128
//!
//! [sweep]
//! observable = "min_variance"
//! engine = "analytic"
//! output = "out.csv"
//!
//! [[sweep.axes]]
//! name = "M1"
//! range = [0.0, 1.0, 0.1]
//! ```

use std::path::Path;

use pcopo_correlations::{is_below_threshold, threshold};
use pcopo_langevin::SimConfig;
use pcopo_model::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WorkbenchError};
use crate::sweep::{expand_range, Axis, Engine, Observable, ObservableOptions, SweepSpec};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawParams {
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    e: Option<f64>,
    #[serde(rename = "E_relative", skip_serializing_if = "Option::is_none")]
    e_relative: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta1: Option<f64>,
    #[serde(rename = "M0", skip_serializing_if = "Option::is_none")]
    m0: Option<f64>,
    #[serde(rename = "M1", skip_serializing_if = "Option::is_none")]
    m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kp: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawAxis {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    /// `[start, stop, step]`
    #[serde(skip_serializing_if = "Option::is_none")]
    range: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    observable: Option<Observable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    engine: Option<Engine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    options: Option<ObservableOptions>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    axes: Vec<RawAxis>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub(crate) version: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub(crate) params: Option<RawParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub(crate) sim: Option<SimConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub(crate) sweep: Option<RawSweep>,
}

/// A validated configuration. With `E_relative` set, `params.e` holds the
/// resolved pump of the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub params: ModelParams,
    pub sim: SimConfig,
    pub sweep: SweepSpec,
}

impl Default for LoadedConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            sim: SimConfig::default(),
            sweep: SweepSpec::default(),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub(crate) fn parse_raw<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| WorkbenchError::Parse {
        path: origin.to_string(),
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().trim().to_string(),
    })
}

fn convert_axis(raw: RawAxis) -> Result<Axis> {
    match raw {
        RawAxis {
            name: Some(name),
            names: None,
            values: Some(values),
            range: None,
            points: None,
        } => Ok(Axis::single(&name, values)),
        RawAxis {
            name: Some(name),
            names: None,
            values: None,
            range: Some([a, b, s]),
            points: None,
        } => Ok(Axis::single(&name, expand_range(a, b, s)?)),
        RawAxis {
            name: None,
            names: Some(names),
            values: None,
            range: None,
            points: Some(values),
        } => Ok(Axis { names, values }),
        _ => Err(WorkbenchError::validation(
            "axes",
            "each axis needs `name` with `values` or `range`, or `names` with `points`",
        )),
    }
}

impl LoadedConfig {
    pub(crate) fn from_raw(raw: RawConfig) -> Result<Self> {
        if let Some(v) = raw.version {
            if v != CONFIG_VERSION {
                return Err(WorkbenchError::validation(
                    "version",
                    format!("unsupported version {v} (this build reads {CONFIG_VERSION})"),
                ));
            }
        }
        let rp = raw.params.unwrap_or_default();
        if rp.e.is_some() && rp.e_relative.is_some() {
            return Err(WorkbenchError::validation("E_relative", "give either E or E_relative, not both"));
        }
        let d = ModelParams::default();
        let params = ModelParams {
            e: rp.e.unwrap_or(d.e),
            delta0: rp.delta0.unwrap_or(d.delta0),
            delta1: rp.delta1.unwrap_or(d.delta1),
            m0: rp.m0.unwrap_or(d.m0),
            m1: rp.m1.unwrap_or(d.m1),
            kp: rp.kp,
        };
        let rs = raw.sweep.unwrap_or_default();
        let sweep = SweepSpec {
            axes: rs.axes.into_iter().map(convert_axis).collect::<Result<_>>()?,
            observable: rs.observable.unwrap_or(Observable::Intensity),
            engine: rs.engine.unwrap_or_default(),
            output_path: rs.output,
            e_relative: rp.e_relative,
            options: rs.options.unwrap_or_default(),
        };
        LoadedConfig {
            params,
            sim: raw.sim.unwrap_or_default(),
            sweep,
        }
        .finalize()
    }

    /// Resolves `E_relative` on the base point, then validates.
    pub fn finalize(mut self) -> Result<Self> {
        self.params = self.sweep.resolve(&self.params)?;
        self.validate()?;
        Ok(self)
    }

    /// Checks parameters, grid commensurability and the threshold condition
    /// at every grid point.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.sweep.validate()?;
        self.sim.validate(&self.params)?;
        for p in self.sweep.points(&self.params)? {
            p.validate()?;
            if self.sweep.e_relative.is_some() {
                let r = self.sweep.resolve(&p)?;
                if self.sweep.observable.needs_below_threshold() && !is_below_threshold(&r)? {
                    return Err(WorkbenchError::validation(
                        "E_relative",
                        format!(
                            "E = {} is not below the threshold {} at M0 = {}, M1 = {}",
                            r.e,
                            threshold(&p)?,
                            p.m0,
                            p.m1
                        ),
                    ));
                }
            }
            if self.sweep.engine.stochastic() {
                self.sim.validate(&p)?;
            }
        }
        Ok(())
    }

    pub(crate) fn to_raw(&self) -> RawConfig {
        let p = &self.params;
        let s = &self.sweep;
        RawConfig {
            version: Some(CONFIG_VERSION),
            params: Some(RawParams {
                e: s.e_relative.is_none().then_some(p.e),
                e_relative: s.e_relative,
                delta0: Some(p.delta0),
                delta1: Some(p.delta1),
                m0: Some(p.m0),
                m1: Some(p.m1),
                kp: p.kp,
            }),
            sim: Some(self.sim.clone()),
            sweep: Some(RawSweep {
                observable: Some(s.observable),
                engine: Some(s.engine),
                output: s.output_path.clone(),
                options: Some(s.options.clone()),
                axes: s
                    .axes
                    .iter()
                    .map(|a| {
                        if a.names.len() == 1 {
                            RawAxis {
                                name: Some(a.names[0].clone()),
                                values: Some(a.values.iter().map(|v| v[0]).collect()),
                                ..Default::default()
                            }
                        } else {
                            RawAxis {
                                names: Some(a.names.clone()),
                                points: Some(a.values.clone()),
                                ..Default::default()
                            }
                        }
                    })
                    .collect(),
            }),
        }
    }

    /// Canonical TOML that parses back to an identical configuration.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_raw()).map_err(|e| WorkbenchError::validation("config", e.to_string()))
    }
}

pub fn config_parse(text: &str, origin: &str) -> Result<LoadedConfig> {
    LoadedConfig::from_raw(parse_raw(text, origin)?)
}

pub fn config_load(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| WorkbenchError::io(path.display().to_string(), e))?;
    config_parse(&text, &path.display().to_string())
}
