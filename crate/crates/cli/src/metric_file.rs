//! Metric files: a small TOML document with `[metric]`, `[parameters]`,
//! `[components]`, `[conformal_factor]` and `[points]` sections.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use cgeom_core::expr::{is_valid_name, Function, ParseError};
use cgeom_core::{parse, Chart, DefinitionError, MetricDefinition, ScalarExpr};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Syntax { origin: String, message: String },
    #[error("{origin}: {message}")]
    Schema { origin: String, message: String },
    #[error("{origin}: {location}: {source}")]
    Expression {
        origin: String,
        location: String,
        #[source]
        source: ParseError,
    },
    #[error("{origin}: {source}")]
    Definition {
        origin: String,
        #[source]
        source: DefinitionError,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    metric: RawMetric,
    #[serde(default)]
    parameters: BTreeMap<String, f64>,
    components: BTreeMap<String, String>,
    #[serde(default)]
    conformal_factor: BTreeMap<String, String>,
    points: Option<RawPoints>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    name: String,
    description: Option<String>,
    coordinates: Vec<String>,
    signature: Option<Vec<i8>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoints {
    sample: Vec<Vec<f64>>,
}

/// A validated metric file with every expression parsed.
#[derive(Debug, Clone)]
pub struct MetricFile {
    pub definition: MetricDefinition,
    pub description: Option<String>,
    pub conformal_factors: BTreeMap<String, ScalarExpr>,
    pub points: Vec<[f64; 4]>,
}

impl MetricFile {
    /// Looks `spec` up among the file's named factors, falling back to
    /// parsing it as an expression in the metric's chart.
    pub fn conformal_factor(&self, spec: &str) -> Result<ScalarExpr, LoadError> {
        if let Some(f) = self.conformal_factors.get(spec) {
            return Ok(f.clone());
        }
        let declared: BTreeSet<String> = self.definition.params().keys().cloned().collect();
        parse(spec, self.definition.chart(), &declared).map_err(|source| LoadError::Expression {
            origin: "--conformal".into(),
            location: format!("factor \"{spec}\""),
            source,
        })
    }

    /// The metric rescaled by the factor named or written in `spec`.
    pub fn rescaled(&self, spec: &str) -> Result<MetricDefinition, LoadError> {
        let theta = self.conformal_factor(spec)?;
        self.definition
            .with_conformal_factor(theta)
            .map_err(|source| LoadError::Definition {
                origin: "--conformal".into(),
                source,
            })
    }
}

pub fn load_metric(path: &Path) -> Result<MetricFile, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_metric(&text, &path.display().to_string())
}

/// Parses and validates the text of a metric file. `origin` names the
/// source in error messages.
pub fn parse_metric(text: &str, origin: &str) -> Result<MetricFile, LoadError> {
    let schema = |message: String| LoadError::Schema {
        origin: origin.to_string(),
        message,
    };
    let raw: RawFile = toml::from_str(text).map_err(|e| LoadError::Syntax {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;

    if raw.metric.coordinates.len() != 4 {
        return Err(schema(format!(
            "[metric] coordinates must list exactly 4 names, got {}",
            raw.metric.coordinates.len()
        )));
    }
    let chart = Chart::new(&raw.metric.coordinates).map_err(|e| schema(format!("[metric] coordinates: {e}")))?;

    let signature = match raw.metric.signature {
        None => None,
        Some(s) => {
            let s: [i8; 4] = s
                .try_into()
                .map_err(|s: Vec<i8>| schema(format!("[metric] signature must have 4 entries, got {}", s.len())))?;
            if s.iter().any(|&x| x != 1 && x != -1) {
                return Err(schema(format!("[metric] signature entries must be 1 or -1, got {s:?}")));
            }
            Some(s)
        }
    };

    for (name, value) in &raw.parameters {
        if !is_valid_name(name) {
            return Err(schema(format!("[parameters] `{name}` is not a valid name")));
        }
        if chart.index_of(name).is_some() || Function::ALL.iter().any(|f| f.name() == name) {
            return Err(schema(format!("[parameters] `{name}` clashes with a coordinate or function name")));
        }
        if !value.is_finite() {
            return Err(schema(format!("[parameters] `{name}` must be finite")));
        }
    }
    let declared: BTreeSet<String> = raw.parameters.keys().cloned().collect();
    let expression = |location: String, src: &str| {
        parse(src, &chart, &declared).map_err(|source| LoadError::Expression {
            origin: origin.to_string(),
            location,
            source,
        })
    };

    let mut components = Vec::new();
    let mut seen = BTreeMap::new();
    for (key, src) in &raw.components {
        let (a, b) = component_indices(&chart, key).map_err(|m| schema(format!("[components] \"{key}\": {m}")))?;
        let pair = (a.min(b), a.max(b));
        if let Some(other) = seen.insert(pair, key.clone()) {
            return Err(schema(format!(
                "[components] \"{key}\" and \"{other}\" define the same symmetric component"
            )));
        }
        components.push(((a, b), expression(format!("component \"{key}\""), src)?));
    }
    if components.is_empty() {
        return Err(schema("[components] must define at least one component".into()));
    }

    let mut conformal_factors = BTreeMap::new();
    for (key, src) in &raw.conformal_factor {
        conformal_factors.insert(key.clone(), expression(format!("conformal factor \"{key}\""), src)?);
    }

    let points = raw
        .points
        .map(|p| p.sample)
        .unwrap_or_default()
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let n = p.len();
            p.try_into()
                .map_err(|_| schema(format!("[points] sample {i} has {n} coordinates, expected 4")))
        })
        .collect::<Result<Vec<[f64; 4]>, _>>()?;

    let mut definition = MetricDefinition::new(raw.metric.name, chart, raw.parameters, components)
        .map_err(|source| LoadError::Definition {
            origin: origin.to_string(),
            source,
        })?;
    if let Some(s) = signature {
        definition = definition.with_signature(s);
    }
    Ok(MetricFile {
        definition,
        description: raw.metric.description,
        conformal_factors,
        points,
    })
}

fn component_indices(chart: &Chart, key: &str) -> Result<(usize, usize), String> {
    let names: Vec<&str> = key.split(',').map(str::trim).collect();
    let [a, b] = names[..] else {
        return Err("key must be two coordinate names separated by a comma".into());
    };
    let index = |n: &str| chart.index_of(n).ok_or_else(|| format!("`{n}` is not a coordinate"));
    Ok((index(a)?, index(b)?))
}

/// Parses `"x0,x1,x2,x3;y0,y1,y2,y3;..."`.
pub fn parse_points(text: &str) -> Result<Vec<[f64; 4]>, String> {
    text.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let values = p
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}` in \"{p}\": {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            let n = values.len();
            let point: [f64; 4] = values
                .try_into()
                .map_err(|_| format!("point \"{p}\" has {n} coordinates, expected 4"))?;
            if point.iter().all(|x| x.is_finite()) {
                Ok(point)
            } else {
                Err(format!("point \"{p}\" is not finite"))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| if v.is_empty() { Err("no points given".into()) } else { Ok(v) })
}
