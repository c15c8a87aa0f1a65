//! A metric given as coordinate expressions, optionally rescaled by a
//! conformal factor.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::curvature::{GeometryError, MetricAtPoint};
use crate::expr::{BinaryOp, Chart, Expr, ScalarExpr};
use crate::jet::{Jet4, NVARS};
use crate::tensor::JetTensor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DefinitionError {
    #[error("component ({0}, {1}) is given twice")]
    DuplicateComponent(usize, usize),
    #[error("component index ({0}, {1}) is out of range")]
    ComponentOutOfRange(usize, usize),
    #[error("expression refers to chart {found:?}, expected {expected:?}")]
    ChartMismatch {
        expected: [String; NVARS],
        found: [String; NVARS],
    },
    #[error("parameter `{0}` has no value")]
    UnboundParameter(String),
    #[error("rescaling constant must be positive, got {0}")]
    NonPositiveScale(f64),
}

/// Metric components `g_ab` as expressions in one chart. Only one of each
/// symmetric pair is stored; unspecified components are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricDefinition {
    name: String,
    chart: Chart,
    params: BTreeMap<String, f64>,
    components: BTreeMap<(usize, usize), ScalarExpr>,
    conformal_factor: Option<ScalarExpr>,
    signature: Option<[i8; NVARS]>,
}

impl MetricDefinition {
    pub fn new(
        name: impl Into<String>,
        chart: Chart,
        params: BTreeMap<String, f64>,
        components: Vec<((usize, usize), ScalarExpr)>,
    ) -> Result<Self, DefinitionError> {
        let mut map = BTreeMap::new();
        for ((a, b), e) in components {
            if a >= NVARS || b >= NVARS {
                return Err(DefinitionError::ComponentOutOfRange(a, b));
            }
            Self::check_expr(&chart, &params, &e)?;
            let key = (a.min(b), a.max(b));
            if map.insert(key, e).is_some() {
                return Err(DefinitionError::DuplicateComponent(key.0, key.1));
            }
        }
        Ok(Self {
            name: name.into(),
            chart,
            params,
            components: map,
            conformal_factor: None,
            signature: None,
        })
    }

    fn check_expr(chart: &Chart, params: &BTreeMap<String, f64>, e: &ScalarExpr) -> Result<(), DefinitionError> {
        if e.chart() != chart {
            return Err(DefinitionError::ChartMismatch {
                expected: chart.names().clone(),
                found: e.chart().names().clone(),
            });
        }
        if let Some(p) = e.parameters().into_iter().find(|p| !params.contains_key(p)) {
            return Err(DefinitionError::UnboundParameter(p));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn component(&self, a: usize, b: usize) -> Option<&ScalarExpr> {
        self.components.get(&(a.min(b), a.max(b)))
    }

    /// Expected eigenvalue signs of `g_ab`, checked at every point.
    pub fn with_signature(mut self, signature: [i8; NVARS]) -> Self {
        self.signature = Some(signature);
        self
    }

    pub fn signature(&self) -> Option<[i8; NVARS]> {
        self.signature
    }

    pub fn conformal_factor(&self) -> Option<&ScalarExpr> {
        self.conformal_factor.as_ref()
    }

    /// `Θ² g` for the given `Θ`. An existing factor is multiplied in.
    pub fn with_conformal_factor(&self, theta: ScalarExpr) -> Result<Self, DefinitionError> {
        Self::check_expr(&self.chart, &self.params, &theta)?;
        let combined = match &self.conformal_factor {
            None => theta,
            Some(old) => ScalarExpr::from_root(
                Expr::Binary(BinaryOp::Mul, Box::new(old.root().clone()), Box::new(theta.root().clone())),
                self.chart.clone(),
            ),
        };
        Ok(Self {
            name: format!("{}*theta^2", self.name),
            conformal_factor: Some(combined),
            ..self.clone()
        })
    }

    /// Constant rescaling `c g`, expressed as the conformal factor `√c`.
    pub fn scaled(&self, c: f64) -> Result<Self, DefinitionError> {
        if !(c > 0.0) {
            return Err(DefinitionError::NonPositiveScale(c));
        }
        let theta = ScalarExpr::from_root(Expr::Const(c.sqrt()), self.chart.clone());
        self.with_conformal_factor(theta)
    }

    /// Jet of the conformal factor at `point`, if one is set.
    pub fn theta_at(&self, point: [f64; NVARS], degree: usize) -> Result<Option<Jet4>, GeometryError> {
        let Some(theta) = &self.conformal_factor else {
            return Ok(None);
        };
        let seeds = Jet4::seeds(point, degree)?;
        let t = theta.eval_on_jets(&seeds, &self.params)?;
        if !(t.value() > 0.0) {
            return Err(GeometryError::NonPositiveConformalFactor(t.value()));
        }
        Ok(Some(t))
    }

    /// Component jets `g_ab` (including any conformal factor) at `point`.
    pub fn metric_jets(&self, point: [f64; NVARS], degree: usize) -> Result<JetTensor, GeometryError> {
        let seeds = Jet4::seeds(point, degree)?;
        let mut upper = BTreeMap::new();
        for (&key, e) in &self.components {
            upper.insert(key, e.eval_on_jets(&seeds, &self.params)?);
        }
        if let Some(theta) = self.theta_at(point, degree)? {
            let theta2 = &theta * &theta;
            for v in upper.values_mut() {
                *v = &*v * &theta2;
            }
        }
        let zero = Jet4::zero(point, degree);
        Ok(JetTensor::from_fn(0, 2, |i| {
            *upper.get(&(i[0].min(i[1]), i[0].max(i[1]))).unwrap_or(&zero)
        }))
    }

    /// The full-budget metric at `point`.
    pub fn metric_at(&self, point: [f64; NVARS]) -> Result<MetricAtPoint, GeometryError> {
        let metric = MetricAtPoint::new(self.metric_jets(point, crate::jet::MAX_DEGREE)?)?;
        if let Some(expected) = self.signature {
            let mut expected = expected;
            expected.sort_unstable();
            if expected != metric.signature() {
                return Err(GeometryError::SignatureMismatch {
                    expected,
                    found: metric.signature(),
                });
            }
        }
        Ok(metric)
    }
}
