//! Pointwise test for local conformal equivalence to an Einstein metric.
//!
//! Two conformally invariant criteria are evaluated side by side: the
//! trace-free tensor `E_ab = TF[L_ab + ∇_aΛ_b + Λ_aΛ_b]`, and the Ricci
//! tensor of the C-connection (`𝓡_[ab] = 0`, `𝓡_ab − ¼ g_ab 𝓡 = 0`).
//! Verdicts describe the sampled points only.

use rayon::prelude::*;
use thiserror::Error;

use crate::conformal::{lambda_field, CFrame, ConformalError};
use crate::curvature::{GeometryError, GeometryFrame};
use crate::definition::MetricDefinition;
use crate::jet::NVARS;
use crate::tensor::JetTensor;

pub const DEFAULT_TOLERANCE: f64 = 1e-7;
/// Residual denominators get a floor of this fraction of `max |C_abc^d|`.
pub const SCALE_FLOOR: f64 = 1e-4;
/// ... and of this fraction of the curvature ingredient scale, which tracks
/// rounding noise in charts with large metric components.
pub const NOISE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecideError {
    #[error("at least one sample point is required")]
    NoPoints,
    #[error("tolerance must lie in (0, 1), got {0}")]
    Tolerance(f64),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// `TF_g[L_ab + ∇_aΛ_b + Λ_aΛ_b]`, degree 0.
pub fn e_tensor(frame: &GeometryFrame, lambda: &JetTensor) -> Result<JetTensor, GeometryError> {
    let nabla_lambda = frame.covariant_derivative(lambda)?;
    e_tensor_from_parts(frame, lambda, &nabla_lambda)
}

fn e_tensor_from_parts(frame: &GeometryFrame, lambda: &JetTensor, nabla_lambda: &JetTensor) -> Result<JetTensor, GeometryError> {
    let l = frame.schouten.truncate(0);
    let lam = lambda.truncate(0);
    let sum = JetTensor::from_fn(0, 2, |i| {
        let mut acc = l.get(i) + nabla_lambda.get(i);
        acc.add_product(lam.get(&[i[0]]), lam.get(&[i[1]]));
        acc
    });
    Ok(sum.trace_free(&frame.metric.g().truncate(0), &frame.metric.g_inv().truncate(0))?)
}

/// `𝓡_[ab]` and `𝓡_(ab) − ¼ g_ab 𝓡`.
pub fn c_ricci_parts(cframe: &CFrame, frame: &GeometryFrame) -> Result<(JetTensor, JetTensor), GeometryError> {
    let antisym = cframe.c_ricci.antisymmetrize(&[0, 1])?;
    let sym = cframe.c_ricci.symmetrize(&[0, 1])?;
    let tracefree = sym.trace_free(&frame.metric.g().truncate(0), &frame.metric.g_inv().truncate(0))?;
    Ok((antisym, tracefree))
}

/// Scale-normalized residuals at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub e_ab: f64,
    pub c_ricci_antisym: f64,
    pub c_ricci_tracefree: f64,
    /// `E_ab − (TF[½𝓡_(ab)] − ¼𝓡_[ab])`.
    pub crosscheck: f64,
    /// `𝒞_[aΛ_b] − ¼𝓡_[ab]`.
    pub c_lambda_crosscheck: f64,
    /// The common denominator.
    pub scale: f64,
}

/// Everything computed at one non-degenerate point.
#[derive(Debug, Clone)]
pub struct PointAnalysis {
    pub frame: GeometryFrame,
    pub cframe: CFrame,
    pub nabla_lambda: JetTensor,
    pub e: JetTensor,
    pub residuals: Residuals,
}

fn max_value(t: &JetTensor) -> f64 {
    t.max_abs_value()
}

impl PointAnalysis {
    pub fn new(frame: GeometryFrame) -> Result<Self, ConformalError> {
        let lambda = lambda_field(&frame)?;
        let nabla_lambda = frame.covariant_derivative(&lambda)?;
        let e = e_tensor_from_parts(&frame, &lambda, &nabla_lambda)?;
        let cframe = CFrame::new(&frame, lambda)?;
        let (antisym, tracefree) = c_ricci_parts(&cframe, &frame)?;

        let lambda_norm = cframe.lambda.max_abs_value();
        let scale = max_value(&frame.schouten)
            + max_value(&nabla_lambda)
            + lambda_norm * lambda_norm
            + max_value(&cframe.c_ricci)
            + SCALE_FLOOR * frame.weyl.max_abs_value()
            + NOISE_FLOOR * frame.ingredient_scale();

        let tf_half = cframe
            .c_ricci
            .symmetrize(&[0, 1])
            .and_then(|s| s.scale(0.5).trace_free(&frame.metric.g().truncate(0), &frame.metric.g_inv().truncate(0)))
            .map_err(GeometryError::from)?;
        let quarter_antisym = antisym.scale(0.25);
        let predicted = tf_half.sub(&quarter_antisym).map_err(GeometryError::from)?;
        let c_lambda_antisym = cframe.c_lambda.antisymmetrize(&[0, 1]).map_err(GeometryError::from)?;

        let norm = |t: &JetTensor| max_value(t) / scale;
        let diff = |a: &JetTensor, b: &JetTensor| a.sub(b).map(|d| norm(&d)).map_err(GeometryError::from);
        let residuals = Residuals {
            e_ab: norm(&e),
            c_ricci_antisym: norm(&antisym),
            c_ricci_tracefree: norm(&tracefree),
            crosscheck: diff(&e, &predicted)?,
            c_lambda_crosscheck: diff(&c_lambda_antisym, &quarter_antisym)?,
            scale,
        };
        Ok(Self {
            frame,
            cframe,
            nabla_lambda,
            e,
            residuals,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointStatus {
    Pass,
    Fail,
    /// The Weyl tensor vanishes; the criteria do not apply.
    Degenerate,
    /// The metric could not be evaluated here (domain error, singular or
    /// wrong-signature metric). Excluded from the aggregate.
    Excluded(String),
}

impl PointStatus {
    pub fn label(&self) -> &'static str {
        match self {
            PointStatus::Pass => "pass",
            PointStatus::Fail => "fail",
            PointStatus::Degenerate => "degenerate",
            PointStatus::Excluded(_) => "excluded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointVerdict {
    pub point: [f64; NVARS],
    pub status: PointStatus,
    pub cdotc: Option<f64>,
    pub residuals: Option<Residuals>,
}

impl PointVerdict {
    /// Whether the `E_ab` path alone would pass.
    pub fn e_path_passes(&self, tolerance: f64) -> Option<bool> {
        self.residuals.map(|r| r.e_ab <= tolerance)
    }

    /// Whether the C-Ricci path alone would pass.
    pub fn c_ricci_path_passes(&self, tolerance: f64) -> Option<bool> {
        self.residuals
            .map(|r| r.c_ricci_antisym <= tolerance && r.c_ricci_tracefree <= tolerance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConformallyEinstein,
    NotConformallyEinstein,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::ConformallyEinstein => "conformally-einstein",
            Verdict::NotConformallyEinstein => "not-conformally-einstein",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub metric: String,
    pub tolerance: f64,
    pub points: Vec<PointVerdict>,
    pub verdict: Verdict,
    pub max_e_ab: Option<f64>,
    pub max_c_ricci_antisym: Option<f64>,
    pub max_c_ricci_tracefree: Option<f64>,
    pub max_crosscheck: Option<f64>,
}

/// Classifies one point.
pub fn evaluate_point(def: &MetricDefinition, point: [f64; NVARS], tolerance: f64) -> PointVerdict {
    let excluded = |e: &dyn std::fmt::Display| PointVerdict {
        point,
        status: PointStatus::Excluded(e.to_string()),
        cdotc: None,
        residuals: None,
    };
    let frame = match def.metric_at(point).and_then(GeometryFrame::new) {
        Ok(f) => f,
        Err(e) => return excluded(&e),
    };
    let cdotc = frame.weyl_scalar.value();
    match PointAnalysis::new(frame) {
        Ok(a) => {
            let r = a.residuals;
            let pass = r.e_ab <= tolerance && r.c_ricci_antisym <= tolerance && r.c_ricci_tracefree <= tolerance;
            PointVerdict {
                point,
                status: if pass { PointStatus::Pass } else { PointStatus::Fail },
                cdotc: Some(cdotc),
                residuals: Some(r),
            }
        }
        Err(ConformalError::DegenerateWeyl { .. }) => PointVerdict {
            point,
            status: PointStatus::Degenerate,
            cdotc: Some(cdotc),
            residuals: None,
        },
        Err(e) => excluded(&e),
    }
}

fn aggregate(points: &[PointVerdict]) -> Verdict {
    if points.iter().any(|p| p.status == PointStatus::Fail) {
        Verdict::NotConformallyEinstein
    } else if points.iter().any(|p| p.status == PointStatus::Pass) {
        Verdict::ConformallyEinstein
    } else {
        Verdict::Inconclusive
    }
}

fn max_of(points: &[PointVerdict], f: impl Fn(&Residuals) -> f64) -> Option<f64> {
    points.iter().filter_map(|p| p.residuals.as_ref()).map(f).reduce(f64::max)
}

/// Runs the test at every point. `workers` sets the thread count; `None`
/// uses the global pool. Points are evaluated independently and reported
/// in input order.
pub fn decide(
    def: &MetricDefinition,
    points: &[[f64; NVARS]],
    tolerance: f64,
    workers: Option<usize>,
) -> Result<Report, DecideError> {
    if points.is_empty() {
        return Err(DecideError::NoPoints);
    }
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(DecideError::Tolerance(tolerance));
    }
    let run = || -> Vec<PointVerdict> {
        points
            .par_iter()
            .map(|&p| evaluate_point(def, p, tolerance))
            .collect()
    };
    let verdicts = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| DecideError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(Report {
        metric: def.name().to_string(),
        tolerance,
        verdict: aggregate(&verdicts),
        max_e_ab: max_of(&verdicts, |r| r.e_ab),
        max_c_ricci_antisym: max_of(&verdicts, |r| r.c_ricci_antisym),
        max_c_ricci_tracefree: max_of(&verdicts, |r| r.c_ricci_tracefree),
        max_crosscheck: max_of(&verdicts, |r| r.crosscheck.max(r.c_lambda_crosscheck)),
        points: verdicts,
    })
}
