use std::fmt::Write as _;

use cgeom_core::conformal::ConformalError;
use cgeom_core::einstein::{decide, PointAnalysis, PointStatus, Report, Verdict};
use cgeom_core::{GeometryFrame, JetTensor, MetricDefinition, ScalarExpr};
use serde::Serialize;

use crate::invariants::{check_point, CheckKind, CheckOutcome, PointChecks};
use crate::metric_file::parse_points;
use crate::{catalog, json, CliError, Command, Format, MetricFile, Outcome, Quantity, Status};

/// Crosscheck residual above which the two decision paths are considered
/// internally inconsistent.
pub const CROSSCHECK_ALARM: f64 = 1e-6;

pub fn run(command: Command, workers: Option<usize>) -> Result<Outcome, CliError> {
    match command {
        Command::CheckEinstein {
            metric,
            points,
            tolerance,
            conformal,
            format,
        } => {
            let file = catalog::resolve(&metric)?;
            let def = target(&file, conformal.as_deref())?;
            let points = sample_points(&file, points.as_deref())?;
            let report = decide(&def, &points, tolerance, workers)?;
            check_einstein(&file, &report, conformal.as_deref(), format)
        }
        Command::Tensors {
            metric,
            at,
            show,
            conformal,
            format,
        } => {
            let file = catalog::resolve(&metric)?;
            let def = target(&file, conformal.as_deref())?;
            let point = match parse_points(&at).map_err(CliError::Points)?[..] {
                [p] => p,
                _ => return Err(CliError::Points("--at takes exactly one point".into())),
            };
            tensors(&def, point, &show, format)
        }
        Command::VerifyInvariants {
            metric,
            points,
            conformal,
            format,
        } => {
            let file = catalog::resolve(&metric)?;
            let points = sample_points(&file, points.as_deref())?;
            let (label, theta) = match conformal {
                Some(spec) => (spec.clone(), file.conformal_factor(&spec)?),
                None => file
                    .conformal_factors
                    .iter()
                    .next()
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .ok_or_else(|| CliError::Argument("the metric file names no conformal factor; pass --conformal".into()))?,
            };
            verify_invariants(&file.definition, &label, &theta, &points, format)
        }
        Command::Catalog { show, format } => catalog_listing(show.as_deref(), format),
    }
}

fn target(file: &MetricFile, conformal: Option<&str>) -> Result<MetricDefinition, CliError> {
    Ok(match conformal {
        Some(spec) => file.rescaled(spec)?,
        None => file.definition.clone(),
    })
}

fn sample_points(file: &MetricFile, flag: Option<&str>) -> Result<Vec<[f64; 4]>, CliError> {
    match flag {
        Some(text) => parse_points(text).map_err(CliError::Points),
        None if file.points.is_empty() => Err(CliError::Points(
            "the metric file has no [points] section; pass --points".into(),
        )),
        None => Ok(file.points.clone()),
    }
}

/// Shortest decimal that keeps 12 significant digits.
pub fn format_real(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let a = rounded.abs();
    if rounded == 0.0 || (1e-4..1e6).contains(&a) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

fn format_point(p: &[f64; 4]) -> String {
    let parts: Vec<String> = p.iter().map(|&x| format_real(x)).collect();
    format!("({})", parts.join(", "))
}

// check-einstein

#[derive(Serialize)]
struct EinsteinDoc<'a> {
    command: &'static str,
    metric: &'a str,
    conformal_factor: Option<String>,
    tolerance: f64,
    verdict: &'static str,
    scope: &'static str,
    max_residuals: MaxResiduals,
    points: Vec<PointDoc>,
}

#[derive(Serialize)]
struct MaxResiduals {
    e_ab: Option<f64>,
    c_ricci_antisym: Option<f64>,
    c_ricci_tracefree: Option<f64>,
    crosscheck: Option<f64>,
}

#[derive(Serialize)]
struct PointDoc {
    point: [f64; 4],
    status: &'static str,
    cdotc: Option<f64>,
    e_ab: Option<f64>,
    c_ricci_antisym: Option<f64>,
    c_ricci_tracefree: Option<f64>,
    crosscheck: Option<f64>,
    c_lambda_crosscheck: Option<f64>,
    scale: Option<f64>,
    reason: Option<String>,
}

const SCOPE: &str = "local: the verdict covers the sampled points only";

fn check_einstein(file: &MetricFile, report: &Report, conformal: Option<&str>, format: Format) -> Result<Outcome, CliError> {
    let alarm = report
        .points
        .iter()
        .filter_map(|p| p.residuals)
        .any(|r| r.crosscheck.max(r.c_lambda_crosscheck) > CROSSCHECK_ALARM);
    let status = if alarm {
        Status::InvariantViolation
    } else {
        match report.verdict {
            Verdict::ConformallyEinstein => Status::Pass,
            Verdict::NotConformallyEinstein => Status::NotConformallyEinstein,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    };
    let factor = conformal.map(|spec| file.conformal_factor(spec).map(|e| e.to_string())).transpose()?;
    let output = match format {
        Format::Structured => json::to_string(&EinsteinDoc {
            command: "check-einstein",
            metric: file.definition.name(),
            conformal_factor: factor,
            tolerance: report.tolerance,
            verdict: report.verdict.label(),
            scope: SCOPE,
            max_residuals: MaxResiduals {
                e_ab: report.max_e_ab,
                c_ricci_antisym: report.max_c_ricci_antisym,
                c_ricci_tracefree: report.max_c_ricci_tracefree,
                crosscheck: report.max_crosscheck,
            },
            points: report
                .points
                .iter()
                .map(|p| PointDoc {
                    point: p.point,
                    status: p.status.label(),
                    cdotc: p.cdotc,
                    e_ab: p.residuals.map(|r| r.e_ab),
                    c_ricci_antisym: p.residuals.map(|r| r.c_ricci_antisym),
                    c_ricci_tracefree: p.residuals.map(|r| r.c_ricci_tracefree),
                    crosscheck: p.residuals.map(|r| r.crosscheck),
                    c_lambda_crosscheck: p.residuals.map(|r| r.c_lambda_crosscheck),
                    scale: p.residuals.map(|r| r.scale),
                    reason: match &p.status {
                        PointStatus::Excluded(why) => Some(why.clone()),
                        _ => None,
                    },
                })
                .collect(),
        })?,
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "metric     {}", file.definition.name());
            if let Some(f) = &factor {
                let _ = writeln!(s, "rescaled   by ({f})^2");
            }
            let _ = writeln!(s, "tolerance  {:e}", report.tolerance);
            let _ = writeln!(s);
            let _ = writeln!(
                s,
                "{:<32} {:<11} {:>11} {:>10} {:>10} {:>10} {:>10}",
                "point", "status", "C.C", "E", "CR-anti", "CR-tf", "crosscheck"
            );
            for p in &report.points {
                let _ = write!(s, "{:<32} {:<11} ", format_point(&p.point), p.status.label());
                let _ = write!(s, "{:>11}", p.cdotc.map_or("-".into(), |c| format!("{c:.4e}")));
                match (&p.status, p.residuals) {
                    (_, Some(r)) => {
                        for v in [r.e_ab, r.c_ricci_antisym, r.c_ricci_tracefree, r.crosscheck.max(r.c_lambda_crosscheck)] {
                            let _ = write!(s, " {v:>10.2e}");
                        }
                        let _ = writeln!(s);
                    }
                    (PointStatus::Excluded(why), None) => {
                        let _ = writeln!(s, "  {why}");
                    }
                    _ => {
                        let _ = writeln!(s, "  Weyl tensor vanishes");
                    }
                }
            }
            let _ = writeln!(s);
            let _ = writeln!(s, "verdict    {} ({SCOPE})", report.verdict.label());
            if alarm {
                let _ = writeln!(s, "warning    the two decision paths disagree beyond {CROSSCHECK_ALARM:e}");
            }
            s
        }
    };
    Ok(Outcome { output, status })
}

// tensors

#[derive(Serialize)]
struct TensorsDoc<'a> {
    command: &'static str,
    metric: &'a str,
    coordinates: &'a [String; 4],
    point: [f64; 4],
    quantities: Vec<QuantityDoc>,
}

#[derive(Serialize)]
struct QuantityDoc {
    name: &'static str,
    /// Contravariant slots first, then covariant ones; values row-major.
    valence: [usize; 2],
    values: Vec<f64>,
}

struct Evaluated {
    frame: GeometryFrame,
    analysis: Option<Result<PointAnalysis, ConformalError>>,
}

impl Evaluated {
    fn analysis(&mut self) -> Result<&PointAnalysis, CliError> {
        let frame = &self.frame;
        match self.analysis.get_or_insert_with(|| PointAnalysis::new(frame.clone())) {
            Ok(a) => Ok(a),
            Err(ConformalError::DegenerateWeyl { cdotc }) => Err(CliError::Degenerate(format!(
                "the Weyl tensor vanishes at {} (C.C = {cdotc:e}); lambda, c-ricci and e are undefined there",
                format_point(&frame.base())
            ))),
            Err(e) => Err(CliError::Evaluation {
                point: frame.base(),
                message: e.to_string(),
            }),
        }
    }
}

fn quantity(q: Quantity, ev: &mut Evaluated) -> Result<JetTensor, CliError> {
    let eval_err = |e: &dyn std::fmt::Display, p: [f64; 4]| CliError::Evaluation {
        point: p,
        message: e.to_string(),
    };
    let base = ev.frame.base();
    let f = &ev.frame;
    Ok(match q {
        Quantity::Metric => f.metric.g().clone(),
        Quantity::InverseMetric => f.metric.g_inv().clone(),
        Quantity::Christoffel => f.christoffel.clone(),
        Quantity::Riemann => f.riemann.clone(),
        Quantity::Ricci => f.ricci.clone(),
        Quantity::RicciScalar => JetTensor::scalar(f.scalar),
        Quantity::Schouten => f.schouten.clone(),
        Quantity::Weyl => f.weyl.clone(),
        Quantity::WeylScalar => JetTensor::scalar(f.weyl_scalar),
        Quantity::Kretschmann => JetTensor::scalar(f.kretschmann().map_err(|e| eval_err(&e, base))?),
        Quantity::Bach => f.bach().map_err(|e| eval_err(&e, base))?,
        Quantity::Lambda => ev.analysis()?.cframe.lambda.clone(),
        Quantity::CRicci => ev.analysis()?.cframe.c_ricci.clone(),
        Quantity::E => ev.analysis()?.e.clone(),
    })
}

fn index_label(t: &JetTensor, flat: usize, names: &[String; 4]) -> String {
    let (up, down) = t.valence();
    let rank = up + down;
    let idx: Vec<&str> = (0..rank)
        .map(|k| names[(flat / 4usize.pow((rank - 1 - k) as u32)) % 4].as_str())
        .collect();
    let mut s = String::new();
    if up > 0 {
        let _ = write!(s, "^{}", idx[..up].join(","));
    }
    if down > 0 {
        let _ = write!(s, "_{}", idx[up..].join(","));
    }
    s
}

fn tensors(def: &MetricDefinition, point: [f64; 4], show: &[Quantity], format: Format) -> Result<Outcome, CliError> {
    let frame = def
        .metric_at(point)
        .and_then(GeometryFrame::new)
        .map_err(|e| CliError::Evaluation {
            point,
            message: e.to_string(),
        })?;
    let mut ev = Evaluated { frame, analysis: None };
    let mut computed = Vec::new();
    for &q in show {
        computed.push((q, quantity(q, &mut ev)?));
    }
    let names = def.chart().names();
    let output = match format {
        Format::Structured => json::to_string(&TensorsDoc {
            command: "tensors",
            metric: def.name(),
            coordinates: names,
            point,
            quantities: computed
                .iter()
                .map(|(q, t)| QuantityDoc {
                    name: q.name(),
                    valence: [t.valence().0, t.valence().1],
                    values: t.values(),
                })
                .collect(),
        })?,
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{} at {} = {}", def.name(), names.join(","), format_point(&point));
            for (q, t) in &computed {
                if t.rank() == 0 {
                    let _ = writeln!(s, "{} = {}", q.name(), format_real(t.value(&[])));
                    continue;
                }
                let _ = writeln!(s, "{}:", q.name());
                let values = t.values();
                let mut any = false;
                for (i, v) in values.iter().enumerate().filter(|(_, v)| **v != 0.0) {
                    any = true;
                    let _ = writeln!(s, "  {}{} = {}", q.name(), index_label(t, i, names), format_real(*v));
                }
                if !any {
                    let _ = writeln!(s, "  all components zero");
                }
            }
            s
        }
    };
    Ok(Outcome {
        output,
        status: Status::Pass,
    })
}

// verify-invariants

#[derive(Serialize)]
struct InvariantsDoc<'a> {
    command: &'static str,
    metric: &'a str,
    conformal_factor: String,
    checks: Vec<CheckDoc>,
    excluded: Vec<ExcludedDoc>,
    violations: usize,
}

#[derive(Serialize)]
struct CheckDoc {
    name: &'static str,
    limit: f64,
    max_residual: Option<f64>,
    points_checked: usize,
    points_skipped: usize,
    ok: bool,
}

#[derive(Serialize)]
struct ExcludedDoc {
    point: [f64; 4],
    reason: String,
}

fn summarize(results: &[PointChecks]) -> Vec<CheckDoc> {
    CheckKind::ALL
        .iter()
        .map(|&kind| {
            let outcomes: Vec<&CheckOutcome> = results
                .iter()
                .filter_map(|p| p.checks.as_ref().ok())
                .flat_map(|c| c.iter().filter(|(k, _)| *k == kind).map(|(_, o)| o))
                .collect();
            let residuals: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| match o {
                    CheckOutcome::Residual(r) => Some(*r),
                    CheckOutcome::Skipped => None,
                })
                .collect();
            let max_residual = residuals.iter().copied().reduce(f64::max);
            CheckDoc {
                name: kind.name(),
                limit: kind.limit(),
                max_residual,
                points_checked: residuals.len(),
                points_skipped: outcomes.len() - residuals.len(),
                // NaN residuals count as violations
                ok: residuals.iter().all(|r| *r <= kind.limit()),
            }
        })
        .collect()
}

fn verify_invariants(
    def: &MetricDefinition,
    factor_label: &str,
    theta: &ScalarExpr,
    points: &[[f64; 4]],
    format: Format,
) -> Result<Outcome, CliError> {
    let results: Vec<PointChecks> = points.iter().map(|&p| check_point(def, theta, p)).collect();
    let checks = summarize(&results);
    let excluded: Vec<ExcludedDoc> = results
        .iter()
        .filter_map(|p| {
            p.checks.as_ref().err().map(|why| ExcludedDoc {
                point: p.point,
                reason: why.clone(),
            })
        })
        .collect();
    let violations = checks.iter().filter(|c| !c.ok).count();
    let status = if excluded.len() == points.len() {
        Status::InputError
    } else if violations > 0 {
        Status::InvariantViolation
    } else {
        Status::Pass
    };
    let factor = if factor_label == theta.to_string() {
        factor_label.to_string()
    } else {
        format!("{factor_label} = {theta}")
    };
    let output = match format {
        Format::Structured => json::to_string(&InvariantsDoc {
            command: "verify-invariants",
            metric: def.name(),
            conformal_factor: factor,
            checks,
            excluded,
            violations,
        })?,
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "metric     {}", def.name());
            let _ = writeln!(s, "factor     {factor}");
            let _ = writeln!(s);
            let _ = writeln!(s, "{:<26} {:>10} {:>12} {:>7}  result", "check", "limit", "max", "points");
            for c in &checks {
                let max = c.max_residual.map_or("-".to_string(), |r| format!("{r:.3e}"));
                let result = match (c.ok, c.points_checked) {
                    (false, _) => "VIOLATED",
                    (true, 0) => "skipped",
                    (true, _) => "ok",
                };
                let _ = writeln!(
                    s,
                    "{:<26} {:>10.0e} {:>12} {:>7}  {result}",
                    c.name, c.limit, max, c.points_checked
                );
            }
            for e in &excluded {
                let _ = writeln!(s, "excluded {}: {}", format_point(&e.point), e.reason);
            }
            let _ = writeln!(s);
            let _ = writeln!(s, "{violations} violation(s)");
            s
        }
    };
    Ok(Outcome { output, status })
}

// catalog

#[derive(Serialize)]
struct CatalogEntry {
    name: String,
    description: Option<String>,
    coordinates: [String; 4],
    parameters: Vec<(String, f64)>,
    conformal_factors: Vec<(String, String)>,
    points: usize,
}

fn catalog_listing(show: Option<&str>, format: Format) -> Result<Outcome, CliError> {
    if let Some(name) = show {
        let text = catalog::source(name).ok_or_else(|| {
            CliError::Argument(format!(
                "no catalog entry `{name}` (known: {})",
                catalog::names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        return Ok(Outcome {
            output: text.to_string(),
            status: Status::Pass,
        });
    }
    let mut entries = Vec::new();
    for name in catalog::names() {
        let f = catalog::load(name)?;
        entries.push(CatalogEntry {
            name: name.to_string(),
            description: f.description.clone(),
            coordinates: f.definition.chart().names().clone(),
            parameters: f.definition.params().iter().map(|(k, v)| (k.clone(), *v)).collect(),
            conformal_factors: f.conformal_factors.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            points: f.points.len(),
        });
    }
    let output = match format {
        Format::Structured => json::to_string(&entries)?,
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                let _ = writeln!(s, "{}{}", catalog::PREFIX, e.name);
                if let Some(d) = &e.description {
                    let _ = writeln!(s, "    {d}");
                }
                let _ = writeln!(s, "    coordinates  {}", e.coordinates.join(", "));
                if !e.parameters.is_empty() {
                    let params: Vec<String> = e.parameters.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    let _ = writeln!(s, "    parameters   {}", params.join(", "));
                }
                for (k, v) in &e.conformal_factors {
                    let _ = writeln!(s, "    factor       {k}: {v}");
                }
                let _ = writeln!(s, "    points       {}", e.points);
            }
            s
        }
    };
    Ok(Outcome {
        output,
        status: Status::Pass,
    })
}
