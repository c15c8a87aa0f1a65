mod common;

use cgeom_core::einstein::{decide, evaluate_point, DecideError, PointAnalysis, PointStatus, Verdict};
use cgeom_core::{GeometryFrame, MetricDefinition};
use common::*;

fn analysis(def: &MetricDefinition, p: [f64; 4]) -> PointAnalysis {
    PointAnalysis::new(GeometryFrame::new(def.metric_at(p).unwrap()).unwrap()).unwrap()
}

fn applicable() -> Vec<MetricDefinition> {
    let mut defs = vec![schwarzschild(), schwarzschild_de_sitter(), kerr(), perturbed_schwarzschild()];
    for f in FACTORS {
        defs.push(rescaled(&perturbed_schwarzschild(), f));
        defs.push(rescaled(&kerr(), f));
    }
    defs
}

#[test]
fn criteria_are_equivalent() {
    for def in applicable() {
        for p in POINTS {
            let r = analysis(&def, p).residuals;
            assert!(r.crosscheck <= 1e-9, "{} {p:?}: {:e}", def.name(), r.crosscheck);
            assert!(r.c_lambda_crosscheck <= 1e-9, "{} {p:?}: {:e}", def.name(), r.c_lambda_crosscheck);
        }
    }
}

#[test]
fn e_tensor_is_trace_free() {
    let a = analysis(&perturbed_schwarzschild(), POINTS[0]);
    let tr = a.e.trace_with(a.frame.metric.g_inv()).unwrap().value();
    assert!(tr.abs() <= 1e-12 * a.e.max_abs());
}

#[test]
fn rescaled_schwarzschild_has_vanishing_e() {
    let def = rescaled(&schwarzschild(), FACTORS[0]);
    for p in POINTS {
        let r = analysis(&def, p).residuals;
        assert!(r.e_ab <= 1e-8, "{:e}", r.e_ab);
    }
}

#[test]
fn perturbation_is_detected_by_both_paths() {
    let def = perturbed_schwarzschild();
    for r in [2.5, 4.0, 6.0] {
        let res = analysis(&def, [0.0, r, 1.2, 0.0]).residuals;
        assert!(res.e_ab > 1e-3, "r={r}: {:e}", res.e_ab);
        assert!(res.c_ricci_antisym.max(res.c_ricci_tracefree) > 1e-3);
    }
}

#[test]
fn decisions_on_reference_metrics() {
    let pts: Vec<[f64; 4]> = [3.0, 5.0, 10.0].iter().map(|&r| [0.0, r, 1.5708, 0.0]).collect();
    for def in [schwarzschild(), schwarzschild_de_sitter(), kerr(), rescaled(&schwarzschild(), FACTORS[0])] {
        let rep = decide(&def, &pts, 1e-7, None).unwrap();
        assert_eq!(rep.verdict, Verdict::ConformallyEinstein, "{}: {rep:?}", def.name());
    }
    let rep = decide(&perturbed_schwarzschild(), &pts, 1e-7, Some(2)).unwrap();
    assert_eq!(rep.verdict, Verdict::NotConformallyEinstein);
    let rep = decide(&minkowski(), &pts, 1e-7, None).unwrap();
    assert_eq!(rep.verdict, Verdict::Inconclusive);
    assert!(rep.points.iter().all(|p| p.status == PointStatus::Degenerate && p.residuals.is_none()));
}

#[test]
fn verdicts_are_conformally_and_scale_invariant() {
    let pts = POINTS.to_vec();
    for def in [schwarzschild(), kerr(), perturbed_schwarzschild(), minkowski()] {
        let base = decide(&def, &pts, 1e-7, None).unwrap();
        let mut variants: Vec<MetricDefinition> = FACTORS.iter().map(|f| rescaled(&def, f)).collect();
        variants.push(rescaled(&def, "1 + 0.05*sin(th)*cos(ph)"));
        variants.push(rescaled(&def, "exp(-0.02*r + 0.01*t)"));
        variants.push(def.scaled(7.5).unwrap());
        for v in variants {
            let rep = decide(&v, &pts, 1e-7, None).unwrap();
            assert_eq!(rep.verdict, base.verdict, "{}", v.name());
            for (a, b) in rep.points.iter().zip(&base.points) {
                assert_eq!(a.status, b.status, "{} at {:?}", v.name(), a.point);
            }
        }
    }
}

#[test]
fn both_paths_agree_pointwise() {
    for def in applicable() {
        let rep = decide(&def, &POINTS, 1e-7, None).unwrap();
        for p in &rep.points {
            assert_eq!(p.e_path_passes(1e-7), p.c_ricci_path_passes(1e-7), "{} {:?}", def.name(), p.point);
        }
    }
}

#[test]
fn singular_points_are_excluded() {
    let pts = [[0.0, 2.0, 1.0, 0.0], [0.0, 4.0, 1.0, 0.0]];
    let rep = decide(&schwarzschild_static(), &pts, 1e-7, None).unwrap();
    assert!(matches!(rep.points[0].status, PointStatus::Excluded(_)));
    assert_eq!(rep.points[1].status, PointStatus::Pass);
    assert_eq!(rep.verdict, Verdict::ConformallyEinstein);
    let single = evaluate_point(&schwarzschild_static(), pts[0], 1e-7);
    assert_eq!(single.residuals, None);
}

#[test]
fn parallel_and_serial_reports_match() {
    let pts: Vec<[f64; 4]> = (0..8).map(|i| [0.1 * i as f64, 3.0 + i as f64, 1.0, 0.2]).collect();
    let a = decide(&perturbed_schwarzschild(), &pts, 1e-7, Some(1)).unwrap();
    let b = decide(&perturbed_schwarzschild(), &pts, 1e-7, Some(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bad_arguments() {
    assert_eq!(decide(&kerr(), &[], 1e-7, None), Err(DecideError::NoPoints));
    assert_eq!(decide(&kerr(), &POINTS, 1.5, None), Err(DecideError::Tolerance(1.5)));
}
