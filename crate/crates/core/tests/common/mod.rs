#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cgeom_core::{parse, Chart, MetricDefinition, ScalarExpr};

pub const COORDS: [&str; 4] = ["t", "r", "th", "ph"];

pub fn define(name: &str, params: &[(&str, f64)], comps: &[((usize, usize), &str)]) -> MetricDefinition {
    let chart = Chart::new(&COORDS).unwrap();
    let params: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let names: BTreeSet<String> = params.keys().cloned().collect();
    let comps = comps
        .iter()
        .map(|(ij, src)| (*ij, parse(src, &chart, &names).unwrap()))
        .collect();
    MetricDefinition::new(name, chart, params, comps).unwrap()
}

pub fn factor(def: &MetricDefinition, src: &str) -> ScalarExpr {
    let names: BTreeSet<String> = def.params().keys().cloned().collect();
    parse(src, def.chart(), &names).unwrap()
}

pub fn rescaled(def: &MetricDefinition, src: &str) -> MetricDefinition {
    def.with_conformal_factor(factor(def, src)).unwrap()
}

const SPHERE: [((usize, usize), &str); 2] = [((2, 2), "r^2"), ((3, 3), "r^2*sin(th)^2")];

/// Ingoing Eddington-Finkelstein chart; `t` is advanced time.
pub fn schwarzschild() -> MetricDefinition {
    let mut c = vec![((0, 0), "-(1 - 2*m/r)"), ((0, 1), "1")];
    c.extend(SPHERE);
    define("schwarzschild", &[("m", 1.0)], &c)
}

pub fn schwarzschild_static() -> MetricDefinition {
    let mut c = vec![((0, 0), "-(1 - 2*m/r)"), ((1, 1), "1/(1 - 2*m/r)")];
    c.extend(SPHERE);
    define("schwarzschild-static", &[("m", 1.0)], &c)
}

pub fn schwarzschild_de_sitter() -> MetricDefinition {
    let mut c = vec![((0, 0), "-(1 - 2*m/r - lam*r^2/3)"), ((0, 1), "1")];
    c.extend(SPHERE);
    define("schwarzschild-de-sitter", &[("m", 1.0), ("lam", 0.01)], &c)
}

pub fn perturbed_schwarzschild() -> MetricDefinition {
    let mut c = vec![((0, 0), "-(1 - 2*m/r)*(1 + 0.2*exp(-r))"), ((0, 1), "1")];
    c.extend(SPHERE);
    define("perturbed-schwarzschild", &[("m", 1.0)], &c)
}

pub fn de_sitter() -> MetricDefinition {
    let mut c = vec![((0, 0), "-(1 - r^2/l^2)"), ((1, 1), "1/(1 - r^2/l^2)")];
    c.extend(SPHERE);
    define("de-sitter", &[("l", 3.0)], &c)
}

pub fn kerr() -> MetricDefinition {
    let sigma = "(r^2 + a^2*cos(th)^2)";
    let delta = "(r^2 - 2*m*r + a^2)";
    let tt = format!("-(1 - 2*m*r/{sigma})");
    let tph = format!("-2*m*a*r*sin(th)^2/{sigma}");
    let rr = format!("{sigma}/{delta}");
    let phph = format!("(r^2 + a^2 + 2*m*r*a^2*sin(th)^2/{sigma})*sin(th)^2");
    define(
        "kerr",
        &[("m", 1.0), ("a", 0.5)],
        &[((0, 0), &tt), ((0, 3), &tph), ((1, 1), &rr), ((2, 2), sigma), ((3, 3), &phph)],
    )
}

pub fn minkowski() -> MetricDefinition {
    define("minkowski", &[], &[((0, 0), "-1"), ((1, 1), "1"), ((2, 2), "r^2"), ((3, 3), "r^2*sin(th)^2")])
}

pub const FACTORS: [&str; 3] = ["1 + 0.1*r/(1 + r)", "exp(0.05*t)", "1/(1 + 0.01*r^2)"];

pub const POINTS: [[f64; 4]; 3] = [[0.3, 3.0, 1.1, 0.4], [-0.5, 5.0, 0.8, 2.0], [1.2, 8.0, 1.9, -1.0]];

pub fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
