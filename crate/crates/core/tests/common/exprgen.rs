//! Random smooth expressions and the per-order comparison of their jets
//! with finite differences.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cgeom_core::expr::{parse, Chart, ScalarExpr};
use cgeom_core::jet::{coeff_count, monomial, Jet4, MAX_DEGREE};
use rand::rngs::StdRng;
use rand::Rng;

use crate::fd;

pub fn chart() -> Chart {
    Chart::new(&["x", "y", "z", "w"]).unwrap()
}

pub fn compile(src: &str) -> ScalarExpr {
    parse(src, &chart(), &BTreeSet::new()).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// Source text of a random expression that is smooth on all of R^4 and
/// stays of moderate size on the unit box.
pub fn random_source(rng: &mut StdRng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..5) {
            0 => "x".into(),
            1 => "y".into(),
            2 => "z".into(),
            3 => "w".into(),
            _ => format!("{:.3}", rng.gen_range(-2.0..2.0)),
        };
    }
    let sub = |rng: &mut StdRng| random_source(rng, depth - 1);
    match rng.gen_range(0..11) {
        0 => format!("({}) + ({})", sub(rng), sub(rng)),
        1 => format!("({}) - ({})", sub(rng), sub(rng)),
        2 => format!("({}) * ({})", sub(rng), sub(rng)),
        3 => format!("sin({})", sub(rng)),
        4 => format!("cos({})", sub(rng)),
        5 => format!("tanh({})", sub(rng)),
        6 => format!("exp(0.3 * ({}))", sub(rng)),
        7 => format!("sqrt(1 + ({})^2)", sub(rng)),
        8 => format!("log(2 + sin({}))", sub(rng)),
        9 => format!("({}) / (1 + ({})^2)", sub(rng), sub(rng)),
        _ => format!("(1.5 + tanh({}))^1.5", sub(rng)),
    }
}

/// Largest relative error, per total order 1..=4, between jet derivatives
/// and finite differences of direct evaluation.
pub fn order_errors(e: &ScalarExpr, x: [f64; 4]) -> [f64; MAX_DEGREE + 1] {
    let none = BTreeMap::new();
    let jet = e.eval_on_jets(&Jet4::seeds(x, MAX_DEGREE).unwrap(), &none).unwrap();
    let f = |p: [f64; 4]| e.eval_at(p, &none).unwrap();
    let mut diff = [0.0f64; MAX_DEGREE + 1];
    let mut size = [0.0f64; MAX_DEGREE + 1];
    for i in 1..coeff_count(MAX_DEGREE) {
        let alpha = monomial(i);
        let k: usize = alpha.iter().map(|&a| a as usize).sum();
        let exact = jet.derivative(&alpha);
        let approx = fd::mixed_partial(&f, x, alpha, fd::default_step(k));
        diff[k] = diff[k].max((exact - approx).abs());
        size[k] = size[k].max(exact.abs());
    }
    // orders whose derivatives all vanish are measured against the value scale
    let floor = 1e-3 * size.iter().copied().fold(jet.value().abs(), f64::max);
    std::array::from_fn(|k| if k == 0 { 0.0 } else { diff[k] / size[k].max(floor) })
}
