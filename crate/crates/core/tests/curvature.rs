mod common;
#[path = "common/fd.rs"]
mod fd;

use cgeom_core::jet::Jet4;
use cgeom_core::tensor::{normalized_difference, relative_difference};
use cgeom_core::{GeometryFrame, JetTensor, MetricDefinition};
use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn frame(def: &MetricDefinition, p: [f64; 4]) -> GeometryFrame {
    GeometryFrame::new(def.metric_at(p).unwrap()).unwrap()
}

/// Random cubic covector field about `base`.
fn random_covector(base: [f64; 4], rng: &mut StdRng) -> JetTensor {
    let x = Jet4::seeds(base, 4).unwrap();
    JetTensor::from_fn(0, 1, |_| {
        let mut acc = Jet4::constant(rng.gen_range(-1.0..1.0), base, 4);
        for i in 0..4 {
            acc += x[i].scale(rng.gen_range(-1.0..1.0));
            for j in i..4 {
                acc += (&x[i] * &x[j]).scale(rng.gen_range(-1.0..1.0));
                for k in j..4 {
                    acc += (&(&x[i] * &x[j]) * &x[k]).scale(rng.gen_range(-0.3..0.3));
                }
            }
        }
        acc
    })
}

fn commutator_residual(f: &GeometryFrame, omega: &JetTensor) -> f64 {
    let d1 = f.covariant_derivative(omega).unwrap();
    // ∇_a∇_b ω_c stored [a, b, c]
    let d2 = f.covariant_derivative(&d1).unwrap();
    let comm = JetTensor::from_fn(0, 3, |i| d2.get(i) - d2.get(&[i[1], i[0], i[2]]));
    let rhs = JetTensor::from_fn(0, 3, |i| {
        let mut acc = Jet4::zero(f.base(), 2);
        for d in 0..4 {
            acc.add_product(f.riemann.get(&[d, i[0], i[1], i[2]]), omega.get(&[d]));
        }
        acc
    });
    relative_difference(&comm, &rhs, d2.max_abs() + rhs.max_abs())
}

fn test_metrics() -> Vec<MetricDefinition> {
    vec![
        minkowski(),
        schwarzschild(),
        schwarzschild_static(),
        schwarzschild_de_sitter(),
        kerr(),
        perturbed_schwarzschild(),
        rescaled(&schwarzschild(), FACTORS[0]),
    ]
}

#[test]
fn riemann_satisfies_the_commutator_identity() {
    let mut rng = StdRng::seed_from_u64(7);
    for def in test_metrics() {
        for p in POINTS {
            let f = frame(&def, p);
            for _ in 0..10 {
                let omega = random_covector(p, &mut rng);
                let res = commutator_residual(&f, &omega);
                assert!(res <= 1e-10, "{} at {p:?}: {res:e}", def.name());
            }
        }
    }
}

#[test]
fn schwarzschild_kretschmann_on_the_horizon() {
    let f = frame(&schwarzschild(), [0.0, 2.0, 1.5708, 0.0]);
    let k = f.kretschmann().unwrap().value();
    assert!((k - 0.75).abs() <= 0.75 * 1e-9, "{k}");
    let c = f.weyl_scalar.value();
    assert!((c - 0.75).abs() <= 0.75 * 1e-9, "{c}");
}

#[test]
fn kretschmann_matches_finite_difference_oracle() {
    for def in [schwarzschild_static(), kerr(), perturbed_schwarzschild()] {
        for p in POINTS {
            let jet = frame(&def, p).kretschmann().unwrap().value();
            let metric = |x: [f64; 4], a: usize, b: usize| {
                def.component(a, b)
                    .map(|e| e.eval_at(x, def.params()).unwrap())
                    .unwrap_or(0.0)
            };
            let fd = fd::kretschmann(&metric, p);
            assert!((jet - fd).abs() <= 1e-5 * jet.abs(), "{}: {jet} vs {fd}", def.name());
        }
    }
    let r: f64 = 3.0;
    let k = frame(&schwarzschild_static(), [0.0, r, 1.0, 0.0]).kretschmann().unwrap().value();
    assert!((k - 48.0 / r.powi(6)).abs() <= 1e-12);
}

#[test]
fn vacuum_has_vanishing_ricci_and_schouten() {
    for def in [schwarzschild(), schwarzschild_static(), kerr()] {
        for p in POINTS {
            let f = frame(&def, p);
            let scale = f.riemann.max_abs();
            assert!(f.ricci.max_abs() <= 1e-10 * scale, "{}: {:e}", def.name(), f.ricci.max_abs());
            assert!(f.schouten.max_abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn de_sitter_scalar_curvature() {
    let l: f64 = 3.0;
    for p in [[0.0, 1.0, 1.0, 0.0], [0.5, 2.0, 0.3, 1.0]] {
        let f = frame(&de_sitter(), p);
        let r = f.scalar.value();
        assert!((r - 12.0 / (l * l)).abs() <= 1e-9 * r, "{r}");
        let trace = f.schouten.trace_with(f.metric.g_inv()).unwrap();
        assert!((2.0 * trace.value() - r / 3.0).abs() <= 1e-12 * r);
    }
}

#[test]
fn algebraic_symmetries() {
    for def in test_metrics().into_iter().skip(1) {
        for p in POINTS {
            let f = frame(&def, p);
            let r = &f.riemann;
            let scale = r.max_abs();
            let bianchi = JetTensor::from_fn(1, 3, |i| {
                let (d, a, b, c) = (i[0], i[1], i[2], i[3]);
                &(r.get(&[d, a, b, c]) + r.get(&[d, b, c, a])) + r.get(&[d, c, a, b])
            });
            assert!(bianchi.max_abs() <= 1e-11 * scale, "{}: {:e}", def.name(), bianchi.max_abs() / scale);
            let antisym = JetTensor::from_fn(1, 3, |i| r.get(i) + r.get(&[i[0], i[2], i[1], i[3]]));
            assert_eq!(antisym.max_abs(), 0.0);
            let ric_t = f.ricci.permute(&[1, 0]).unwrap();
            assert!(relative_difference(&f.ricci, &ric_t, scale) <= 1e-11);
            // every trace of the Weyl tensor
            let w = &f.weyl;
            let wscale = w.max_abs();
            for (up, down) in [(0, 1), (0, 2), (0, 3)] {
                let tr = w.contract(up, down).unwrap();
                assert!(tr.max_abs() <= 1e-10 * wscale.max(scale), "{}", def.name());
            }
            let wl = &f.weyl_lowered;
            let g_inv = f.metric.g_inv();
            let raised = wl.raise(0, g_inv).unwrap();
            for down in [2, 3] {
                let tr = raised.contract(0, down).unwrap();
                assert!(tr.max_abs() <= 1e-10 * wscale.max(scale));
            }
        }
    }
}

#[test]
fn levi_civita_is_metric_compatible() {
    for def in test_metrics() {
        let f = frame(&def, POINTS[1]);
        let g = f.metric.g();
        let dg = f.covariant_derivative(g).unwrap();
        let scale = g.max_abs() * f.christoffel.max_abs().max(1.0);
        assert!(dg.max_abs() <= 1e-11 * scale, "{}: {:e}", def.name(), dg.max_abs() / scale);
        let c = JetTensor::scalar(Jet4::constant(2.5, POINTS[1], 3));
        assert_eq!(f.covariant_derivative(&c).unwrap().max_abs(), 0.0);
    }
}

#[test]
fn weyl_square_identity_in_four_dimensions() {
    for def in [schwarzschild(), kerr(), perturbed_schwarzschild(), rescaled(&kerr(), FACTORS[1])] {
        for p in POINTS {
            let f = frame(&def, p);
            // C_abmp C^dbmp
            let lhs = JetTensor::from_fn(1, 1, |i| {
                let (d, a) = (i[0], i[1]);
                let mut acc = Jet4::zero(p, 2);
                for b in 0..4 {
                    for m in 0..4 {
                        for q in 0..4 {
                            acc.add_product(f.weyl_lowered.get(&[a, b, m, q]), f.weyl_raised.get(&[d, b, m, q]));
                        }
                    }
                }
                acc
            });
            let quarter = f.weyl_scalar.scale(0.25);
            let rhs = JetTensor::kronecker(p, 2).scale_by(&quarter);
            let res = normalized_difference(&lhs, &rhs);
            assert!(res <= 1e-10, "{}: {res:e}", def.name());
        }
    }
}

#[test]
fn contracted_bianchi_links_weyl_divergence_to_schouten() {
    for def in [schwarzschild(), perturbed_schwarzschild(), kerr(), rescaled(&schwarzschild(), FACTORS[2])] {
        for p in POINTS {
            let f = frame(&def, p);
            let g_inv = f.metric.g_inv();
            // ∇_e C_abdc stored [e, a, b, d, c]
            let dc = f.covariant_derivative(&f.weyl_lowered).unwrap();
            let div = JetTensor::from_fn(0, 3, |i| {
                let mut acc = Jet4::zero(p, 1);
                for e in 0..4 {
                    for d in 0..4 {
                        acc.add_product(g_inv.get(&[e, d]), dc.get(&[e, i[0], i[1], d, i[2]]));
                    }
                }
                acc
            });
            let dl = f.covariant_derivative(&f.schouten).unwrap();
            let curl = dl.antisymmetrize(&[0, 1]).unwrap().scale(2.0);
            let scale = dc.max_abs();
            let res = relative_difference(&div, &curl, scale);
            assert!(res <= 1e-9, "{}: {res:e}", def.name());
        }
    }
}

#[test]
fn bach_vanishes_on_einstein_and_flat_metrics() {
    for def in [minkowski(), schwarzschild(), schwarzschild_de_sitter(), kerr()] {
        let f = frame(&def, POINTS[0]);
        let b = f.bach().unwrap();
        let scale = f.weyl_scalar.value().abs().max(f.riemann.max_abs_value().powi(2));
        assert!(b.max_abs() <= 1e-8 * scale.max(1e-300) || b.max_abs() < 1e-14, "{}: {:e}", def.name(), b.max_abs());
    }
}
