#[path = "common/exprgen.rs"]
mod exprgen;
#[path = "common/fd.rs"]
mod fd;

use cgeom_core::jet::{coeff_count, Jet4, MAX_DEGREE};
use exprgen::{compile, order_errors, random_source};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn composed_expressions_match_finite_differences() {
    let limits = [0.0, 1e-6, 1e-5, 1e-4, 1e-3];
    let mut rng = StdRng::seed_from_u64(20);
    for _ in 0..20 {
        let src = random_source(&mut rng, 4);
        let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let errs = order_errors(&compile(&src), x);
        for k in 1..=MAX_DEGREE {
            assert!(errs[k] <= limits[k], "order {k}: {:e} for {src} at {x:?}", errs[k]);
        }
    }
}

fn arb_source() -> impl Strategy<Value = String> {
    any::<u64>().prop_map(|seed| random_source(&mut StdRng::seed_from_u64(seed), 4))
}

fn arb_point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64)
}

fn arb_jet() -> impl Strategy<Value = Jet4> {
    prop::collection::vec(-2.0..2.0f64, coeff_count(MAX_DEGREE))
        .prop_map(|c| Jet4::from_coeffs([0.1, 0.2, 0.3, 0.4], MAX_DEGREE, &c).unwrap())
}

fn close(a: &Jet4, b: &Jet4, tol: f64) -> bool {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    (a - b).max_abs() <= tol * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_then_parse_is_idempotent(src in arb_source()) {
        let once = compile(&src);
        let printed = once.to_string();
        let twice = compile(&printed);
        prop_assert_eq!(once.root(), twice.root());
        prop_assert_eq!(printed, twice.to_string());
    }

    #[test]
    fn low_orders_match_finite_differences(src in arb_source(), x in arb_point()) {
        let errs = order_errors(&compile(&src), x);
        prop_assert!(errs[1] <= 1e-6 && errs[2] <= 1e-6, "{:?} for {}", errs, src);
    }

    #[test]
    fn jets_form_a_commutative_ring(a in arb_jet(), b in arb_jet(), c in arb_jet()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!(close(&(&a * &b), &(&b * &a), 1e-13));
        prop_assert!(close(&(&(&a + &b) + &c), &(&a + &(&b + &c)), 1e-13));
        prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), 1e-13));
        prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), 1e-13));
    }

    #[test]
    fn partial_derivatives_commute(a in arb_jet(), i in 0..4usize, j in 0..4usize) {
        let ij = a.partial(i).unwrap().partial(j).unwrap();
        let ji = a.partial(j).unwrap().partial(i).unwrap();
        prop_assert_eq!(ij.degree(), MAX_DEGREE - 2);
        prop_assert_eq!(ij, ji);
    }
}
