use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;
use qbein_core::qspace::*;
use qbein_core::{DeformationParams, LaurentPoly, Universe};

fn universe() -> Arc<Universe> {
    Universe::new(["r", "q", "s"])
}

/// Small Laurent polynomials in three variables.
fn poly() -> impl Strategy<Value = LaurentPoly> {
    let term = (-5i64..=5, 1i64..=4, prop::collection::vec(-3i32..=3, 3));
    prop::collection::vec(term, 0..5).prop_map(|terms| {
        let u = universe();
        terms
            .into_iter()
            .fold(LaurentPoly::zero(&u), |acc, (n, d, e)| {
                &acc + &LaurentPoly::monomial(&u, BigRational::new(n.into(), d.into()), &e)
            })
    })
}

#[test]
fn twisted_coordinates_close() {
    for n in 2..=5 {
        let rep = verify_twist_coordinates(&DeformationParams::symbolic(n));
        assert!(rep.pass, "n = {n}: {:?}", rep.failures().next());
        assert_eq!(rep.entries.len(), n * (n - 1) / 2);
    }
}

#[test]
fn twisting_a_twisted_space_composes() {
    let p = DeformationParams::symbolic(3);
    let twice = p.twisted().compose_twist(&p).unwrap().twisted();
    let once = p.compose_twist(&p).unwrap().twisted();
    for i in 1..=3 {
        for j in 1..=3 {
            assert_eq!(twice.q(i, j), once.q(i, j));
        }
    }
}

#[test]
fn bein_constraints_by_series() {
    for (series, n, rank) in [(Series::B, 5, 2), (Series::C, 4, 2), (Series::D, 6, 3)] {
        let params = if series == Series::B {
            DeformationParams::symbolic_with_sqrt_r(n)
        } else {
            DeformationParams::symbolic(n)
        };
        let c = bein_constraints(&params, series).unwrap();
        assert_eq!(c.rank, rank);
        assert_eq!(c.free.len(), rank * (rank - 1) / 2);
        let rep = verify_bein_constraints_bcd(&params, series).unwrap();
        assert!(rep.pass, "{series}{n}: {:?}", rep.failures().next());
    }
    assert!(bein_constraints(&DeformationParams::symbolic(4), Series::B).is_err());
}

#[test]
fn non_invertible_generators_reject_negative_powers() {
    let alg = CocycleAlgebra::coordinates(&DeformationParams::symbolic(2));
    assert!(CocycleElement::generator(&alg, 0, -1).is_err());
    let e = CocycleAlgebra::bein(&DeformationParams::symbolic(2));
    let g = CocycleElement::generator(&e, 1, -1).unwrap();
    let prod = &g * &CocycleElement::generator(&e, 1, 1).unwrap();
    assert!(prod.as_scalar().unwrap().is_one());
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(&universe()), a.clone());
    }

    #[test]
    fn print_parse_round_trip(a in poly()) {
        let text = a.to_string();
        prop_assert_eq!(LaurentPoly::parse(&universe(), &text).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), x in 1i64..5, y in 1i64..5) {
        let pt = [("r", BigRational::new(x.into(), 3.into())), ("q", BigRational::from_integer(y.into())), ("s", BigRational::new(2.into(), 7.into()))];
        let (va, vb) = (a.eval_named(&pt).unwrap(), b.eval_named(&pt).unwrap());
        prop_assert_eq!((&a * &b).eval_named(&pt).unwrap(), &va * &vb);
        prop_assert_eq!((&a + &b).eval_named(&pt).unwrap(), va + vb);
    }

    #[test]
    fn cocycle_product_is_associative(
        words in prop::collection::vec(prop::collection::vec((0usize..4, -2i32..=2), 0..4), 3),
    ) {
        let alg = CocycleAlgebra::bein(&DeformationParams::symbolic(4));
        let [a, b, c] = [0, 1, 2].map(|k| CocycleElement::word(&alg, &words[k]).unwrap());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn cocycle_identity(x in prop::collection::vec(-2i32..=2, 4), y in prop::collection::vec(-2i32..=2, 4), z in prop::collection::vec(-2i32..=2, 4)) {
        // c(x, y) c(x + y, z) = c(x, y + z) c(y, z)
        let alg = CocycleAlgebra::bein(&DeformationParams::symbolic(4));
        let add = |a: &[i32], b: &[i32]| a.iter().zip(b).map(|(p, q)| p + q).collect::<Vec<_>>();
        let left = &alg.cocycle(&x, &y) * &alg.cocycle(&add(&x, &y), &z);
        let right = &alg.cocycle(&x, &add(&y, &z)) * &alg.cocycle(&y, &z);
        prop_assert_eq!(left, right);
    }
}
