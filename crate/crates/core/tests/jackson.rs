use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use qbein_core::jackson::*;
use qbein_core::ncalg::{realization_symbol, Generator, RewriteSystem};
use qbein_core::{LaurentPoly, Universe};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Every exponent vector of length `n` with total degree at most `max`.
fn exponents(n: usize, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..=max {
        for mut rest in exponents(n - 1, max - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn sum(a: &[u32], range: std::ops::RangeInclusive<usize>) -> i64 {
    range.map(|j| a[j - 1] as i64).sum()
}

#[test]
fn monomial_eigen_action_is_exact() {
    for r in [q(1, 2), q(2, 7)] {
        for n in 1..=4 {
            let point: Vec<BigRational> = (1..=n as i64).map(|k| q(2 * k + 1, k + 2)).collect();
            for a in exponents(n, 6) {
                let f = LatticeFunction::single(BigRational::one(), &a);
                for i in 1..=n {
                    let got = forward_poly(&f, &r, i).unwrap();
                    let expected = if a[i - 1] == 0 {
                        LatticeFunction::monomial(n, BTreeMap::new()).unwrap()
                    } else {
                        let mut b = a.clone();
                        b[i - 1] -= 1;
                        let c = q_number(a[i - 1] as i64, &r) * r.powi(sum(&a, i + 1..=n));
                        LatticeFunction::single(c, &b)
                    };
                    let (
                        LatticeFunction::Monomial { coeffs: g, .. },
                        LatticeFunction::Monomial { coeffs: e, .. },
                    ) = (&got, &expected)
                    else {
                        unreachable!()
                    };
                    assert_eq!(g, e, "a = {a:?}, i = {i}");
                    // pointwise finite difference agrees exactly
                    let pointwise = jackson_forward(&f, &r, i, &point).unwrap();
                    assert_eq!(pointwise, expected.eval(&point).unwrap());
                }
            }
        }
    }
}

#[test]
fn backward_monomial_action_is_exact() {
    let r = q(1, 3);
    let ri = BigRational::one() / r.clone();
    for n in 1..=3 {
        let point: Vec<BigRational> = (1..=n as i64).map(|k| q(k + 4, 3)).collect();
        for a in exponents(n, 5) {
            let f = LatticeFunction::single(BigRational::one(), &a);
            for i in 1..=n {
                let got = jackson_backward(&f, &r, i, &point).unwrap();
                let expected = if a[i - 1] == 0 {
                    BigRational::zero()
                } else {
                    let mut b = a.clone();
                    b[i - 1] -= 1;
                    let c = q_number(a[i - 1] as i64, &ri) * r.powi(-sum(&a, 1..=i - 1));
                    LatticeFunction::single(c, &b).eval(&point).unwrap()
                };
                assert_eq!(got, expected, "a = {a:?}, i = {i}");
                assert_eq!(
                    backward_poly(&f, &r, i).unwrap().eval(&point).unwrap(),
                    expected
                );
            }
        }
    }
}

#[test]
fn one_dimensional_reductions() {
    let r = q(3, 5);
    let f = LatticeFunction::monomial(
        1,
        BTreeMap::from([(vec![0], q(2, 1)), (vec![3], q(-1, 4)), (vec![5], q(7, 3))]),
    )
    .unwrap();
    let ev = |x: BigRational| f.eval(&[x]).unwrap();
    for x in [q(1, 1), q(-2, 3), q(11, 7)] {
        let forward = (ev(x.clone()) - ev(r.clone() * x.clone()))
            / ((BigRational::one() - r.clone()) * x.clone());
        assert_eq!(
            jackson_forward(&f, &r, 1, std::slice::from_ref(&x)).unwrap(),
            forward
        );
        let ri = BigRational::one() / r.clone();
        let backward =
            (ev(ri.clone() * x.clone()) - ev(x.clone())) / ((ri - BigRational::one()) * x.clone());
        assert_eq!(
            jackson_backward(&f, &r, 1, std::slice::from_ref(&x)).unwrap(),
            backward
        );
        assert_ne!(
            jackson_backward_printed(&f, &r, 1, std::slice::from_ref(&x)).unwrap(),
            backward
        );
    }
}

#[test]
fn printed_backward_formula_fails_on_first_coordinate() {
    let f = LatticeFunction::single(q(1, 1), &[1, 0]);
    let r = q(1, 2);
    let x = [q(3, 1), q(2, 1)];
    assert_eq!(jackson_backward(&f, &r, 1, &x).unwrap(), q(1, 1));
    assert_eq!(
        jackson_backward_printed(&f, &r, 1, &x).unwrap(),
        q(1, 1) + r
    );
}

#[test]
fn factorization_for_every_representation() {
    let r = 0.5;
    let lat = GeometricLattice::cube(r, 2, -3, 4).unwrap();
    let g = |x: &[f64]| x[0].powi(3) * x[1] - 2.0 * x[1] * x[1] + 0.5;
    let reps = [
        LatticeFunction::sample(lat.clone(), g),
        LatticeFunction::analytic(2, g),
        LatticeFunction::monomial(
            2,
            BTreeMap::from([(vec![3, 1], 1.0), (vec![0, 2], -2.0), (vec![0, 0], 0.5)]),
        )
        .unwrap(),
    ];
    for f in &reps {
        for i in 1..=2 {
            let hi = dilatation_apply(f, &r, i + 1, DilatationVariant::Plain).unwrap();
            let lo = dilatation_apply(f, &r, i, DilatationVariant::Plain).unwrap();
            for l in [[0, 0], [1, 2], [-1, 3], [2, -2]] {
                let x = lat.point(&l);
                let lhs = (1.0 - r) * x[i - 1] * jackson_forward(f, &r, i, &x).unwrap();
                let rhs = hi.eval(&x).unwrap() - lo.eval(&x).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                    "{f:?} i={i} l={l:?}"
                );
            }
        }
    }
}

#[test]
fn sampled_derivative_leaves_lattice_at_edge() {
    let lat = GeometricLattice::cube(0.5, 1, 0, 3).unwrap();
    let f = LatticeFunction::sample(lat.clone(), |x| x[0] * x[0]);
    let inner = jackson_forward(&f, &0.5, 1, &lat.point(&[2])).unwrap();
    assert!((inner - 1.5 * 4.0).abs() < 1e-12);
    // r * r^0 = r^1 has l = -1, outside [0, 3]
    assert!(matches!(
        jackson_forward(&f, &0.5, 1, &lat.point(&[0])),
        Err(JacksonError::PointOffLattice(_))
    ));
}

#[test]
fn tilde_after_plain_is_identity() {
    let r = q(2, 5);
    let f = LatticeFunction::monomial(
        2,
        BTreeMap::from([(vec![2, 3], q(1, 1)), (vec![1, 0], q(-4, 1))]),
    )
    .unwrap();
    let af = dilatation_apply(&f, &r, 1, DilatationVariant::Plain).unwrap();
    let back = dilatation_apply(&af, &r, 2, DilatationVariant::Tilde).unwrap();
    let (LatticeFunction::Monomial { coeffs: a, .. }, LatticeFunction::Monomial { coeffs: b, .. }) =
        (&f, &back)
    else {
        unreachable!()
    };
    assert_eq!(a, b);
    let h = LatticeFunction::analytic(2, |x: &[f64]| (x[0] - 3.0 * x[1]).sin());
    let round = dilatation_apply(
        &dilatation_apply(&h, &0.3, 1, DilatationVariant::Plain).unwrap(),
        &0.3,
        2,
        DilatationVariant::Tilde,
    )
    .unwrap();
    for x in [[0.7, -1.1], [2.0, 5.0]] {
        assert!((round.eval(&x).unwrap() - h.eval(&x).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn integral_of_identity() {
    let f = LatticeFunction::single(BigRational::one(), &[1]);
    for r in [q(1, 2), q(9, 10)] {
        for k in -3..=3 {
            let expect = r.powi(-2 * k) / (BigRational::one() + r.clone());
            assert_eq!(jackson_integral_exact(&f, &r, k).unwrap(), expect);
        }
    }
}

#[test]
fn integral_of_zero() {
    let f = LatticeFunction::monomial(1, BTreeMap::from([(vec![2], 0.0)])).unwrap();
    let out = jackson_integral(&f, &0.5, 3, DEFAULT_INTEGRAL_TOL).unwrap();
    assert_eq!(out.value, 0.0);
}

#[test]
fn fundamental_theorem_for_cube() {
    let r = q(1, 2);
    let f = LatticeFunction::single(BigRational::one(), &[3]);
    let df = forward_poly(&f, &r, 1).unwrap();
    for k in [-2, 0, 1, 4] {
        assert_eq!(jackson_integral_exact(&df, &r, k).unwrap(), r.powi(-3 * k));
    }
    // truncated float sum agrees with the closed form
    let df = forward_fn(&LatticeFunction::single(1.0, &[3]), &0.5, 1);
    let num = jackson_integral(&df, &0.5, 2, DEFAULT_INTEGRAL_TOL).unwrap();
    assert!((num.value - 64.0).abs() < 1e-12, "{num:?}");
}

#[test]
fn classical_limit_of_cube() {
    let f = LatticeFunction::single(1.0, &[3]);
    let errs: Vec<f64> = [0.9, 0.99, 0.999]
        .iter()
        .map(|r| (jackson_forward(&f, r, 1, &[1.0]).unwrap() - 3.0).abs())
        .collect();
    for (e, r) in errs.iter().zip([0.9, 0.99, 0.999]) {
        assert!(*e <= 4.0 * (1.0 - r), "{e} at {r}");
    }
    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
}

#[test]
fn matches_realization_symbol() {
    let sys = RewriteSystem::calculus(3).unwrap();
    let r = q(2, 3);
    for i in 1..=3 {
        for (word, backward) in [(Generator::Deriv(i), false), (Generator::Tilde(i), true)] {
            let sym = realization_symbol(&sys.gen(word.clone()), 3).unwrap();
            for a in exponents(3, 4) {
                let f = LatticeFunction::single(BigRational::one(), &a);
                let g = if backward {
                    backward_poly(&f, &r, i)
                } else {
                    forward_poly(&f, &r, i)
                }
                .unwrap();
                let mut shift = vec![0; 3];
                shift[i - 1] = -1;
                let us: Vec<(String, BigRational)> = (1..=3)
                    .map(|j| (format!("u{j}"), r.powi(a[j - 1] as i64)))
                    .collect();
                let mut point: Vec<(&str, BigRational)> = vec![("r", r.clone())];
                point.extend(us.iter().map(|(n, v)| (n.as_str(), v.clone())));
                let cleared = sym
                    .terms
                    .get(&shift)
                    .map(|c| c.eval_named(&point).unwrap())
                    .unwrap_or_default();
                let value =
                    cleared / (BigRational::one() - r.clone()).powi(sym.denominator_power as i64);
                let mut b = a.clone();
                let coeff = if a[i - 1] == 0 {
                    BigRational::zero()
                } else {
                    b[i - 1] -= 1;
                    let LatticeFunction::Monomial { coeffs, .. } = &g else {
                        unreachable!()
                    };
                    coeffs.get(&b).cloned().unwrap_or_default()
                };
                assert_eq!(value, coeff, "{word} on {a:?}");
            }
        }
    }
}

#[test]
fn coefficient_identity_symbolic() {
    // [a; r] = (1 - u)/(1 - r) with u = r^a, v = r^b; cleared by (1 - r)
    let u = Universe::new(["r", "u", "v"]);
    let p = |s: &str| LaurentPoly::parse(&u, s).unwrap();
    let lhs = p("v - r*u*v");
    let rhs = &(&p("1 - r") + &p("r*v - r*u*v")) + &p("(r - 1)*(1 - v)");
    assert_eq!(lhs, rhs);
    let r = q(3, 7);
    for a in 0..8 {
        for b in 0..8 {
            let l = r.powi(b) * q_number(a + 1, &r);
            let rr = BigRational::one()
                + r.clone() * r.powi(b) * q_number(a, &r)
                + (r.clone() - BigRational::one()) * q_number(b, &r);
            assert_eq!(l, rr);
        }
    }
}

#[test]
fn cr_check_passes_at_both_bases() {
    for r in [0.5, 0.9] {
        let rep = verify_cr_numeric(3, r, 1000, 2024).unwrap();
        assert!(rep.pass, "{:?}", rep.failures().collect::<Vec<_>>());
        assert_eq!(rep.config["trials"], "1000");
    }
}

fn poly_strategy(n: usize) -> impl Strategy<Value = BTreeMap<Vec<u32>, i64>> {
    prop::collection::btree_map(prop::collection::vec(0u32..4, n), -5i64..=5, 1..5)
}

fn to_rational(n: usize, m: &BTreeMap<Vec<u32>, i64>) -> LatticeFunction<BigRational> {
    LatticeFunction::monomial(n, m.iter().map(|(a, c)| (a.clone(), q(*c, 1))).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn telescoping_is_exact(coeffs in poly_strategy(1), k in -3i64..4, den in 2i64..9) {
        let r = q(1, den);
        let f = to_rational(1, &coeffs);
        let df = forward_poly(&f, &r, 1).unwrap();
        let lim0 = f.eval(&[BigRational::zero()]).unwrap();
        let top = f.eval(&[r.powi(-k)]).unwrap();
        prop_assert_eq!(jackson_integral_exact(&df, &r, k).unwrap(), top - lim0);
    }

    #[test]
    fn dilatations_are_algebra_maps(f in poly_strategy(3), g in poly_strategy(3), i in 1usize..=4) {
        let r = q(3, 4);
        let (f, g) = (to_rational(3, &f), to_rational(3, &g));
        let x = [q(2, 1), q(-1, 3), q(5, 2)];
        let fg = f.product(&g);
        let lhs = dilatation_apply(&fg, &r, i, DilatationVariant::Plain).unwrap().eval(&x).unwrap();
        let af = dilatation_apply(&f, &r, i, DilatationVariant::Plain).unwrap().eval(&x).unwrap();
        let ag = dilatation_apply(&g, &r, i, DilatationVariant::Plain).unwrap().eval(&x).unwrap();
        prop_assert_eq!(lhs, af * ag);
        let t = i - 1;
        let lhs = dilatation_apply(&fg, &r, t, DilatationVariant::Tilde).unwrap().eval(&x).unwrap();
        let tf = dilatation_apply(&f, &r, t, DilatationVariant::Tilde).unwrap().eval(&x).unwrap();
        let tg = dilatation_apply(&g, &r, t, DilatationVariant::Tilde).unwrap().eval(&x).unwrap();
        prop_assert_eq!(lhs, tf * tg);
    }

    #[test]
    fn factorization_is_exact(f in poly_strategy(3), i in 1usize..=3) {
        let r = q(1, 3);
        let f = to_rational(3, &f);
        let x = [q(3, 2), q(-2, 1), q(7, 5)];
        let lhs = (BigRational::one() - r.clone()) * x[i - 1].clone() * jackson_forward(&f, &r, i, &x).unwrap();
        let hi = dilatation_apply(&f, &r, i + 1, DilatationVariant::Plain).unwrap().eval(&x).unwrap();
        let lo = dilatation_apply(&f, &r, i, DilatationVariant::Plain).unwrap().eval(&x).unwrap();
        prop_assert_eq!(lhs, hi - lo);
    }
}
