use std::sync::Arc;

use super::{CocycleAlgebra, CocycleElement};
use crate::report::VerificationReport;
use crate::scalars::DeformationParams;

/// Coordinates `x^i` tensored with a frame algebra, together with the
/// dressed coordinates `xt^i = E^i x^i` where `E^i` is the image of `e^i`.
pub(crate) struct Dressed {
    pub algebra: Arc<CocycleAlgebra>,
    pub x: Vec<CocycleElement>,
    pub xt: Vec<CocycleElement>,
}

/// `frame(i)` is the (0-based) image of `e^{i+1}` inside `frames`.
pub(crate) fn dress(
    params: &DeformationParams,
    frames: &Arc<CocycleAlgebra>,
    frame: impl Fn(&Arc<CocycleAlgebra>, usize) -> CocycleElement,
) -> Dressed {
    let coords = CocycleAlgebra::coordinates(params);
    let n = coords.len();
    let algebra = coords.tensor(frames);
    let x: Vec<_> = (0..n)
        .map(|i| CocycleElement::generator(&algebra, i, 1).unwrap())
        .collect();
    let xt = (0..n)
        .map(|i| &frame(frames, i).embed(&algebra, n) * &x[i])
        .collect();
    Dressed { algebra, x, xt }
}

/// Check that `xt^i = e^i x^i` obey the coordinate relations with twisted
/// parameters: `xt^i xt^j - (q_ij f_ij^2) xt^j xt^i = 0` for all `i < j`.
pub fn verify_twist_coordinates(params: &DeformationParams) -> VerificationReport {
    let n = params.n();
    let beins = CocycleAlgebra::bein(params);
    let d = dress(params, &beins, |alg, i| {
        CocycleElement::generator(alg, i, 1).unwrap()
    });
    let mut report = VerificationReport::new("twist_coordinates").with_config("n", n);
    for i in 0..n {
        for j in i + 1..n {
            let lhs = &d.xt[i] * &d.xt[j];
            let rhs = (&d.xt[j] * &d.xt[i]).scale(&params.twisted_q(i + 1, j + 1));
            let res = &lhs - &rhs;
            report.push(res.residual_entry(
                format!("xt{}*xt{}", i + 1, j + 1),
                &[i as i64 + 1, j as i64 + 1],
            ));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dimensions() {
        let r = verify_twist_coordinates(&DeformationParams::symbolic(2));
        assert!(r.pass);
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn identity_twist_reproduces_untwisted_relations() {
        let p = DeformationParams::symbolic(3).identity_twist();
        let beins = CocycleAlgebra::bein(&p);
        let d = dress(&p, &beins, |alg, i| {
            CocycleElement::generator(alg, i, 1).unwrap()
        });
        for i in 0..3 {
            for j in i + 1..3 {
                let a = &(&d.xt[i] * &d.xt[j]) - &(&d.xt[j] * &d.xt[i]).scale(&p.q(i + 1, j + 1));
                let b = &(&d.x[i] * &d.x[j]) - &(&d.x[j] * &d.x[i]).scale(&p.q(i + 1, j + 1));
                assert!(a.is_zero() && b.is_zero());
            }
        }
    }

    #[test]
    fn wrong_parameter_is_detected() {
        // using q instead of q f^2 must leave a residual
        let p = DeformationParams::symbolic(2);
        let beins = CocycleAlgebra::bein(&p);
        let d = dress(&p, &beins, |alg, i| {
            CocycleElement::generator(alg, i, 1).unwrap()
        });
        let res = &(&d.xt[0] * &d.xt[1]) - &(&d.xt[1] * &d.xt[0]).scale(&p.q(1, 2));
        assert!(!res.is_zero());
    }
}
