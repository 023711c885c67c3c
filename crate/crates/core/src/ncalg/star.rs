//! The star involution on the two-dimensional dilatation algebra.
//!
//! `z* = z̄`, `A* = Atildebar`, `Abar* = Atilde`, extended as an antilinear
//! antihomomorphism. `r` is real and all coefficients are rational, so
//! coefficients are fixed.

use super::{build_dilatation, DilatationVariant, Generator, NCElement, NcError, RewriteSystem};
use crate::report::VerificationReport;

fn star_generator(g: &Generator) -> Result<Generator, NcError> {
    let out = match g {
        Generator::Coord(1) => Generator::Coord(2),
        Generator::Coord(2) => Generator::Coord(1),
        Generator::Abstract(l) => Generator::abs(match l.as_str() {
            "A" => "Atildebar",
            "Atildebar" => "A",
            "Abar" => "Atilde",
            "Atilde" => "Abar",
            _ => return Err(NcError::NotStarClosed(g.to_string())),
        }),
        _ => return Err(NcError::NotStarClosed(g.to_string())),
    };
    Ok(out)
}

/// Reverse every word and star each letter. Derivatives are refused: their
/// stars need coordinate inverses.
pub fn apply_star(e: &NCElement) -> Result<NCElement, NcError> {
    let mut out = NCElement::zero(e.universe());
    for (w, c) in e.terms() {
        let starred = w
            .iter()
            .rev()
            .map(star_generator)
            .collect::<Result<Vec<_>, _>>()?;
        out.add_term(starred, c.clone());
    }
    Ok(out)
}

/// Every defining relation of the dilatation plane, starred, must still
/// reduce to zero; and the derivative star rules, multiplied through by the
/// coordinate they divide by, must reproduce `A* = Atildebar` and
/// `Abar* = Atilde` inside the calculus.
pub fn verify_involution_consistency() -> Result<VerificationReport, NcError> {
    let plane = RewriteSystem::dilatation_plane()?;
    let mut report = VerificationReport::new("involution");

    let mut rules: Vec<_> = plane.rules().collect();
    rules.sort_by_key(|((a, b), _)| (a.to_string(), b.to_string()));
    for ((a, b), rhs) in rules {
        let rel = &plane.word(&[a.clone(), b.clone()]) - rhs;
        let id = format!("star({a}*{b} = {rhs})");
        report.push(match apply_star(&rel).and_then(|s| plane.normal_form(&s)) {
            Ok(res) => res.residual_entry(id, &[]),
            Err(e) => crate::report::Entry::error(id, &[], e.to_string()),
        });
    }

    for g in plane.alphabet() {
        let once = star_generator(g)?;
        report.push(crate::report::Entry::flag(
            format!("star(star({g}))"),
            &[],
            star_generator(&once)? == *g,
        ));
    }

    let [a, ab, at, atb] = ["A", "Abar", "Atilde", "Atildebar"].map(Generator::abs);
    let prod = plane.normal_form(&apply_star(&plane.word(&[a, ab]))?)?;
    let expected = plane.normal_form(&plane.word(&[at, atb]))?;
    report.push((&prod - &expected).residual_entry("star(A*Abar) = Atilde*Atildebar", &[]));

    // d* zbar = -dtbar zbar + (1/r - 1) z dt + 1 and dbar* z = -dt z + 1
    let calc = RewriteSystem::calculus(2)?;
    use Generator::{Coord as X, Tilde as T};
    let one = calc.one();
    let r_minus_one = calc.scalar(&calc.r() - &calc.poly("1"));
    let p1 = &(&-&calc.word(&[T(2), X(2)])
        + &NCElement::term(calc.poly("r^-1 - 1"), vec![X(1), T(1)]))
        + &one;
    let p2 = &-&calc.word(&[T(1), X(1)]) + &one;
    let a_star = &one + &(&r_minus_one * &(&p1 + &p2));
    let atb = build_dilatation(&calc, 2, DilatationVariant::Tilde)?;
    report.push(calc.relation_entry("A* = Atildebar (cleared)", &a_star, &atb));
    let ab_star = &one + &(&r_minus_one * &p2);
    let at = build_dilatation(&calc, 1, DilatationVariant::Tilde)?;
    report.push(calc.relation_entry("Abar* = Atilde (cleared)", &ab_star, &at));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_of_coordinates() {
        let plane = RewriteSystem::dilatation_plane().unwrap();
        let z = plane.gen(Generator::Coord(1));
        assert_eq!(apply_star(&z).unwrap(), plane.gen(Generator::Coord(2)));
        let w = plane.word(&[Generator::Coord(2), Generator::Coord(1)]);
        assert_eq!(apply_star(&apply_star(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn derivatives_are_not_star_closed() {
        let calc = RewriteSystem::calculus(2).unwrap();
        assert!(matches!(
            apply_star(&calc.gen(Generator::Deriv(1))),
            Err(NcError::NotStarClosed(_))
        ));
    }

    #[test]
    fn involution_consistent() {
        let rep = verify_involution_consistency().unwrap();
        assert!(rep.pass, "{:?}", rep.failures().next());
    }
}
