//! Exact action on monomials through the finite-difference realization.
//!
//! On `x^a` every word acts as `c(r, u) x^(a + shift)` with `u_i = r^(a_i)`.
//! The forward difference in direction `i` contributes
//! `[a_i; r] r^(a_(i+1) + ... + a_N)`, the backward one
//! `r^-(a_1 + ... + a_(i-1)) [a_i; 1/r]`; each divides by `1 - r`, so the
//! symbol of an element is stored with that denominator cleared. Since the
//! points `u = r^a` are Zariski-dense, the symbol vanishes iff the operator
//! annihilates every monomial.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use super::{Generator, NCElement, NcError};
use crate::scalars::{LaurentPoly, Universe};

/// Cleared symbol: `sum_shift terms[shift] x^(a+shift) / (1-r)^denominator_power`,
/// coefficients in `r, u1, ..., uN`.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub universe: Arc<Universe>,
    pub denominator_power: u32,
    pub terms: BTreeMap<Vec<i32>, LaurentPoly>,
}

impl Symbol {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// All coefficients flattened into one display string.
    pub fn residual_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(s, c)| format!("{s:?}: {c}"))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

struct Monomials {
    universe: Arc<Universe>,
    n: usize,
}

impl Monomials {
    /// `prod_{j in range} (u_j r^(s_j))^sign`
    fn weight(&self, s: &[i32], range: impl Iterator<Item = usize>, sign: i32) -> LaurentPoly {
        let mut exps = vec![0; self.n + 1];
        for j in range {
            exps[0] += sign * s[j - 1];
            exps[j] += sign;
        }
        LaurentPoly::monomial(&self.universe, BigRational::one(), &exps)
    }

    fn one(&self) -> LaurentPoly {
        LaurentPoly::one(&self.universe)
    }

    fn r(&self) -> LaurentPoly {
        let mut e = vec![0; self.n + 1];
        e[0] = 1;
        LaurentPoly::monomial(&self.universe, BigRational::one(), &e)
    }
}

fn dilatation_range(label: &str, n: usize) -> Option<(usize, usize, i32)> {
    if n != 2 {
        return None;
    }
    match label {
        "A" => Some((1, 2, 1)),
        "Abar" => Some((2, 2, 1)),
        "Atilde" => Some((1, 1, -1)),
        "Atildebar" => Some((1, 2, -1)),
        _ => None,
    }
}

/// Realize a word right to left on a symbolic monomial.
fn word_symbol(m: &Monomials, w: &[Generator]) -> Result<(Vec<i32>, LaurentPoly, u32), NcError> {
    let n = m.n;
    let mut s = vec![0i32; n];
    let mut c = m.one();
    let mut d = 0;
    let check = |i: usize| {
        if i == 0 || i > n {
            Err(NcError::IndexOutOfRange { index: i, n })
        } else {
            Ok(i)
        }
    };
    for g in w.iter().rev() {
        match g {
            Generator::Coord(i) => s[check(*i)? - 1] += 1,
            Generator::Deriv(i) => {
                let i = check(*i)?;
                let bracket = &m.one() - &m.weight(&s, i..=i, 1);
                c = &(&c * &bracket) * &m.weight(&s, i + 1..=n, 1);
                s[i - 1] -= 1;
                d += 1;
            }
            Generator::Tilde(i) => {
                let i = check(*i)?;
                let bracket = &m.one() - &m.weight(&s, i..=i, -1);
                c = &(&c * &(-&(&m.r() * &bracket))) * &m.weight(&s, 1..i, -1);
                s[i - 1] -= 1;
                d += 1;
            }
            Generator::Abstract(label) => {
                let (lo, hi, sign) = dilatation_range(label, n)
                    .ok_or_else(|| NcError::NotRealizable(label.clone()))?;
                c = &c * &m.weight(&s, lo..=hi, sign);
            }
        }
    }
    Ok((s, c, d))
}

/// Symbol of `e` acting on `N` variables.
pub fn realization_symbol(e: &NCElement, n: usize) -> Result<Symbol, NcError> {
    let mut names = vec!["r".to_string()];
    names.extend((1..=n).map(|i| format!("u{i}")));
    let universe = Universe::new(names);
    let m = Monomials {
        universe: universe.clone(),
        n,
    };
    let words = e
        .terms()
        .map(|(w, c)| {
            let (s, sym, d) = word_symbol(&m, w)?;
            let c = c
                .embed(&universe)
                .map_err(|err| NcError::NotRealizable(err.to_string()))?;
            Ok((s, &c * &sym, d))
        })
        .collect::<Result<Vec<_>, NcError>>()?;
    let top = words.iter().map(|w| w.2).max().unwrap_or(0);
    let one_minus_r = &m.one() - &m.r();
    let mut terms: BTreeMap<Vec<i32>, LaurentPoly> = BTreeMap::new();
    for (s, c, d) in words {
        let c = &c
            * &one_minus_r
                .pow((top - d) as i32)
                .expect("non-negative power");
        let slot = terms
            .entry(s)
            .or_insert_with(|| LaurentPoly::zero(&universe));
        *slot = &*slot + &c;
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(Symbol {
        universe,
        denominator_power: top,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::RewriteSystem;
    use Generator::{Deriv as D, Tilde as T};

    #[test]
    fn rewrite_rules_hold_in_realization() {
        let sys = RewriteSystem::calculus(2).unwrap();
        for ((a, b), rhs) in sys.rules() {
            let lhs = sys.word(&[a.clone(), b.clone()]);
            let sym = realization_symbol(&(&lhs - rhs), 2).unwrap();
            assert!(sym.is_zero(), "{a} {b}: {}", sym.residual_string());
        }
    }

    #[test]
    fn forward_derivative_on_monomials() {
        // d1 acting alone: [a1; r] r^(a2) x^(a - e1), times (1-r)
        let sys = RewriteSystem::calculus(2).unwrap();
        let sym = realization_symbol(&sys.gen(D(1)), 2).unwrap();
        assert_eq!(sym.denominator_power, 1);
        assert_eq!(sym.terms[&vec![-1, 0]].to_string(), "u2 - u1*u2");
    }

    #[test]
    fn misprinted_mixed_rule_fails() {
        let sys = RewriteSystem::calculus(2).unwrap();
        let r2 = sys.poly("r^2");
        let bad = &sys.word(&[T(2), D(1)]) - &NCElement::term(r2, vec![D(2), T(2)]);
        assert!(!realization_symbol(&bad, 2).unwrap().is_zero());
    }
}
