use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use super::element::Word;
use super::{Generator, NCElement, NcError};
use crate::report::{Entry, VerificationReport};
use crate::scalars::{LaurentPoly, Universe};

const STEP_LIMIT: usize = 5_000_000;

/// Ordered alphabet plus one rule per reducible adjacent pair.
///
/// A pair is reducible iff it has a rule; rules may also fire on pairs that
/// are already in alphabet order (e.g. `A Atildebar -> 1`). An out-of-order
/// pair without a rule is an error, never silently left in place.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    name: String,
    n: usize,
    universe: Arc<Universe>,
    alphabet: Vec<Generator>,
    rank: HashMap<Generator, usize>,
    rules: HashMap<(Generator, Generator), NCElement>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DilatationVariant {
    /// `A_i = 1 + (r-1) sum_{j>=i} x^j d_j`, `i = 1..=N+1`.
    Plain,
    /// `Ã_i = 1 + (1/r-1) sum_{j<=i} x^j dt_j`, `i = 0..=N`.
    Tilde,
}

fn r_universe() -> Arc<Universe> {
    Universe::new(["r"])
}

impl RewriteSystem {
    /// Validates every rule against the measure (inversions, length).
    pub fn new(
        name: impl Into<String>,
        n: usize,
        universe: Arc<Universe>,
        alphabet: Vec<Generator>,
        rules: Vec<((Generator, Generator), NCElement)>,
    ) -> Result<Self, NcError> {
        let rank: HashMap<_, _> = alphabet
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        let mut sys = RewriteSystem {
            name: name.into(),
            n,
            universe,
            alphabet,
            rank,
            rules: HashMap::new(),
        };
        for ((a, b), rhs) in rules {
            let lhs = vec![a.clone(), b.clone()];
            let bound = (sys.inversions(&lhs)?, 2);
            for (w, _) in rhs.terms() {
                if (sys.inversions(w)?, w.len()) >= bound {
                    return Err(NcError::NonDecreasingRule(format!("{a} {b} -> {rhs}")));
                }
            }
            sys.rules.insert((a, b), rhs);
        }
        Ok(sys)
    }

    /// Coordinates, derivatives and tilde derivatives in `N` variables.
    ///
    /// Mixed derivative/tilde-derivative rules exist only for `N = 2`; for
    /// larger `N` such pairs raise [`NcError::MissingRule`].
    pub fn calculus(n: usize) -> Result<Self, NcError> {
        use Generator::{Coord as X, Deriv as D, Tilde as T};
        let u = r_universe();
        let r = LaurentPoly::named(&u, "r").expect("r");
        let ri = r.inverse_monomial().expect("monomial");
        let one = LaurentPoly::one(&u);
        let t = |c: &LaurentPoly, w: &[Generator]| NCElement::term(c.clone(), w.to_vec());
        let mut alphabet: Vec<Generator> = (1..=n).map(X).collect();
        alphabet.extend((1..=n).map(D));
        alphabet.extend((1..=n).map(T));
        let mut rules = Vec::new();
        for i in 1..=n {
            for k in i + 1..=n {
                rules.push(((X(k), X(i)), t(&one, &[X(i), X(k)])));
                rules.push(((D(i), X(k)), t(&r, &[X(k), D(i)])));
                rules.push(((D(k), X(i)), t(&one, &[X(i), D(k)])));
                rules.push(((D(k), D(i)), t(&r, &[D(i), D(k)])));
                rules.push(((T(i), X(k)), t(&one, &[X(k), T(i)])));
                rules.push(((T(k), X(i)), t(&ri, &[X(i), T(k)])));
                rules.push(((T(k), T(i)), t(&r, &[T(i), T(k)])));
            }
            let mut plain = &NCElement::one(&u) + &t(&r, &[X(i), D(i)]);
            for l in i + 1..=n {
                plain = &plain + &t(&(&r - &one), &[X(l), D(l)]);
            }
            rules.push(((D(i), X(i)), plain));
            let mut tilde = &NCElement::one(&u) + &t(&ri, &[X(i), T(i)]);
            for l in 1..i {
                tilde = &tilde + &t(&(&ri - &one), &[X(l), T(l)]);
            }
            rules.push(((T(i), X(i)), tilde));
        }
        if n == 2 {
            let r2 = &r * &r;
            rules.push(((T(1), D(1)), t(&r, &[D(1), T(1)])));
            rules.push(((T(2), D(2)), t(&r, &[D(2), T(2)])));
            rules.push(((T(1), D(2)), t(&one, &[D(2), T(1)])));
            rules.push(((T(2), D(1)), t(&r2, &[D(1), T(2)])));
        }
        RewriteSystem::new(format!("calculus(N={n})"), n, u, alphabet, rules)
    }

    /// Coordinates `z = x1`, `z̄ = x2` and the four dilatations as abstract
    /// generators `A`, `Abar`, `Atilde`, `Atildebar`, with their coordinate
    /// relations, mutual commutativity and the three product relations
    /// `Atilde A = Abar`, `Atildebar A = 1`, `Atildebar Abar = Atilde`.
    /// `Abar` is ranked last so that the products stay confluent.
    pub fn dilatation_plane() -> Result<Self, NcError> {
        let u = r_universe();
        let r = LaurentPoly::named(&u, "r").expect("r");
        let ri = r.inverse_monomial().expect("monomial");
        let one = LaurentPoly::one(&u);
        let (z, zb) = (Generator::Coord(1), Generator::Coord(2));
        let [a, ab, at, atb] = ["A", "Abar", "Atilde", "Atildebar"].map(Generator::abs);
        let t = |c: &LaurentPoly, w: &[&Generator]| {
            NCElement::term(c.clone(), w.iter().map(|g| (*g).clone()).collect())
        };
        let rule = |l: &Generator, rr: &Generator, e: NCElement| ((l.clone(), rr.clone()), e);
        let rules = vec![
            rule(&zb, &z, t(&one, &[&z, &zb])),
            rule(&a, &z, t(&r, &[&z, &a])),
            rule(&a, &zb, t(&r, &[&zb, &a])),
            rule(&ab, &z, t(&one, &[&z, &ab])),
            rule(&ab, &zb, t(&r, &[&zb, &ab])),
            rule(&at, &z, t(&ri, &[&z, &at])),
            rule(&at, &zb, t(&one, &[&zb, &at])),
            rule(&atb, &z, t(&ri, &[&z, &atb])),
            rule(&atb, &zb, t(&ri, &[&zb, &atb])),
            rule(&ab, &a, t(&one, &[&a, &ab])),
            rule(&ab, &at, t(&one, &[&at, &ab])),
            rule(&atb, &at, t(&one, &[&at, &atb])),
            rule(&at, &a, t(&one, &[&ab])),
            rule(&a, &at, t(&one, &[&ab])),
            rule(&atb, &a, NCElement::one(&u)),
            rule(&a, &atb, NCElement::one(&u)),
            rule(&atb, &ab, t(&one, &[&at])),
            rule(&ab, &atb, t(&one, &[&at])),
        ];
        RewriteSystem::new(
            "dilatation_plane",
            2,
            u,
            vec![z.clone(), zb.clone(), a, at, atb, ab],
            rules,
        )
    }

    /// The diagonal subgroup generators `a`, `a*` with `Y11`, `Y22`.
    ///
    /// `Y11` and `Y22` are taken to commute.
    pub fn subgroup() -> Result<Self, NcError> {
        let u = r_universe();
        let r = LaurentPoly::named(&u, "r").expect("r");
        let one = LaurentPoly::one(&u);
        let [a, s, y1, y2] = ["a", "a*", "Y11", "Y22"].map(Generator::abs);
        let t = |c: &LaurentPoly, w: &[&Generator]| {
            NCElement::term(c.clone(), w.iter().map(|g| (*g).clone()).collect())
        };
        let rules = vec![
            ((s.clone(), a.clone()), t(&one, &[&a, &s])),
            ((y1.clone(), a.clone()), t(&r, &[&a, &y1])),
            ((y1.clone(), s.clone()), t(&one, &[&s, &y1])),
            ((y2.clone(), a.clone()), t(&one, &[&a, &y2])),
            ((y2.clone(), s.clone()), t(&r, &[&s, &y2])),
            ((y2.clone(), y1.clone()), t(&one, &[&y1, &y2])),
        ];
        RewriteSystem::new("subgroup", 2, u, vec![a, s, y1, y2], rules)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn alphabet(&self) -> &[Generator] {
        &self.alphabet
    }

    pub fn rules(&self) -> impl Iterator<Item = (&(Generator, Generator), &NCElement)> {
        self.rules.iter()
    }

    pub fn r(&self) -> LaurentPoly {
        LaurentPoly::named(&self.universe, "r").expect("r")
    }

    pub fn r_inv(&self) -> LaurentPoly {
        self.r().inverse_monomial().expect("monomial")
    }

    pub fn one(&self) -> NCElement {
        NCElement::one(&self.universe)
    }

    pub fn scalar(&self, c: LaurentPoly) -> NCElement {
        NCElement::scalar(c)
    }

    pub fn gen(&self, g: Generator) -> NCElement {
        NCElement::word(&self.universe, &[g])
    }

    pub fn word(&self, w: &[Generator]) -> NCElement {
        NCElement::word(&self.universe, w)
    }

    pub fn poly(&self, text: &str) -> LaurentPoly {
        LaurentPoly::parse(&self.universe, text).expect("valid polynomial")
    }

    fn rank_of(&self, g: &Generator) -> Result<usize, NcError> {
        self.rank
            .get(g)
            .copied()
            .ok_or_else(|| NcError::UnknownGenerator(g.to_string()))
    }

    pub fn inversions(&self, w: &[Generator]) -> Result<usize, NcError> {
        let ranks = w
            .iter()
            .map(|g| self.rank_of(g))
            .collect::<Result<Vec<_>, _>>()?;
        let mut count = 0;
        for p in 0..ranks.len() {
            for q in p + 1..ranks.len() {
                if ranks[p] > ranks[q] {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// Position of the leftmost reducible pair.
    fn first_redex(&self, w: &[Generator]) -> Result<Option<usize>, NcError> {
        if let Some(g) = w.iter().find(|g| !self.rank.contains_key(*g)) {
            return Err(NcError::UnknownGenerator(g.to_string()));
        }
        for p in 0..w.len().saturating_sub(1) {
            let key = (w[p].clone(), w[p + 1].clone());
            if self.rules.contains_key(&key) {
                return Ok(Some(p));
            }
            if self.rank[&w[p]] > self.rank[&w[p + 1]] {
                return Err(NcError::MissingRule(w[p].to_string(), w[p + 1].to_string()));
            }
        }
        Ok(None)
    }

    pub fn is_normal(&self, w: &[Generator]) -> Result<bool, NcError> {
        Ok(self.first_redex(w)?.is_none())
    }

    /// Apply the rule at `pos` of `w` once.
    pub(crate) fn rewrite_at(&self, w: &[Generator], pos: usize) -> Option<NCElement> {
        let rhs = self
            .rules
            .get(&(w.get(pos)?.clone(), w.get(pos + 1)?.clone()))?;
        let mut out = NCElement::zero(&self.universe);
        for (rw, rc) in rhs.terms() {
            let mut nw: Word = w[..pos].to_vec();
            nw.extend(rw.iter().cloned());
            nw.extend(w[pos + 2..].iter().cloned());
            out.add_term(nw, rc.clone());
        }
        Some(out)
    }

    /// Leftmost rewriting to a fixed point.
    pub fn normal_form(&self, e: &NCElement) -> Result<NCElement, NcError> {
        let mut pending: BTreeMap<Word, LaurentPoly> = e.clone().into_terms();
        let mut done = NCElement::zero(&self.universe);
        let mut steps = 0;
        while let Some((w, c)) = pending.pop_first() {
            steps += 1;
            if steps > STEP_LIMIT {
                return Err(NcError::StepLimit(STEP_LIMIT));
            }
            match self.first_redex(&w)? {
                None => done.add_term(w, c),
                Some(pos) => {
                    let next = self.rewrite_at(&w, pos).expect("redex has a rule");
                    for (nw, nc) in next.into_terms() {
                        let v = &nc * &c;
                        match pending.get_mut(&nw) {
                            Some(old) => {
                                let s = &*old + &v;
                                if s.is_zero() {
                                    pending.remove(&nw);
                                } else {
                                    *old = s;
                                }
                            }
                            None => {
                                if !v.is_zero() {
                                    pending.insert(nw, v);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(done)
    }

    /// `normal_form(ab - ba)`.
    pub fn commutator(&self, a: &NCElement, b: &NCElement) -> Result<NCElement, NcError> {
        self.normal_form(&(&(a * b) - &(b * a)))
    }

    /// `normal_form(lhs - rhs)` as a report entry; errors become failing entries.
    pub fn relation_entry(&self, id: &str, lhs: &NCElement, rhs: &NCElement) -> Entry {
        match self.normal_form(&(lhs - rhs)) {
            Ok(res) => res.residual_entry(id, &[]),
            Err(e) => Entry::error(id, &[], e.to_string()),
        }
    }

    /// Difference of the two one-step reductions of `w = g1 g2 g3`, each
    /// normal-formed. Zero iff the overlap is joinable; otherwise it is a
    /// relation implied by the rules but not reachable by rewriting.
    pub fn overlap_residual(&self, w: &[Generator; 3]) -> Result<NCElement, NcError> {
        let left = self
            .rewrite_at(w, 0)
            .ok_or_else(|| NcError::MissingRule(w[0].to_string(), w[1].to_string()))?;
        let right = self
            .rewrite_at(w, 1)
            .ok_or_else(|| NcError::MissingRule(w[1].to_string(), w[2].to_string()))?;
        Ok(&self.normal_form(&left)? - &self.normal_form(&right)?)
    }

    /// Both one-step reductions of every overlap `g1 g2 g3` (with rules on
    /// `g1 g2` and `g2 g3`) must reach the same normal form.
    pub fn local_confluence(&self) -> VerificationReport {
        let mut triples = Vec::new();
        for a in &self.alphabet {
            for b in &self.alphabet {
                if !self.rules.contains_key(&(a.clone(), b.clone())) {
                    continue;
                }
                for c in &self.alphabet {
                    if self.rules.contains_key(&(b.clone(), c.clone())) {
                        triples.push([a.clone(), b.clone(), c.clone()]);
                    }
                }
            }
        }
        let entries: Vec<Entry> = triples
            .par_iter()
            .map(|w| {
                let id = format!("{}*{}*{}", w[0], w[1], w[2]);
                match self.overlap_residual(w) {
                    Ok(res) => res.residual_entry(id, &[]),
                    Err(e) => Entry::error(id, &[], e.to_string()),
                }
            })
            .collect();
        let mut report = VerificationReport::new("local_confluence")
            .with_config("system", &self.name)
            .with_config("overlaps", triples.len());
        report.extend(entries);
        report
    }
}

/// `A_i` or `Ã_i` as an element of the calculus system.
///
/// `A_{N+1}` and `Ã_0` are the identity.
pub fn build_dilatation(
    sys: &RewriteSystem,
    i: usize,
    variant: DilatationVariant,
) -> Result<NCElement, NcError> {
    let n = sys.n();
    let one = LaurentPoly::one(sys.universe());
    let mut e = sys.one();
    match variant {
        DilatationVariant::Plain => {
            if i == 0 || i > n + 1 {
                return Err(NcError::IndexOutOfRange { index: i, n });
            }
            let c = &sys.r() - &one;
            for j in i..=n {
                e = &e
                    + &NCElement::term(c.clone(), vec![Generator::Coord(j), Generator::Deriv(j)]);
            }
        }
        DilatationVariant::Tilde => {
            if i > n {
                return Err(NcError::IndexOutOfRange { index: i, n });
            }
            let c = &sys.r_inv() - &one;
            for j in 1..=i {
                e = &e
                    + &NCElement::term(c.clone(), vec![Generator::Coord(j), Generator::Tilde(j)]);
            }
        }
    }
    sys.normal_form(&e)
}
