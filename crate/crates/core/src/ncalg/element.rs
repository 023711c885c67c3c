use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::NcError;
use crate::scalars::{LaurentPoly, Universe};

/// A letter of a word.
///
/// `Coord(i)` is `x^i`, `Deriv(i)` is `∂_i`, `Tilde(i)` is `∂̃_i`. In the
/// two-dimensional aliases `z = x^1` and `z̄ = x^2`. Abstract generators carry
/// a label, e.g. `A`, `Abar`, `Atilde`, `Atildebar`, `a`, `a*`, `Y11`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Coord(usize),
    Deriv(usize),
    Tilde(usize),
    Abstract(String),
}

impl Generator {
    pub fn abs(label: &str) -> Self {
        Generator::Abstract(label.to_string())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Coord(i) => write!(f, "x{i}"),
            Generator::Deriv(i) => write!(f, "d{i}"),
            Generator::Tilde(i) => write!(f, "dt{i}"),
            Generator::Abstract(s) => f.write_str(s),
        }
    }
}

impl FromStr for Generator {
    type Err = NcError;
    fn from_str(s: &str) -> Result<Self, NcError> {
        let index = |rest: &str| rest.parse::<usize>().ok().filter(|&i| i > 0);
        let parsed = if let Some(i) = s.strip_prefix("dt").and_then(index) {
            Generator::Tilde(i)
        } else if let Some(i) = s.strip_prefix('d').and_then(index) {
            Generator::Deriv(i)
        } else if let Some(i) = s.strip_prefix('x').and_then(index) {
            Generator::Coord(i)
        } else if !s.is_empty()
            && s.chars()
                .all(|c| c.is_alphanumeric() || c == '*' || c == '_')
        {
            Generator::Abstract(s.to_string())
        } else {
            return Err(NcError::Parse(s.to_string()));
        };
        Ok(parsed)
    }
}

impl Serialize for Generator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Generator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type Word = Vec<Generator>;

/// Finite sum of coefficient × word. Not reduced unless it came out of
/// [`RewriteSystem::normal_form`](super::RewriteSystem::normal_form).
#[derive(Clone, PartialEq, Eq)]
pub struct NCElement {
    universe: Arc<Universe>,
    terms: BTreeMap<Word, LaurentPoly>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    word: Word,
}

impl NCElement {
    pub fn zero(universe: &Arc<Universe>) -> Self {
        NCElement {
            universe: universe.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(c: LaurentPoly) -> Self {
        let mut e = NCElement::zero(c.universe());
        e.add_term(Vec::new(), c);
        e
    }

    pub fn one(universe: &Arc<Universe>) -> Self {
        NCElement::scalar(LaurentPoly::one(universe))
    }

    pub fn word(universe: &Arc<Universe>, word: &[Generator]) -> Self {
        NCElement::term(LaurentPoly::one(universe), word.to_vec())
    }

    pub fn term(coeff: LaurentPoly, word: Word) -> Self {
        let mut e = NCElement::zero(coeff.universe());
        e.add_term(word, coeff);
        e
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, word: &[Generator]) -> LaurentPoly {
        self.terms
            .get(word)
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(&self.universe))
    }

    /// `(coefficient, word)` when the element has exactly one term.
    pub fn as_monomial(&self) -> Option<(&LaurentPoly, &Word)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(w, c)| (c, w))
        } else {
            None
        }
    }

    pub(crate) fn add_term(&mut self, word: Word, coeff: LaurentPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(c) => {
                let sum = &*c + &coeff;
                if sum.is_zero() {
                    self.terms.remove(&word);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(word, coeff);
            }
        }
    }

    pub(crate) fn into_terms(self) -> BTreeMap<Word, LaurentPoly> {
        self.terms
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = NCElement::zero(&self.universe);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    /// Residual entry: passes iff the element is zero. Coefficients of all
    /// words are summed into one polynomial per word for display.
    pub fn residual_entry(&self, id: impl Into<String>, indices: &[i64]) -> crate::report::Entry {
        use crate::report::{Entry, Residual};
        let mut e = Entry::exact(id, indices, &LaurentPoly::zero(&self.universe));
        e.pass = self.is_zero();
        e.residual = Residual::Exact(self.to_string());
        e.residual_terms = self.terms.len();
        e
    }

    pub fn to_json(&self) -> String {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(w, c)| TermJson {
                coeff: c.to_string(),
                word: w.clone(),
            })
            .collect();
        serde_json::to_string(&terms).expect("serializable")
    }

    pub fn from_json(universe: &Arc<Universe>, text: &str) -> Result<Self, String> {
        let terms: Vec<TermJson> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut e = NCElement::zero(universe);
        for t in terms {
            let c = LaurentPoly::parse(universe, &t.coeff).map_err(|e| e.to_string())?;
            e.add_term(t.word, c);
        }
        Ok(e)
    }
}

impl fmt::Display for NCElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let word: Vec<String> = w.iter().map(|g| g.to_string()).collect();
            match (c.is_one(), w.is_empty()) {
                (_, true) => write!(f, "({c})")?,
                (true, false) => write!(f, "{}", word.join("*"))?,
                (false, false) => write!(f, "({c})*{}", word.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NCElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &NCElement {
    type Output = NCElement;
    fn add(self, rhs: &NCElement) -> NCElement {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NCElement {
    type Output = NCElement;
    fn sub(self, rhs: &NCElement) -> NCElement {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Neg for &NCElement {
    type Output = NCElement;
    fn neg(self) -> NCElement {
        NCElement::zero(&self.universe) - self.clone()
    }
}

/// Concatenation product; no reduction.
impl Mul for &NCElement {
    type Output = NCElement;
    fn mul(self, rhs: &NCElement) -> NCElement {
        let mut out = NCElement::zero(&self.universe);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let mut w = a.clone();
                w.extend(b.iter().cloned());
                out.add_term(w, x * y);
            }
        }
        out
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for NCElement {
            type Output = NCElement;
            fn $m(self, rhs: NCElement) -> NCElement {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
