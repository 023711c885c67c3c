//! Exact coefficient arithmetic.
//!
//! Multivariate Laurent polynomials with rational coefficients over a fixed,
//! named set of indeterminates (`r`, `q_ij`, `f_ij`, ...). Every symbolic
//! identity in the crate is checked by reducing a difference of these to the
//! literal zero polynomial.

mod params;
mod rational;
mod text;

pub use params::DeformationParams;
pub use rational::{parse_rational, rational_sqrt};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("indeterminate `{0}` is bound to a non-monomial but appears with a negative exponent")]
    NonInvertibleBinding(String),
    #[error("division by zero: `{0}` evaluates to zero under a negative power")]
    DivisionByZero(String),
    #[error("indeterminate `{0}` has no value in the evaluation point")]
    UnboundIndeterminate(String),
    #[error("unknown indeterminate `{0}`")]
    UnknownIndeterminate(String),
    #[error("cannot parse polynomial text `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error("`{0}` is not an invertible monomial")]
    NotMonomial(String),
    #[error("invalid deformation parameter: {0}")]
    InvalidParameter(String),
    #[error("r^{0} needs a square root of r, which this parameter set does not carry")]
    HalfIntegerPower(String),
}

/// Ordered, named set of indeterminates shared by a family of polynomials.
#[derive(Debug, Clone)]
pub struct Universe {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Universe {}

/// Handle to one indeterminate of a [`Universe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub usize);

impl Universe {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect::<HashMap<_, _>>();
        assert_eq!(index.len(), names.len(), "duplicate indeterminate names");
        Arc::new(Universe { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn var(&self, name: &str) -> Result<Var, ScalarError> {
        self.index
            .get(name)
            .map(|&i| Var(i))
            .ok_or_else(|| ScalarError::UnknownIndeterminate(name.to_string()))
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

type Exponents = Box<[i32]>;

/// A Laurent polynomial with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by exponent vector with no zero
/// coefficients, so structural equality is mathematical equality.
#[derive(Clone)]
pub struct LaurentPoly {
    universe: Arc<Universe>,
    terms: BTreeMap<Exponents, BigRational>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        same_universe(&self.universe, &other.universe) && self.terms == other.terms
    }
}

impl Eq for LaurentPoly {}

fn same_universe(a: &Arc<Universe>, b: &Arc<Universe>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl LaurentPoly {
    pub fn zero(universe: &Arc<Universe>) -> Self {
        LaurentPoly {
            universe: universe.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(universe: &Arc<Universe>) -> Self {
        Self::constant(universe, BigRational::one())
    }

    pub fn constant(universe: &Arc<Universe>, c: BigRational) -> Self {
        let mut p = Self::zero(universe);
        if !c.is_zero() {
            p.terms
                .insert(vec![0; universe.len()].into_boxed_slice(), c);
        }
        p
    }

    pub fn integer(universe: &Arc<Universe>, c: i64) -> Self {
        Self::constant(universe, BigRational::from_integer(BigInt::from(c)))
    }

    /// `coeff * prod_k var_k^exps[k]`.
    pub fn monomial(universe: &Arc<Universe>, coeff: BigRational, exps: &[i32]) -> Self {
        assert_eq!(exps.len(), universe.len(), "exponent vector length");
        let mut p = Self::zero(universe);
        if !coeff.is_zero() {
            p.terms.insert(exps.to_vec().into_boxed_slice(), coeff);
        }
        p
    }

    pub fn var(universe: &Arc<Universe>, v: Var) -> Self {
        Self::var_pow(universe, v, 1)
    }

    pub fn var_pow(universe: &Arc<Universe>, v: Var, k: i32) -> Self {
        let mut exps = vec![0; universe.len()];
        exps[v.0] = k;
        Self::monomial(universe, BigRational::one(), &exps)
    }

    pub fn named(universe: &Arc<Universe>, name: &str) -> Result<Self, ScalarError> {
        Ok(Self::var(universe, universe.var(name)?))
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (&e[..], c))
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// The single `(exponents, coefficient)` pair of a monomial.
    pub fn as_monomial(&self) -> Option<(&[i32], &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (&e[..], c))
        } else {
            None
        }
    }

    /// Largest absolute exponent over all terms and indeterminates.
    pub fn max_abs_degree(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|k| k.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.universe);
        }
        LaurentPoly {
            universe: self.universe.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn inverse_monomial(&self) -> Option<Self> {
        let (e, c) = self.as_monomial()?;
        let exps: Vec<i32> = e.iter().map(|k| -k).collect();
        Some(Self::monomial(&self.universe, c.recip(), &exps))
    }

    /// Integer power; negative powers exist only for monomials.
    pub fn pow(&self, k: i32) -> Option<Self> {
        if k < 0 {
            return self.inverse_monomial()?.pow(-k);
        }
        let mut result = Self::one(&self.universe);
        let mut base = self.clone();
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Some(result)
    }

    fn check_universe(&self, other: &Self) {
        assert!(
            same_universe(&self.universe, &other.universe),
            "Laurent polynomials from different indeterminate universes"
        );
    }

    fn add_term(terms: &mut BTreeMap<Exponents, BigRational>, e: Exponents, c: BigRational) {
        use std::collections::btree_map::Entry;
        match terms.entry(e) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_impl(&self, other: &Self, sign: bool) -> Self {
        self.check_universe(other);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let c = if sign { c.clone() } else { -c };
            Self::add_term(&mut terms, e.clone(), c);
        }
        LaurentPoly {
            universe: self.universe.clone(),
            terms,
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check_universe(other);
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                Self::add_term(&mut terms, e, ca * cb);
            }
        }
        LaurentPoly {
            universe: self.universe.clone(),
            terms,
        }
    }

    /// Apply the substitution homomorphism `var -> binding`.
    ///
    /// A variable that occurs with a negative exponent must be bound to a
    /// monomial, since only monomials are invertible here.
    pub fn substitute(&self, bindings: &BTreeMap<Var, LaurentPoly>) -> Result<Self, ScalarError> {
        for b in bindings.values() {
            self.check_universe(b);
        }
        let mut out = Self::zero(&self.universe);
        let mut pow_cache: HashMap<(Var, i32), LaurentPoly> = HashMap::new();
        for (e, c) in &self.terms {
            let mut free = vec![0; e.len()];
            let mut term = Self::one(&self.universe);
            for (k, &exp) in e.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                let v = Var(k);
                match bindings.get(&v) {
                    None => free[k] = exp,
                    Some(b) => {
                        let p = match pow_cache.get(&(v, exp)) {
                            Some(p) => p.clone(),
                            None => {
                                let p = b.pow(exp).ok_or_else(|| {
                                    ScalarError::NonInvertibleBinding(
                                        self.universe.name(v).to_string(),
                                    )
                                })?;
                                pow_cache.insert((v, exp), p.clone());
                                p
                            }
                        };
                        term = &term * &p;
                    }
                }
            }
            let free = Self::monomial(&self.universe, c.clone(), &free);
            out = &out + &(&term * &free);
        }
        Ok(out)
    }

    /// Evaluate at a point. Exact for rational inputs.
    pub fn eval<T: EvalField>(&self, point: &BTreeMap<Var, T>) -> Result<T, ScalarError> {
        let mut total = T::field_zero();
        for (e, c) in &self.terms {
            let mut term = T::from_rational(c);
            for (k, &exp) in e.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                let name = || self.universe.name(Var(k)).to_string();
                let x = point
                    .get(&Var(k))
                    .ok_or_else(|| ScalarError::UnboundIndeterminate(name()))?;
                if exp < 0 && x.field_is_zero() {
                    return Err(ScalarError::DivisionByZero(name()));
                }
                let base = if exp < 0 { x.field_inv() } else { x.clone() };
                for _ in 0..exp.unsigned_abs() {
                    term = term.field_mul(&base);
                }
            }
            total = total.field_add(&term);
        }
        Ok(total)
    }

    /// Evaluate with values given by indeterminate name.
    pub fn eval_named<T: EvalField>(&self, point: &[(&str, T)]) -> Result<T, ScalarError> {
        let mut map = BTreeMap::new();
        for (name, v) in point {
            map.insert(self.universe.var(name)?, v.clone());
        }
        self.eval(&map)
    }

    /// Rewrite into another universe that contains every indeterminate used here.
    pub fn embed(&self, target: &Arc<Universe>) -> Result<Self, ScalarError> {
        let map: Vec<usize> = self
            .universe
            .names()
            .iter()
            .map(|n| target.var(n).map(|v| v.0))
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut exps = vec![0; target.len()];
            for (k, &x) in e.iter().enumerate() {
                exps[map[k]] += x;
            }
            Self::add_term(&mut out.terms, exps.into_boxed_slice(), c.clone());
        }
        Ok(out)
    }
}

/// Minimal field interface used by [`LaurentPoly::eval`].
pub trait EvalField: Clone {
    fn field_zero() -> Self;
    fn from_rational(c: &BigRational) -> Self;
    fn field_is_zero(&self) -> bool;
    fn field_add(&self, other: &Self) -> Self;
    fn field_mul(&self, other: &Self) -> Self;
    fn field_inv(&self) -> Self;
}

impl EvalField for BigRational {
    fn field_zero() -> Self {
        Zero::zero()
    }
    fn from_rational(c: &BigRational) -> Self {
        c.clone()
    }
    fn field_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn field_add(&self, other: &Self) -> Self {
        self + other
    }
    fn field_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn field_inv(&self) -> Self {
        self.recip()
    }
}

impl EvalField for f64 {
    fn field_zero() -> Self {
        0.0
    }
    fn from_rational(c: &BigRational) -> Self {
        c.to_f64().unwrap_or(f64::NAN)
    }
    fn field_is_zero(&self) -> bool {
        *self == 0.0
    }
    fn field_add(&self, other: &Self) -> Self {
        self + other
    }
    fn field_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn field_inv(&self) -> Self {
        1.0 / self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a LaurentPoly> for &'a LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &'a LaurentPoly) -> LaurentPoly {
                let f: fn(&LaurentPoly, &LaurentPoly) -> LaurentPoly = $body;
                f(self, rhs)
            }
        }
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &'a LaurentPoly) -> LaurentPoly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b, true));
forward_binop!(Sub, sub, |a, b| a.add_impl(b, false));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            universe: self.universe.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni() -> Arc<Universe> {
        Universe::new(["r", "q_12", "f_12"])
    }

    fn p(u: &Arc<Universe>, s: &str) -> LaurentPoly {
        LaurentPoly::parse(u, s).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn difference_of_squares() {
        let u = uni();
        assert_eq!(p(&u, "1 - r") * p(&u, "1 + r"), p(&u, "1 - r^2"));
    }

    #[test]
    fn antisymmetric_parameter_cancels() {
        let u = uni();
        assert!((p(&u, "q_12") * p(&u, "q_12^-1")).is_one());
        assert_eq!(p(&u, "1") + (p(&u, "r") - p(&u, "1")), p(&u, "r"));
    }

    #[test]
    fn twisted_parameter_by_substitution() {
        let u = uni();
        let q12 = u.var("q_12").unwrap();
        let f12 = u.var("f_12").unwrap();
        let mut b = BTreeMap::new();
        b.insert(q12, p(&u, "q_12*f_12^2"));
        assert_eq!(
            p(&u, "q_12^-1").substitute(&b).unwrap(),
            p(&u, "q_12^-1*f_12^-2")
        );

        let mut b = BTreeMap::new();
        b.insert(f12, LaurentPoly::one(&u));
        assert_eq!(p(&u, "r").substitute(&b).unwrap(), p(&u, "r"));

        let mut b = BTreeMap::new();
        b.insert(q12, p(&u, "f_12^2"));
        assert_eq!(
            p(&u, "q_12*r^-1").substitute(&b).unwrap(),
            p(&u, "f_12^2*r^-1")
        );
    }

    #[test]
    fn substitution_rejects_non_invertible_binding() {
        let u = uni();
        let mut b = BTreeMap::new();
        b.insert(u.var("r").unwrap(), p(&u, "1 + q_12"));
        assert!(matches!(
            p(&u, "r^-1").substitute(&b),
            Err(ScalarError::NonInvertibleBinding(_))
        ));
        // positive powers of a sum are fine
        assert_eq!(
            p(&u, "r^2").substitute(&b).unwrap(),
            p(&u, "1 + 2*q_12 + q_12^2")
        );
    }

    #[test]
    fn evaluation() {
        let u = uni();
        let v = p(&u, "1 - r^2").eval_named(&[("r", q(1, 2))]).unwrap();
        assert_eq!(v, q(3, 4));
        assert_eq!(
            p(&u, "r^-1").eval_named(&[("r", q(0, 1))]),
            Err(ScalarError::DivisionByZero("r".into()))
        );
        assert_eq!(
            p(&u, "r*q_12").eval_named(&[("r", q(1, 2))]),
            Err(ScalarError::UnboundIndeterminate("q_12".into()))
        );
        // (1 - r^3) / (1 - r) in cleared form
        let v = p(&u, "1 + r + r^2").eval_named(&[("r", q(1, 2))]).unwrap();
        assert_eq!(v, q(7, 4));
        let f = p(&u, "1 + r + r^2").eval_named(&[("r", 0.5f64)]).unwrap();
        assert_eq!(f, 1.75);
    }

    #[test]
    fn negative_powers_need_monomials() {
        let u = uni();
        assert!(p(&u, "1 + r").pow(-1).is_none());
        assert_eq!(p(&u, "2*r").pow(-2).unwrap(), p(&u, "1/4*r^-2"));
        assert_eq!(p(&u, "1 + r").pow(0).unwrap(), LaurentPoly::one(&u));
    }

    #[test]
    fn embed_into_larger_universe() {
        let u = uni();
        let big = Universe::new(["f_12", "x", "r", "q_12"]);
        let e = p(&u, "r*f_12^-1 + 3").embed(&big).unwrap();
        assert_eq!(e, p(&big, "r*f_12^-1 + 3"));
    }
}
