//! Quasi-commutative algebras graded by `Z^M`.
//!
//! Generators satisfy `g_i g_j = L_ij g_j g_i` for scalar monomials `L_ij`.
//! Every word is then a scalar multiple of a sorted monomial, so elements are
//! stored as exponent vectors with Laurent coefficients. Inverse generators
//! are exponent `-1`, which makes `g^-1 g = 1` automatic.

mod bein;
mod twist;

pub use bein::{bein_constraints, verify_bein_constraints_bcd, BeinConstraints, Series};
pub use twist::verify_twist_coordinates;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use crate::scalars::{DeformationParams, LaurentPoly, Universe};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QSpaceError {
    #[error("generator `{0}` is not invertible but appears with a negative exponent")]
    NegativePowerOfNonInvertible(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("series {series} is incompatible with dimension {n}")]
    SeriesDimensionMismatch { series: Series, n: usize },
    #[error(
        "commutation factor for ({0},{1}) is not an invertible monomial or violates L_ij L_ji = 1"
    )]
    BadCommutationFactor(usize, usize),
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
}

/// Presentation of a cocycle algebra. Indices are 0-based internally.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleAlgebra {
    names: Vec<String>,
    lambda: Vec<Vec<LaurentPoly>>,
    invertible: Vec<bool>,
    universe: Arc<Universe>,
}

impl CocycleAlgebra {
    /// `factor(i, j)` gives `L_ij` for `i < j`; the lower triangle is its inverse.
    pub fn new(
        universe: &Arc<Universe>,
        names: Vec<String>,
        invertible: Vec<bool>,
        factor: impl Fn(usize, usize) -> LaurentPoly,
    ) -> Result<Arc<Self>, QSpaceError> {
        let m = names.len();
        assert_eq!(invertible.len(), m);
        let one = LaurentPoly::one(universe);
        let mut lambda = vec![vec![one.clone(); m]; m];
        // fills both triangles at once
        #[allow(clippy::needless_range_loop)]
        for i in 0..m {
            for j in i + 1..m {
                let l = factor(i, j);
                let inv = l
                    .inverse_monomial()
                    .ok_or(QSpaceError::BadCommutationFactor(i, j))?;
                lambda[i][j] = l;
                lambda[j][i] = inv;
            }
        }
        Ok(Arc::new(CocycleAlgebra {
            names,
            lambda,
            invertible,
            universe: universe.clone(),
        }))
    }

    /// `C_q^N[x]`: `x^i x^j = q_ij x^j x^i`.
    pub fn coordinates(params: &DeformationParams) -> Arc<Self> {
        let n = params.n();
        Self::new(
            params.universe(),
            (1..=n).map(|i| format!("x{i}")).collect(),
            vec![false; n],
            |i, j| params.q(i + 1, j + 1),
        )
        .expect("q is monomial")
    }

    /// Coordinates with the twisted multiparameters `q_ij f_ij^2`.
    pub fn twisted_coordinates(params: &DeformationParams) -> Arc<Self> {
        let n = params.n();
        Self::new(
            params.universe(),
            (1..=n).map(|i| format!("xt{i}")).collect(),
            vec![false; n],
            |i, j| params.twisted_q(i + 1, j + 1),
        )
        .expect("q f^2 is monomial")
    }

    /// The bein algebra: `e^i e^j = f_ij^2 e^j e^i`, all generators invertible.
    pub fn bein(params: &DeformationParams) -> Arc<Self> {
        let n = params.n();
        Self::new(
            params.universe(),
            (1..=n).map(|i| format!("e{i}")).collect(),
            vec![true; n],
            |i, j| {
                let f = params.f(i + 1, j + 1);
                &f * &f
            },
        )
        .expect("f is monomial")
    }

    /// A copy of the bein algebra with opposite multiplication, whose
    /// generators `g_i` obey `g_m g_n = f_mn^-2 g_n g_m`.
    pub fn opposite_bein(params: &DeformationParams) -> Arc<Self> {
        let n = params.n();
        Self::new(
            params.universe(),
            (1..=n).map(|i| format!("g{i}")).collect(),
            vec![true; n],
            |i, j| {
                let f = params.f(j + 1, i + 1);
                &f * &f
            },
        )
        .expect("f is monomial")
    }

    /// The same generators with every factor inverted (opposite multiplication).
    pub fn opposite(&self, prefix: &str) -> Arc<Self> {
        let names = (1..=self.len()).map(|i| format!("{prefix}{i}")).collect();
        Self::new(&self.universe, names, self.invertible.clone(), |i, j| {
            self.lambda[j][i].clone()
        })
        .expect("factors already validated")
    }

    /// Disjoint union of generators; cross factors are 1.
    pub fn tensor(&self, other: &CocycleAlgebra) -> Arc<Self> {
        assert!(
            self.universe == other.universe,
            "tensor factors share scalars"
        );
        let m = self.len();
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let mut invertible = self.invertible.clone();
        invertible.extend(other.invertible.iter().copied());
        Self::new(&self.universe, names, invertible, |i, j| {
            if j < m {
                self.lambda[i][j].clone()
            } else if i >= m {
                other.lambda[i - m][j - m].clone()
            } else {
                LaurentPoly::one(&self.universe)
            }
        })
        .expect("factors already validated")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    /// `L_ij` in `g_i g_j = L_ij g_j g_i`.
    pub fn factor(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.lambda[i][j]
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible[i]
    }

    /// Scalar `c(a, b)` with `x^a x^b = c(a, b) x^(a+b)`: moving each
    /// generator of `b` left past the larger generators of `a`.
    pub fn cocycle(&self, a: &[i32], b: &[i32]) -> LaurentPoly {
        let mut out = LaurentPoly::one(&self.universe);
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate().take(i) {
                if bj != 0 {
                    out = &out * &self.lambda[i][j].pow(ai * bj).expect("monomial factor");
                }
            }
        }
        out
    }
}

/// An element of a [`CocycleAlgebra`] in normal form.
#[derive(Clone, PartialEq)]
pub struct CocycleElement {
    algebra: Arc<CocycleAlgebra>,
    terms: BTreeMap<Vec<i32>, LaurentPoly>,
}

impl CocycleElement {
    pub fn zero(algebra: &Arc<CocycleAlgebra>) -> Self {
        CocycleElement {
            algebra: algebra.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(algebra: &Arc<CocycleAlgebra>) -> Self {
        Self::scalar(algebra, LaurentPoly::one(&algebra.universe))
    }

    pub fn scalar(algebra: &Arc<CocycleAlgebra>, c: LaurentPoly) -> Self {
        let mut e = Self::zero(algebra);
        if !c.is_zero() {
            e.terms.insert(vec![0; algebra.len()], c);
        }
        e
    }

    /// `coeff * x^exps` with the exponents read as a sorted monomial.
    pub fn monomial(
        algebra: &Arc<CocycleAlgebra>,
        exps: &[i32],
        coeff: LaurentPoly,
    ) -> Result<Self, QSpaceError> {
        assert_eq!(exps.len(), algebra.len());
        for (i, &k) in exps.iter().enumerate() {
            if k < 0 && !algebra.invertible[i] {
                return Err(QSpaceError::NegativePowerOfNonInvertible(
                    algebra.names[i].clone(),
                ));
            }
        }
        let mut e = Self::zero(algebra);
        if !coeff.is_zero() {
            e.terms.insert(exps.to_vec(), coeff);
        }
        Ok(e)
    }

    /// Generator `i` (0-based) raised to `k`.
    pub fn generator(algebra: &Arc<CocycleAlgebra>, i: usize, k: i32) -> Result<Self, QSpaceError> {
        if i >= algebra.len() {
            return Err(QSpaceError::IndexOutOfRange(i));
        }
        let mut exps = vec![0; algebra.len()];
        exps[i] = k;
        Self::monomial(algebra, &exps, LaurentPoly::one(&algebra.universe))
    }

    /// Ordered product of generator powers `[(index, power), ...]`.
    pub fn word(
        algebra: &Arc<CocycleAlgebra>,
        letters: &[(usize, i32)],
    ) -> Result<Self, QSpaceError> {
        let mut acc = Self::one(algebra);
        for &(i, k) in letters {
            acc = acc.try_mul(&Self::generator(algebra, i, k)?)?;
        }
        Ok(acc)
    }

    pub fn algebra(&self) -> &Arc<CocycleAlgebra> {
        &self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &LaurentPoly)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Coefficient of the sorted monomial `x^exps`.
    pub fn coefficient(&self, exps: &[i32]) -> LaurentPoly {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(&self.algebra.universe))
    }

    /// For a scalar-valued element, the scalar. Used when residuals should be
    /// reported as a single Laurent polynomial.
    pub fn as_scalar(&self) -> Option<LaurentPoly> {
        match self.terms.len() {
            0 => Some(LaurentPoly::zero(&self.algebra.universe)),
            1 => self.terms.get(&vec![0; self.algebra.len()]).cloned(),
            _ => None,
        }
    }

    /// Number of scalar terms over all monomials.
    pub fn total_terms(&self) -> usize {
        self.terms.values().map(|c| c.num_terms()).sum()
    }

    /// Report entry that passes iff the element is zero.
    pub fn residual_entry(&self, id: impl Into<String>, indices: &[i64]) -> crate::report::Entry {
        match self.as_scalar() {
            Some(c) => crate::report::Entry::exact(id, indices, &c),
            None => crate::report::Entry {
                id: id.into(),
                indices: indices.to_vec(),
                note: None,
                pass: false,
                residual: crate::report::Residual::Exact(self.to_string()),
                residual_terms: self.total_terms(),
            },
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = Self::zero(&self.algebra);
        for (e, v) in &self.terms {
            let p = v * c;
            if !p.is_zero() {
                out.terms.insert(e.clone(), p);
            }
        }
        out
    }

    fn check(&self, other: &Self) -> Result<(), QSpaceError> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(QSpaceError::AlgebraMismatch)
        }
    }

    fn add_into(terms: &mut BTreeMap<Vec<i32>, LaurentPoly>, e: Vec<i32>, c: LaurentPoly) {
        use std::collections::btree_map::Entry;
        match terms.entry(e) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self, sign: i32) -> Result<Self, QSpaceError> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            Self::add_into(&mut terms, e.clone(), if sign < 0 { -c } else { c.clone() });
        }
        Ok(CocycleElement {
            algebra: self.algebra.clone(),
            terms,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, QSpaceError> {
        self.check(other)?;
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = &(ca * cb) * &self.algebra.cocycle(a, b);
                let e: Vec<i32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                Self::add_into(&mut terms, e, c);
            }
        }
        Ok(CocycleElement {
            algebra: self.algebra.clone(),
            terms,
        })
    }

    /// Re-home an element into `target`, mapping generator `i` to
    /// `offset + i`. Used to place a factor inside a tensor product.
    pub fn embed(&self, target: &Arc<CocycleAlgebra>, offset: usize) -> Self {
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut x = vec![0; target.len()];
            x[offset..offset + e.len()].copy_from_slice(e);
            out.terms.insert(x, c.clone());
        }
        out
    }

    pub fn from_rational(algebra: &Arc<CocycleAlgebra>, c: BigRational) -> Self {
        Self::scalar(algebra, LaurentPoly::constant(&algebra.universe, c))
    }
}

impl Add for &CocycleElement {
    type Output = CocycleElement;
    fn add(self, rhs: &CocycleElement) -> CocycleElement {
        self.try_add(rhs, 1).expect("same algebra")
    }
}

impl Sub for &CocycleElement {
    type Output = CocycleElement;
    fn sub(self, rhs: &CocycleElement) -> CocycleElement {
        self.try_add(rhs, -1).expect("same algebra")
    }
}

impl Mul for &CocycleElement {
    type Output = CocycleElement;
    fn mul(self, rhs: &CocycleElement) -> CocycleElement {
        self.try_mul(rhs).expect("same algebra")
    }
}

impl fmt::Display for CocycleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*{}", self.algebra.names[i])?,
                    _ => write!(f, "*{}^{p}", self.algebra.names[i])?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CocycleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CocycleElement({self})")
    }
}
