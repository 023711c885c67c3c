//! Multidimensional Jackson calculus on geometric lattices and monomial bases.
//!
//! Axes are 1-based. Plain dilatations `A_i` rescale the suffix
//! `x_i, ..., x_N` by `r` (`A_{N+1}` is the identity); tilde dilatations
//! `Ã_i` rescale the prefix `x_1, ..., x_i` by `1/r` (`Ã_0` is the identity).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::ops::Neg;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};
use thiserror::Error;

mod check;
mod derivative;
mod integral;

pub use check::verify_cr_numeric;
pub use derivative::{
    backward_fn, backward_poly, dilatation_apply, forward_fn, forward_poly, jackson_backward,
    jackson_backward_printed, jackson_forward, q_number, DilatationVariant,
};
pub use integral::{
    jackson_integral, jackson_integral_exact, JacksonIntegral, DEFAULT_INTEGRAL_TOL,
};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum JacksonError {
    #[error("coordinate x{axis} is zero")]
    ZeroCoordinate { axis: usize },
    #[error("point {0} is not on the sampled lattice")]
    PointOffLattice(String),
    #[error("axis {axis} out of range for N = {n}")]
    AxisOutOfRange { axis: usize, n: usize },
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Jackson integral tail does not decay after {terms} terms")]
    TailDivergence { terms: usize },
    #[error("base r must lie in (0, 1), got {0}")]
    InvalidBase(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
}

/// Field of function values and coordinates. Exact for `BigRational`.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + Send + Sync + 'static {
    fn from_rational(c: &BigRational) -> Self;
    fn magnitude(&self) -> f64;
    /// Equality up to rounding for floating types, exact otherwise.
    fn close_to(&self, other: &Self) -> bool;
    /// The value as a real number, if it is one.
    fn as_real(&self) -> Option<f64>;

    fn powi(&self, k: i64) -> Self {
        let base = if k < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        num_traits::pow(base, k.unsigned_abs() as usize)
    }
}

const FLOAT_MATCH: f64 = 1e-12;

impl Scalar for f64 {
    fn from_rational(c: &BigRational) -> Self {
        c.to_f64().unwrap_or(f64::NAN)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn close_to(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_MATCH * self.abs().max(other.abs())
    }
    fn as_real(&self) -> Option<f64> {
        Some(*self)
    }
}

impl Scalar for Complex64 {
    fn from_rational(c: &BigRational) -> Self {
        Complex64::new(f64::from_rational(c), 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn close_to(&self, other: &Self) -> bool {
        (self - other).norm() <= FLOAT_MATCH * self.norm().max(other.norm())
    }
    fn as_real(&self) -> Option<f64> {
        (self.im == 0.0).then_some(self.re)
    }
}

impl Scalar for BigRational {
    fn from_rational(c: &BigRational) -> Self {
        c.clone()
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN).abs()
    }
    fn close_to(&self, other: &Self) -> bool {
        self == other
    }
    fn as_real(&self) -> Option<f64> {
        self.to_f64()
    }
}

pub(crate) fn check_base<S: Scalar>(r: &S) -> Result<(), JacksonError> {
    if matches!(r.as_real(), Some(v) if v > 0.0 && v < 1.0) {
        Ok(())
    } else {
        Err(JacksonError::InvalidBase(format!("{r:?}")))
    }
}

/// Points `r^-l` per axis with `l` in `[l_min, l_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricLattice<S: Scalar> {
    r: S,
    ranges: Vec<(i64, i64)>,
}

impl<S: Scalar> GeometricLattice<S> {
    pub fn new(r: S, ranges: Vec<(i64, i64)>) -> Result<Self, JacksonError> {
        check_base(&r)?;
        if ranges.is_empty() {
            return Err(JacksonError::InvalidLattice("dimension 0".into()));
        }
        if let Some((lo, hi)) = ranges.iter().find(|(lo, hi)| lo > hi) {
            return Err(JacksonError::InvalidLattice(format!(
                "empty range [{lo}, {hi}]"
            )));
        }
        Ok(GeometricLattice { r, ranges })
    }

    /// Same range on every axis.
    pub fn cube(r: S, n: usize, l_min: i64, l_max: i64) -> Result<Self, JacksonError> {
        Self::new(r, vec![(l_min, l_max); n])
    }

    pub fn r(&self) -> &S {
        &self.r
    }

    pub fn n(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    pub fn contains(&self, l: &[i64]) -> bool {
        l.len() == self.n()
            && l.iter()
                .zip(&self.ranges)
                .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    pub fn point(&self, l: &[i64]) -> Vec<S> {
        l.iter().map(|&k| self.r.powi(-k)).collect()
    }

    /// Multi-index of a coordinate vector, if every coordinate is `r^-l`
    /// with `l` in range.
    pub fn index_of(&self, x: &[S]) -> Result<Vec<i64>, JacksonError> {
        let off = || JacksonError::PointOffLattice(format!("{x:?}"));
        if x.len() != self.n() {
            return Err(JacksonError::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        let ln_r = self.r.magnitude().ln();
        x.iter()
            .zip(&self.ranges)
            .map(|(v, (lo, hi))| {
                let m = v.magnitude();
                if m == 0.0 || !m.is_finite() {
                    return Err(off());
                }
                let l = (-m.ln() / ln_r).round() as i64;
                if l < *lo || l > *hi || !v.close_to(&self.r.powi(-l)) {
                    return Err(off());
                }
                Ok(l)
            })
            .collect()
    }

    /// Every multi-index, last axis fastest.
    pub fn indices(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for (lo, hi) in &self.ranges {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (*lo..=*hi).map(move |l| {
                        let mut p = prefix.clone();
                        p.push(l);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

pub type AnalyticFn<S> = Arc<dyn Fn(&[S]) -> Result<S, JacksonError> + Send + Sync>;

/// A function of `N` commuting variables.
#[derive(Clone)]
pub enum LatticeFunction<S: Scalar> {
    /// Values on lattice points; a missing value is off the lattice.
    Sampled {
        lattice: GeometricLattice<S>,
        values: HashMap<Vec<i64>, S>,
    },
    Analytic {
        n: usize,
        f: AnalyticFn<S>,
    },
    /// `sum_a c_a x^a`.
    Monomial {
        n: usize,
        coeffs: BTreeMap<Vec<u32>, S>,
    },
}

impl<S: Scalar> Debug for LatticeFunction<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LatticeFunction::Sampled { lattice, values } => {
                write!(f, "Sampled(n={}, {} values)", lattice.n(), values.len())
            }
            LatticeFunction::Analytic { n, .. } => write!(f, "Analytic(n={n})"),
            LatticeFunction::Monomial { coeffs, .. } => write!(f, "Monomial({coeffs:?})"),
        }
    }
}

impl<S: Scalar> LatticeFunction<S> {
    pub fn sampled(
        lattice: GeometricLattice<S>,
        values: HashMap<Vec<i64>, S>,
    ) -> Result<Self, JacksonError> {
        if let Some(l) = values.keys().find(|l| !lattice.contains(l)) {
            return Err(JacksonError::InvalidLattice(format!(
                "sample {l:?} outside the lattice"
            )));
        }
        Ok(LatticeFunction::Sampled { lattice, values })
    }

    /// Sample `f` at every lattice point.
    pub fn sample(lattice: GeometricLattice<S>, f: impl Fn(&[S]) -> S) -> Self {
        let values = lattice
            .indices()
            .into_iter()
            .map(|l| (l.clone(), f(&lattice.point(&l))))
            .collect();
        LatticeFunction::Sampled { lattice, values }
    }

    pub fn analytic(n: usize, f: impl Fn(&[S]) -> S + Send + Sync + 'static) -> Self {
        LatticeFunction::Analytic {
            n,
            f: Arc::new(move |x| Ok(f(x))),
        }
    }

    pub fn monomial(n: usize, coeffs: BTreeMap<Vec<u32>, S>) -> Result<Self, JacksonError> {
        if let Some(a) = coeffs.keys().find(|a| a.len() != n) {
            return Err(JacksonError::DimensionMismatch {
                expected: n,
                got: a.len(),
            });
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(LatticeFunction::Monomial { n, coeffs })
    }

    /// `c x^a`.
    pub fn single(c: S, a: &[u32]) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(a.to_vec(), c);
        }
        LatticeFunction::Monomial { n: a.len(), coeffs }
    }

    pub fn n(&self) -> usize {
        match self {
            LatticeFunction::Sampled { lattice, .. } => lattice.n(),
            LatticeFunction::Analytic { n, .. } | LatticeFunction::Monomial { n, .. } => *n,
        }
    }

    pub fn eval(&self, x: &[S]) -> Result<S, JacksonError> {
        if x.len() != self.n() {
            return Err(JacksonError::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        match self {
            LatticeFunction::Sampled { lattice, values } => {
                let l = lattice.index_of(x)?;
                values
                    .get(&l)
                    .cloned()
                    .ok_or_else(|| JacksonError::PointOffLattice(format!("{l:?}")))
            }
            LatticeFunction::Analytic { f, .. } => f(x),
            LatticeFunction::Monomial { coeffs, .. } => {
                Ok(coeffs.iter().fold(S::zero(), |acc, (a, c)| {
                    let term = a
                        .iter()
                        .zip(x)
                        .fold(c.clone(), |t, (&k, v)| t * v.powi(k as i64));
                    acc + term
                }))
            }
        }
    }

    /// Pointwise product, as an analytic function.
    pub fn product(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        LatticeFunction::Analytic {
            n: self.n(),
            f: Arc::new(move |x| Ok(f.eval(x)? * g.eval(x)?)),
        }
    }

    /// `x_i f`, as an analytic function.
    pub fn times_coord(&self, i: usize) -> Result<Self, JacksonError> {
        check_axis(i, self.n())?;
        let f = self.clone();
        Ok(LatticeFunction::Analytic {
            n: self.n(),
            f: Arc::new(move |x| Ok(x[i - 1].clone() * f.eval(x)?)),
        })
    }
}

pub(crate) fn check_axis(i: usize, n: usize) -> Result<(), JacksonError> {
    if i == 0 || i > n {
        Err(JacksonError::AxisOutOfRange { axis: i, n })
    } else {
        Ok(())
    }
}
