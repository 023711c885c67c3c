//! The two-dimensional q-plane model on a truncated basis `|N, m>`.
//!
//! `N` in `0..L` is the radial site with `rho |N, m> = r^-N |N, m>`, `m` in
//! `-M..=M` the angular Fourier index with `B |N, m> = r^-m |N, m>`.
//! Basis index is `(m + M) L + N`, so each `m` is a contiguous block.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod action;
mod cylinder;
mod ops;
mod spectrum;
mod trace;

pub use action::{free_action, jackson_pairing};
pub use cylinder::{map_to_cylinder, verify_cylinder, CylinderMap, CylinderSite};
pub use ops::{
    build_basic_ops, build_z_ops, verify_operator_relations, verify_z_relations, BasicOps, ZOps,
};
pub use spectrum::{
    continuum_error, hamiltonian, lambda_operator, lambda_printed, plane_wave, plane_wave_k,
    q_bracket, spectrum, verify_spectrum, xi_operator, xi_printed, Hamiltonian, SpectrumResult,
    SpectrumRow, SPECTRUM_TOL,
};
pub use trace::{one_loop_trace, trace_term, trace_term_closed, TraceConfig, TraceResult};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum QmError {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("{0} needs a cyclic boundary")]
    NeedsCyclic(&'static str),
    #[error("momentum {p} is not on the grid 2 pi k / (L |ln r|)")]
    OffGridMomentum { p: f64 },
    #[error("angular index {m} outside -{max}..={max}")]
    ModeOutOfRange { m: i64, max: usize },
    #[error("the m = 0 mode diverges at P = 0 when mu^2 = 0")]
    InfraredDivergence,
    #[error("field component for m = {m} has length {got}, expected {expected}")]
    ShapeMismatch { m: i64, expected: usize, got: usize },
    #[error("quadrature did not reach tolerance on [{a}, {b}]")]
    QuadratureFailed { a: f64, b: f64 },
    #[error("spectrum file: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Cyclic,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = QmError;
    fn from_str(s: &str) -> Result<Self, QmError> {
        match s {
            "cyclic" => Ok(Boundary::Cyclic),
            "open" => Ok(Boundary::Open),
            _ => Err(QmError::InvalidBasis(format!("unknown boundary `{s}`"))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Cyclic => "cyclic",
            Boundary::Open => "open",
        })
    }
}

/// `L` radial sites, `2M + 1` angular modes, exact base `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedBasis {
    l: usize,
    m: usize,
    boundary: Boundary,
    r: BigRational,
}

impl TruncatedBasis {
    pub fn new(l: usize, m: usize, boundary: Boundary, r: BigRational) -> Result<Self, QmError> {
        if l < 2 {
            return Err(QmError::InvalidBasis(format!("need L >= 2, got {l}")));
        }
        if r <= BigRational::zero() || r >= BigRational::one() {
            return Err(QmError::InvalidBasis(format!(
                "r must lie in (0, 1), got {r}"
            )));
        }
        Ok(TruncatedBasis { l, m, boundary, r })
    }

    /// Base given as a float, converted exactly.
    pub fn with_f64(l: usize, m: usize, boundary: Boundary, r: f64) -> Result<Self, QmError> {
        let r =
            BigRational::from_float(r).ok_or_else(|| QmError::InvalidBasis(format!("r = {r}")))?;
        Self::new(l, m, boundary, r)
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn max_mode(&self) -> usize {
        self.m
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn r(&self) -> &BigRational {
        &self.r
    }

    pub fn r_f64(&self) -> f64 {
        self.r.to_f64().expect("finite")
    }

    /// `chi = ln r < 0`.
    pub fn chi(&self) -> f64 {
        self.r_f64().ln()
    }

    pub fn dim(&self) -> usize {
        self.l * (2 * self.m + 1)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        -(self.m as i64)..=self.m as i64
    }

    pub fn index(&self, n: usize, m: i64) -> Option<usize> {
        (n < self.l && m.unsigned_abs() as usize <= self.m)
            .then(|| (m + self.m as i64) as usize * self.l + n)
    }

    /// `(N, m)` of a basis index.
    pub fn label(&self, idx: usize) -> (usize, i64) {
        (idx % self.l, (idx / self.l) as i64 - self.m as i64)
    }

    /// `r^k` exactly, as any operator scalar.
    pub fn r_pow<T: OpScalar>(&self, k: i64) -> T {
        let base = if k < 0 {
            BigRational::one() / self.r.clone()
        } else {
            self.r.clone()
        };
        T::from_rational(&num_traits::pow(base, k.unsigned_abs() as usize))
    }

    fn check_mode(&self, m: i64) -> Result<(), QmError> {
        if m.unsigned_abs() as usize > self.m {
            Err(QmError::ModeOutOfRange { m, max: self.m })
        } else {
            Ok(())
        }
    }
}

/// Matrix entry type: exact rationals for identities, floats for spectra.
pub trait OpScalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(c: &BigRational) -> Self;
    fn conj(&self) -> Self;
    fn abs_f64(&self) -> f64;
}

impl OpScalar for f64 {
    fn from_rational(c: &BigRational) -> Self {
        c.to_f64().unwrap_or(f64::NAN)
    }
    fn conj(&self) -> Self {
        *self
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
}

impl OpScalar for Complex64 {
    fn from_rational(c: &BigRational) -> Self {
        Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

impl OpScalar for BigRational {
    fn from_rational(c: &BigRational) -> Self {
        c.clone()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn abs_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpTag {
    Hermitian,
    Unitary,
    General,
}

/// Sparse square matrix keyed by `(row, column)`; zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp<T> {
    dim: usize,
    entries: BTreeMap<(usize, usize), T>,
    pub tag: OpTag,
}

impl<T: OpScalar> SparseOp<T> {
    pub fn zero(dim: usize) -> Self {
        SparseOp {
            dim,
            entries: BTreeMap::new(),
            tag: OpTag::General,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| T::one()))
    }

    pub fn diagonal(values: impl IntoIterator<Item = T>) -> Self {
        let mut op = Self::zero(0);
        for (k, v) in values.into_iter().enumerate() {
            op.dim = k + 1;
            op.add_entry(k, k, v);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn with_tag(mut self, tag: OpTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn add_entry(&mut self, row: usize, col: usize, value: T) {
        assert!(
            row < self.dim && col < self.dim,
            "entry ({row}, {col}) outside dimension {}",
            self.dim
        );
        let sum = match self.entries.remove(&(row, col)) {
            Some(v) => v + value,
            None => value,
        };
        if !sum.is_zero() {
            self.entries.insert((row, col), sum);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &T)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(a, b)| a == b)
    }

    /// At most one nonzero per column.
    pub fn is_single_shift(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.entries.keys().all(|(_, c)| seen.insert(*c))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(|v| v.abs_f64())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(a, b), v) in &self.entries {
            out.add_entry(a, b, v.clone() * c.clone());
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(a, b), v) in &self.entries {
            out.add_entry(b, a, v.conj());
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut by_row: BTreeMap<usize, Vec<(usize, &T)>> = BTreeMap::new();
        for (&(k, c), v) in &other.entries {
            by_row.entry(k).or_default().push((c, v));
        }
        let mut out = Self::zero(self.dim);
        for (&(a, k), v) in &self.entries {
            for (c, w) in by_row.get(&k).into_iter().flatten() {
                out.add_entry(a, *c, v.clone() * (*w).clone());
            }
        }
        out
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![T::zero(); self.dim];
        for (&(a, b), x) in &self.entries {
            out[a] = out[a].clone() + x.clone() * v[b].clone();
        }
        out
    }

    /// Keep only the entries accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(a, b), v) in &self.entries {
            if keep(a, b) {
                out.add_entry(a, b, v.clone());
            }
        }
        out
    }

    pub fn map<U: OpScalar>(&self, f: impl Fn(&T) -> U) -> SparseOp<U> {
        let mut out = SparseOp::zero(self.dim);
        for (&(a, b), v) in &self.entries {
            out.add_entry(a, b, f(v));
        }
        out.tag = self.tag;
        out
    }
}

impl<T: OpScalar> Add for &SparseOp<T> {
    type Output = SparseOp<T>;
    fn add(self, rhs: &SparseOp<T>) -> SparseOp<T> {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        out.tag = OpTag::General;
        for (&(a, b), v) in &rhs.entries {
            out.add_entry(a, b, v.clone());
        }
        out
    }
}

impl<T: OpScalar> Sub for &SparseOp<T> {
    type Output = SparseOp<T>;
    fn sub(self, rhs: &SparseOp<T>) -> SparseOp<T> {
        self + &rhs.scale(&-T::one())
    }
}

impl<T: OpScalar> Mul for &SparseOp<T> {
    type Output = SparseOp<T>;
    fn mul(self, rhs: &SparseOp<T>) -> SparseOp<T> {
        self.matmul(rhs)
    }
}
