//! Multiparametric R-matrices, their diagonal twists, and exact checks.
//!
//! Index convention: entry `R^{mn}_{ps}` sits at row `(m, n)` and column
//! `(p, s)` of an `N^2 x N^2` matrix, all indices 1-based in the public API.
//! Tensor legs for the Yang-Baxter check are
//! `(R12)^{abc}_{def} = R^{ab}_{de} d^c_f`, `(R13)^{abc}_{def} = R^{ac}_{df} d^b_e`,
//! `(R23)^{abc}_{def} = d^a_d R^{bc}_{ef}` and the equation is
//! `R12 R13 R23 = R23 R13 R12`.
//!
//! Worked 2x2 case (`N = 2`, `q_12 = 1`): the only off-diagonal entry is
//! `R^{21}_{12} = 1 - r^-1`, i.e. row `(2,1)`, column `(1,2)`.

mod bcd;
mod push;
mod ybe;

pub use bcd::{bcd_terms, build_bcd_r, one_parameter_params, BcdConfig, BcdForm};
pub use push::{check_push_through, check_twist_lemmas, check_twist_lemmas_with, GBlock};
pub use ybe::check_yang_baxter;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qspace::{QSpaceError, Series};
use crate::scalars::{DeformationParams, LaurentPoly, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RMatrixError {
    #[error("dimension {0} is below the supported minimum of 2")]
    DimensionTooSmall(usize),
    #[error("missing convention data: {0}")]
    MissingConventionData(String),
    #[error("invalid convention data: {0}")]
    InvalidConvention(String),
    #[error("parameter dimension {params} does not match matrix dimension {matrix}")]
    DimensionMismatch { params: usize, matrix: usize },
    #[error("twisted matrix differs from the matrix built with twisted parameters at {0:?}")]
    Postcondition([usize; 4]),
    #[error("malformed R-matrix document: {0}")]
    Parse(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    QSpace(#[from] QSpaceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    GL,
    B,
    C,
    D,
}

impl Family {
    pub fn series(self) -> Option<Series> {
        match self {
            Family::GL => None,
            Family::B => Some(Series::B),
            Family::C => Some(Series::C),
            Family::D => Some(Series::D),
        }
    }
}

impl From<Series> for Family {
    fn from(s: Series) -> Self {
        match s {
            Series::B => Family::B,
            Series::C => Family::C,
            Series::D => Family::D,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::GL => f.write_str("GL"),
            Family::B => f.write_str("B"),
            Family::C => f.write_str("C"),
            Family::D => f.write_str("D"),
        }
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "GL" | "A" => Ok(Family::GL),
            other => other
                .parse::<Series>()
                .map(Family::from)
                .map_err(|_| format!("unknown family `{s}`")),
        }
    }
}

/// Dense `N^4` table of exact entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix {
    n: usize,
    family: Family,
    entries: Vec<LaurentPoly>,
    params: DeformationParams,
    bcd: Option<BcdConfig>,
}

impl RMatrix {
    pub(crate) fn from_fn(
        params: &DeformationParams,
        family: Family,
        mut f: impl FnMut(usize, usize, usize, usize) -> Result<LaurentPoly, RMatrixError>,
    ) -> Result<Self, RMatrixError> {
        let n = params.n();
        let mut entries = Vec::with_capacity(n.pow(4));
        for m in 1..=n {
            for nn in 1..=n {
                for p in 1..=n {
                    for s in 1..=n {
                        entries.push(f(m, nn, p, s)?);
                    }
                }
            }
        }
        Ok(RMatrix {
            n,
            family,
            entries,
            params: params.clone(),
            bcd: None,
        })
    }

    fn offset(&self, m: usize, n: usize, p: usize, s: usize) -> usize {
        let d = self.n;
        debug_assert!(
            (1..=d).contains(&m)
                && (1..=d).contains(&n)
                && (1..=d).contains(&p)
                && (1..=d).contains(&s)
        );
        (((m - 1) * d + (n - 1)) * d + (p - 1)) * d + (s - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &DeformationParams {
        &self.params
    }

    /// Convention data when built from the orthogonal/symplectic formula.
    pub fn bcd_config(&self) -> Option<&BcdConfig> {
        self.bcd.as_ref()
    }

    /// `R^{mn}_{ps}`, 1-based.
    pub fn get(&self, m: usize, n: usize, p: usize, s: usize) -> &LaurentPoly {
        &self.entries[self.offset(m, n, p, s)]
    }

    /// Replace one entry; used for negative controls.
    pub fn with_entry(mut self, idx: [usize; 4], value: LaurentPoly) -> Self {
        let o = self.offset(idx[0], idx[1], idx[2], idx[3]);
        self.entries[o] = value;
        self
    }

    /// Nonzero entries as `([m, n, p, s], coeff)` in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = ([usize; 4], &LaurentPoly)> {
        let d = self.n;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(o, c)| {
                let s = o % d + 1;
                let p = (o / d) % d + 1;
                let n = (o / d / d) % d + 1;
                let m = o / d / d / d + 1;
                ([m, n, p, s], c)
            })
    }

    /// GL support: `(p, s)` is `(m, n)` or `(n, m)` for every nonzero entry.
    pub fn has_gl_support(&self) -> bool {
        self.nonzero()
            .all(|([m, n, p, s], _)| (p, s) == (m, n) || (p, s) == (n, m))
    }

    /// JSON document with the family, dimension, indeterminates and nonzero entries.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            entries: Vec<EntryDoc>,
            family: Family,
            indeterminates: &'a [String],
            n: usize,
        }
        let entries = self
            .nonzero()
            .map(|([m, n, p, s], c)| EntryDoc {
                coeff: c.to_string(),
                m,
                n,
                p,
                s,
            })
            .collect();
        serde_json::to_string_pretty(&Doc {
            entries,
            family: self.family,
            indeterminates: self.params.universe().names(),
            n: self.n,
        })
        .expect("serializable")
    }

    /// Parse a document written by [`to_json`](Self::to_json) back over `params`.
    pub fn from_json(text: &str, params: &DeformationParams) -> Result<Self, RMatrixError> {
        #[derive(Deserialize)]
        struct Doc {
            entries: Vec<EntryDoc>,
            family: Family,
            n: usize,
        }
        let doc: Doc =
            serde_json::from_str(text).map_err(|e| RMatrixError::Parse(e.to_string()))?;
        if doc.n != params.n() {
            return Err(RMatrixError::DimensionMismatch {
                params: params.n(),
                matrix: doc.n,
            });
        }
        let mut r = RMatrix::from_fn(params, doc.family, |_, _, _, _| Ok(params.zero()))?;
        for e in doc.entries {
            if [e.m, e.n, e.p, e.s].iter().any(|&i| i == 0 || i > doc.n) {
                return Err(RMatrixError::Parse(format!(
                    "index out of range in {:?}",
                    [e.m, e.n, e.p, e.s]
                )));
            }
            let c = params.poly(&e.coeff)?;
            r = r.with_entry([e.m, e.n, e.p, e.s], c);
        }
        Ok(r)
    }
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    coeff: String,
    m: usize,
    n: usize,
    p: usize,
    s: usize,
}

/// The multiparametric GL R-matrix `R = B + N`.
pub fn build_gl_r(params: &DeformationParams) -> Result<RMatrix, RMatrixError> {
    if params.n() < 2 {
        return Err(RMatrixError::DimensionTooSmall(params.n()));
    }
    let r_inv = params.r_inv();
    let off = &params.one() - &r_inv;
    RMatrix::from_fn(params, Family::GL, |m, n, p, s| {
        let mut v = params.zero();
        if p == m && s == n {
            v = if m == n {
                params.one()
            } else if n > m {
                params.q(m, n).inverse_monomial().unwrap()
            } else {
                &params.q(n, m) * &r_inv
            };
        }
        if s == m && p == n && m > n {
            v = &v + &off;
        }
        Ok(v)
    })
}

/// `F^-1 R F^-1` for the diagonal twist `F_(mn),(mn) = f_mn`.
///
/// For the GL family the result is compared with the matrix built directly
/// from the twisted parameters `q_ij f_ij^2`.
pub fn twist_r(r: &RMatrix, params: &DeformationParams) -> Result<RMatrix, RMatrixError> {
    if params.n() != r.n {
        return Err(RMatrixError::DimensionMismatch {
            params: params.n(),
            matrix: r.n,
        });
    }
    let fi = |a: usize, b: usize| params.f(b, a);
    let mut out = RMatrix::from_fn(&r.params, r.family, |m, n, p, s| {
        let v = r.get(m, n, p, s);
        if v.is_zero() {
            return Ok(v.clone());
        }
        let fac = &fi(m, n) * &fi(p, s);
        Ok(v * &fac.embed(r.params.universe())?)
    })?;
    out.bcd = r.bcd.clone();
    if r.family == Family::GL && build_gl_r(params).as_ref() == Ok(r) {
        let direct = build_gl_r(&params.twisted())?;
        for m in 1..=r.n {
            for n in 1..=r.n {
                for p in 1..=r.n {
                    for s in 1..=r.n {
                        if out.get(m, n, p, s) != direct.get(m, n, p, s) {
                            return Err(RMatrixError::Postcondition([m, n, p, s]));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn gl2_single_parameter_entries() {
        let p = DeformationParams::symbolic(2)
            .with_all_q(DeformationParams::symbolic(2).one())
            .unwrap();
        let r = build_gl_r(&p).unwrap();
        let nz: Vec<_> = r.nonzero().map(|(i, c)| (i, c.to_string())).collect();
        assert_eq!(
            nz,
            vec![
                ([1, 1, 1, 1], "1".to_string()),
                ([1, 2, 1, 2], "1".to_string()),
                ([2, 1, 1, 2], "-r^-1 + 1".to_string()),
                ([2, 1, 2, 1], "r^-1".to_string()),
                ([2, 2, 2, 2], "1".to_string()),
            ]
        );
    }

    #[test]
    fn gl2_symbolic_diagonal() {
        let p = DeformationParams::symbolic(2);
        let r = build_gl_r(&p).unwrap();
        assert_eq!(*r.get(1, 2, 1, 2), p.poly("q_12^-1").unwrap());
        assert_eq!(*r.get(2, 1, 2, 1), p.poly("q_12*r^-1").unwrap());
        assert!(r.has_gl_support());
    }

    #[test]
    fn undeformed_is_identity() {
        let p = DeformationParams::undeformed(3);
        let r = build_gl_r(&p).unwrap();
        for ([m, n, pp, s], c) in r.nonzero() {
            assert_eq!((m, n), (pp, s));
            assert!(c.is_one());
        }
        assert_eq!(r.nonzero().count(), 9);
    }

    #[test]
    fn twist_entries() {
        let p = DeformationParams::symbolic(2);
        let r = build_gl_r(&p).unwrap();
        let t = twist_r(&r, &p).unwrap();
        assert_eq!(*t.get(1, 2, 1, 2), p.poly("q_12^-1*f_12^-2").unwrap());
        assert_eq!(t.get(2, 1, 1, 2), r.get(2, 1, 1, 2));
        let id = twist_r(&r, &p.clone().identity_twist()).unwrap();
        assert_eq!(id, r);
    }

    #[test]
    fn json_round_trip() {
        let p = DeformationParams::symbolic(3);
        let r = build_gl_r(&p).unwrap();
        let back = RMatrix::from_json(&r.to_json(), &p).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn numeric_r() {
        let p = DeformationParams::symbolic(2)
            .with_numeric_r(BigRational::new(1.into(), 2.into()))
            .unwrap();
        let r = build_gl_r(&p).unwrap();
        assert_eq!(*r.get(2, 1, 1, 2), p.poly("-1").unwrap());
    }
}
