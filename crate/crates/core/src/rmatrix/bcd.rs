//! R-matrices of the orthogonal and symplectic series.
//!
//! The formula is split into its two brackets: the first has GL-like
//! structure, the second holds the terms pinned by `d^{ij'}` and the middle
//! index of B.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Family, RMatrix, RMatrixError};
use crate::qspace::Series;
use crate::scalars::{DeformationParams, LaurentPoly};

/// Which transcription of the formula to use.
///
/// `Printed` follows the displayed formula literally. `Amended` drops the
/// multiparameter term on `j = i'` (where the `1/r` term already sits) and
/// takes the exponent, sign and step of the `d^{ij'} d_{kl'}` term from the
/// pair `(i, k)` instead of `(i, j)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcdForm {
    #[default]
    Printed,
    Amended,
}

impl FromStr for BcdForm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "printed" => Ok(BcdForm::Printed),
            "amended" => Ok(BcdForm::Amended),
            _ => Err(format!("unknown form `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcdConfig {
    pub series: Series,
    pub n: usize,
    /// `rho_i`, integer or half-integer.
    pub rho: Option<Vec<BigRational>>,
    /// `eps_i` in `{+1, -1}`.
    pub eps: Option<Vec<i32>>,
    #[serde(default)]
    pub form: BcdForm,
}

fn half(k: i64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(2))
}

impl BcdConfig {
    /// Without convention data; [`build_bcd_r`] will refuse it.
    pub fn bare(series: Series, n: usize) -> Self {
        BcdConfig {
            series,
            n,
            rho: None,
            eps: None,
            form: BcdForm::Printed,
        }
    }

    /// Shipped conventions:
    /// B: `rho = (k-1/2, ..., 1/2, 0, -1/2, ..., -(k-1/2))`, `eps = 1`;
    /// C: `rho = (k, ..., 1, -1, ..., -k)`, `eps = (1, ..., 1, -1, ..., -1)`;
    /// D: `rho = (k-1, ..., 0, 0, ..., -(k-1))`, `eps = 1`.
    pub fn with_default_conventions(series: Series, n: usize) -> Result<Self, RMatrixError> {
        let k = series.rank(n)? as i64;
        let (rho, eps): (Vec<BigRational>, Vec<i32>) = match series {
            Series::B => {
                let mut rho: Vec<_> = (0..k).map(|i| half(2 * (k - i) - 1)).collect();
                rho.push(BigRational::zero());
                rho.extend((0..k).map(|i| half(-(2 * i + 1))));
                (rho, vec![1; n])
            }
            Series::C => {
                let mut rho: Vec<_> = (0..k)
                    .map(|i| BigRational::from_integer((k - i).into()))
                    .collect();
                rho.extend((0..k).map(|i| BigRational::from_integer((-(i + 1)).into())));
                let eps = (0..n)
                    .map(|i| if (i as i64) < k { 1 } else { -1 })
                    .collect();
                (rho, eps)
            }
            Series::D => {
                let mut rho: Vec<_> = (0..k)
                    .map(|i| BigRational::from_integer((k - 1 - i).into()))
                    .collect();
                rho.extend((0..k).map(|i| BigRational::from_integer((-i).into())));
                (rho, vec![1; n])
            }
        };
        Ok(BcdConfig {
            series,
            n,
            rho: Some(rho),
            eps: Some(eps),
            form: BcdForm::Printed,
        })
    }

    pub fn with_form(mut self, form: BcdForm) -> Self {
        self.form = form;
        self
    }

    fn validated(&self) -> Result<(&[BigRational], &[i32]), RMatrixError> {
        self.series.rank(self.n)?;
        let rho = self
            .rho
            .as_deref()
            .ok_or_else(|| RMatrixError::MissingConventionData("rho".into()))?;
        let eps = self
            .eps
            .as_deref()
            .ok_or_else(|| RMatrixError::MissingConventionData("eps".into()))?;
        if rho.len() != self.n || eps.len() != self.n {
            return Err(RMatrixError::InvalidConvention(format!(
                "rho and eps need {} entries",
                self.n
            )));
        }
        if eps.iter().any(|e| e.abs() != 1) {
            return Err(RMatrixError::InvalidConvention(
                "eps entries must be +1 or -1".into(),
            ));
        }
        let two = BigRational::from_integer(2.into());
        if rho.iter().any(|x| !(x * &two).is_integer()) {
            return Err(RMatrixError::InvalidConvention(
                "rho entries must be integer or half-integer".into(),
            ));
        }
        Ok((rho, eps))
    }
}

/// `(first bracket, second bracket)` of `R^{ij}_{kl}`, 1-based.
pub fn bcd_terms(
    config: &BcdConfig,
    params: &DeformationParams,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<(LaurentPoly, LaurentPoly), RMatrixError> {
    let (rho, eps) = config.validated()?;
    let n = config.n;
    let prime = |x: usize| n + 1 - x;
    let r = params.r().clone();
    let r_inv = params.r_inv();
    let step = &r - &r_inv;

    let mut first = params.zero();
    if i == k && j == l {
        if i == j && i != prime(i) {
            first = &first + &r;
        }
        let excluded = match config.form {
            BcdForm::Printed => i == prime(i),
            BcdForm::Amended => j == prime(i),
        };
        if !excluded {
            if j > i {
                first = &first + &(&r * &params.q(i, j).inverse_monomial().unwrap());
            } else if i > j {
                first = &first + &(&params.q(j, i) * &r_inv);
            }
        }
    }
    if i == l && j == k && i > j {
        first = &first + &step;
    }

    let mut second = params.zero();
    if i == k && j == l && j == prime(i) && i != prime(i) {
        second = &second + &r_inv;
    }
    if j == prime(i) && k == prime(l) {
        let partner = match config.form {
            BcdForm::Printed => j,
            BcdForm::Amended => k,
        };
        if i > partner {
            let twice = ((&rho[i - 1] - &rho[partner - 1]) * BigRational::from_integer(2.into()))
                .to_integer()
                .to_i32()
                .expect("small exponent");
            let sign = eps[i - 1] * eps[partner - 1];
            let term = &step * &params.r_half_pow(twice)?;
            second = if sign > 0 {
                &second - &term
            } else {
                &second + &term
            };
        }
    }
    if let Some(mid) = config.series.middle(n) {
        if i == mid && j == mid && k == mid && l == mid {
            second = &second + &params.one();
        }
    }
    Ok((first, second))
}

pub fn build_bcd_r(
    config: &BcdConfig,
    params: &DeformationParams,
) -> Result<RMatrix, RMatrixError> {
    if params.n() != config.n {
        return Err(RMatrixError::DimensionMismatch {
            params: params.n(),
            matrix: config.n,
        });
    }
    config.validated()?;
    let mut r = RMatrix::from_fn(params, Family::from(config.series), |i, j, k, l| {
        let (a, b) = bcd_terms(config, params, i, j, k, l)?;
        Ok(&a + &b)
    })?;
    r.bcd = Some(config.clone());
    Ok(r)
}

/// All `q_ij` equal to `r`: the one-parameter point of the multiparameter family.
pub fn one_parameter_params(params: &DeformationParams) -> DeformationParams {
    let r = params.r().clone();
    params.clone().with_all_q(r).expect("r is a monomial")
}
