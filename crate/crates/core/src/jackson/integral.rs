use super::{check_base, JacksonError, LatticeFunction, Scalar};

pub const DEFAULT_INTEGRAL_TOL: f64 = 1e-15;

const MAX_TERMS: usize = 200_000;
const QUIET_RUN: usize = 5;
const GROWTH_RUN: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct JacksonIntegral<S> {
    pub value: S,
    /// Geometric estimate of the omitted tail.
    pub tail_bound: f64,
    pub terms: usize,
}

/// `(1-r) sum_(l <= K) r^-l f(r^-l)` for a one-variable function.
///
/// Summation runs from `l = K` downwards and stops once `QUIET_RUN`
/// consecutive terms fall below `tol` times the partial sum.
pub fn jackson_integral<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    k: i64,
    tol: f64,
) -> Result<JacksonIntegral<S>, JacksonError> {
    check_base(r)?;
    if f.n() != 1 {
        return Err(JacksonError::DimensionMismatch {
            expected: 1,
            got: f.n(),
        });
    }
    let weight = S::one() - r.clone();
    let mut sum = S::zero();
    let (mut quiet, mut growing) = (0, 0);
    let mut last = 0.0f64;
    for count in 1..=MAX_TERMS {
        let l = k - (count as i64 - 1);
        let x = r.powi(-l);
        let term = weight.clone() * x.clone() * f.eval(&[x])?;
        let mag = term.magnitude();
        if !mag.is_finite() {
            return Err(JacksonError::TailDivergence { terms: count });
        }
        sum = sum + term;
        growing = if mag > last && last > 0.0 {
            growing + 1
        } else {
            0
        };
        if growing >= GROWTH_RUN {
            return Err(JacksonError::TailDivergence { terms: count });
        }
        quiet = if mag <= tol * sum.magnitude() {
            quiet + 1
        } else {
            0
        };
        let prev = last;
        last = mag;
        if quiet >= QUIET_RUN {
            let ratio = if prev > 0.0 { last / prev } else { 0.0 };
            let tail_bound = if last == 0.0 {
                0.0
            } else if ratio < 1.0 {
                last * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            return Ok(JacksonIntegral {
                value: sum,
                tail_bound,
                terms: count,
            });
        }
    }
    Err(JacksonError::TailDivergence { terms: MAX_TERMS })
}

/// Closed form for a polynomial in one variable:
/// `sum_k c_k (1-r) r^(-K(k+1)) / (1 - r^(k+1))`.
pub fn jackson_integral_exact<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    k: i64,
) -> Result<S, JacksonError> {
    check_base(r)?;
    let coeffs = match f {
        LatticeFunction::Monomial { n: 1, coeffs } => coeffs,
        LatticeFunction::Monomial { n, .. } => {
            return Err(JacksonError::DimensionMismatch {
                expected: 1,
                got: *n,
            })
        }
        other => {
            return Err(JacksonError::InvalidLattice(format!(
                "monomial basis required, got {other:?}"
            )))
        }
    };
    let one = S::one();
    Ok(coeffs.iter().fold(S::zero(), |acc, (a, c)| {
        let p = a[0] as i64 + 1;
        acc + c.clone() * (one.clone() - r.clone()) * r.powi(-k * p) / (one.clone() - r.powi(p))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn identity_integrand() {
        let r = BigRational::new(1.into(), 3.into());
        let f = LatticeFunction::single(BigRational::from_integer(1.into()), &[1]);
        for k in [-2, 0, 3] {
            let exact = jackson_integral_exact(&f, &r, k).unwrap();
            let expect = r.powi(-2 * k) / (BigRational::from_integer(1.into()) + r.clone());
            assert_eq!(exact, expect);
        }
        let g = LatticeFunction::single(1.0, &[1]);
        let num = jackson_integral(&g, &(1.0 / 3.0), 2, DEFAULT_INTEGRAL_TOL).unwrap();
        let expect = 3f64.powi(4) / (1.0 + 1.0 / 3.0);
        assert!((num.value - expect).abs() <= 1e-13 * expect, "{num:?}");
        assert!(num.tail_bound <= 1e-13 * expect);
    }

    #[test]
    fn zero_integrand() {
        let f = LatticeFunction::analytic(1, |_: &[f64]| 0.0);
        let out = jackson_integral(&f, &0.5, 4, DEFAULT_INTEGRAL_TOL).unwrap();
        assert_eq!((out.value, out.tail_bound), (0.0, 0.0));
    }

    #[test]
    fn singular_integrand_diverges() {
        let f = LatticeFunction::analytic(1, |x: &[f64]| 1.0 / (x[0] * x[0]));
        assert!(matches!(
            jackson_integral(&f, &0.5, 0, 1e-12),
            Err(JacksonError::TailDivergence { .. })
        ));
        assert!(matches!(
            jackson_integral(&f, &0.99, 0, 1e-12),
            Err(JacksonError::TailDivergence { .. })
        ));
    }

    #[test]
    fn rejects_several_variables() {
        let f = LatticeFunction::single(1.0, &[1, 1]);
        assert!(jackson_integral(&f, &0.5, 0, 1e-12).is_err());
        assert!(jackson_integral_exact(&f, &0.5, 0).is_err());
    }
}
