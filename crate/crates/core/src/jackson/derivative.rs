use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{check_axis, check_base, JacksonError, LatticeFunction, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DilatationVariant {
    Plain,
    Tilde,
}

/// `x` with coordinates `lo..=hi` (1-based) multiplied by `factor`.
fn scaled<S: Scalar>(x: &[S], factor: &S, lo: usize, hi: usize) -> Vec<S> {
    x.iter()
        .enumerate()
        .map(|(k, v)| {
            if (lo..=hi).contains(&(k + 1)) {
                v.clone() * factor.clone()
            } else {
                v.clone()
            }
        })
        .collect()
}

fn prepare<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    i: usize,
    x: &[S],
) -> Result<(), JacksonError> {
    check_base(r)?;
    let n = f.n();
    check_axis(i, n)?;
    if x.len() != n {
        return Err(JacksonError::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if x[i - 1].is_zero() {
        return Err(JacksonError::ZeroCoordinate { axis: i });
    }
    Ok(())
}

/// `[f(x_1..x_i, r x_(i+1)..r x_N) - f(x_1..x_(i-1), r x_i..r x_N)] / ((1-r) x_i)`
pub fn jackson_forward<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    i: usize,
    x: &[S],
) -> Result<S, JacksonError> {
    prepare(f, r, i, x)?;
    let n = f.n();
    let hi = f.eval(&scaled(x, r, i + 1, n))?;
    let lo = f.eval(&scaled(x, r, i, n))?;
    Ok((hi - lo) / ((S::one() - r.clone()) * x[i - 1].clone()))
}

/// `[f(x_1/r..x_i/r, x_(i+1)..x_N) - f(x_1/r..x_(i-1)/r, x_i..x_N)] / ((1/r - 1) x_i)`
pub fn jackson_backward<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    i: usize,
    x: &[S],
) -> Result<S, JacksonError> {
    prepare(f, r, i, x)?;
    let ri = S::one() / r.clone();
    let hi = f.eval(&scaled(x, &ri, 1, i))?;
    let lo = f.eval(&scaled(x, &ri, 1, i - 1))?;
    Ok((hi - lo) / ((ri - S::one()) * x[i - 1].clone()))
}

/// The misprinted variant whose second point is `(x_1/r..x_(i-1)/r, r x_i..r x_N)`.
/// Kept only to show that it disagrees with the one-dimensional derivative.
pub fn jackson_backward_printed<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    i: usize,
    x: &[S],
) -> Result<S, JacksonError> {
    prepare(f, r, i, x)?;
    let n = f.n();
    let ri = S::one() / r.clone();
    let hi = f.eval(&scaled(x, &ri, 1, i))?;
    let lo = f.eval(&scaled(&scaled(x, &ri, 1, i - 1), r, i, n))?;
    Ok((hi - lo) / ((ri - S::one()) * x[i - 1].clone()))
}

/// `∂_i f` as a function.
pub fn forward_fn<S: Scalar>(f: &LatticeFunction<S>, r: &S, i: usize) -> LatticeFunction<S> {
    let (f, r) = (f.clone(), r.clone());
    LatticeFunction::Analytic {
        n: f.n(),
        f: Arc::new(move |x| jackson_forward(&f, &r, i, x)),
    }
}

/// `∂̃_i f` as a function.
pub fn backward_fn<S: Scalar>(f: &LatticeFunction<S>, r: &S, i: usize) -> LatticeFunction<S> {
    let (f, r) = (f.clone(), r.clone());
    LatticeFunction::Analytic {
        n: f.n(),
        f: Arc::new(move |x| jackson_backward(&f, &r, i, x)),
    }
}

/// `[a; r] = (1 - r^a) / (1 - r)`, as a finite geometric sum.
pub fn q_number<S: Scalar>(a: i64, r: &S) -> S {
    if a >= 0 {
        (0..a).fold(S::zero(), |acc, k| acc + r.powi(k))
    } else {
        -(a..0).fold(S::zero(), |acc, k| acc + r.powi(k))
    }
}

fn monomial_coeffs<S: Scalar>(
    f: &LatticeFunction<S>,
) -> Result<&BTreeMap<Vec<u32>, S>, JacksonError> {
    match f {
        LatticeFunction::Monomial { coeffs, .. } => Ok(coeffs),
        other => Err(JacksonError::InvalidLattice(format!(
            "monomial basis required, got {other:?}"
        ))),
    }
}

fn exp_sum(a: &[u32], lo: usize, hi: usize) -> i64 {
    (lo..=hi).map(|j| a[j - 1] as i64).sum()
}

/// Apply a difference quotient `(w_hi - w_lo) / (scale * x_i)` to each monomial.
fn difference_on_monomials<S: Scalar>(
    f: &LatticeFunction<S>,
    i: usize,
    weights: impl Fn(&[u32]) -> (S, S),
    scale: S,
) -> Result<LatticeFunction<S>, JacksonError> {
    let n = f.n();
    check_axis(i, n)?;
    let mut out: BTreeMap<Vec<u32>, S> = BTreeMap::new();
    for (a, c) in monomial_coeffs(f)? {
        let (hi, lo) = weights(a);
        let diff = hi - lo;
        if diff.is_zero() {
            continue;
        }
        // a nonzero difference means a_i >= 1
        let mut b = a.clone();
        b[i - 1] -= 1;
        let slot = out.entry(b).or_insert_with(S::zero);
        *slot = slot.clone() + c.clone() * diff / scale.clone();
    }
    LatticeFunction::monomial(n, out)
}

/// `∂_i` on a monomial-basis function, straight from the difference quotient:
/// `x^a -> (r^(a_(i+1)+..+a_N) - r^(a_i+..+a_N)) / (1-r) x^(a - e_i)`.
pub fn forward_poly<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    i: usize,
) -> Result<LatticeFunction<S>, JacksonError> {
    check_base(r)?;
    let n = f.n();
    difference_on_monomials(
        f,
        i,
        |a| (r.powi(exp_sum(a, i + 1, n)), r.powi(exp_sum(a, i, n))),
        S::one() - r.clone(),
    )
}

/// `∂̃_i` on a monomial-basis function.
pub fn backward_poly<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    i: usize,
) -> Result<LatticeFunction<S>, JacksonError> {
    check_base(r)?;
    difference_on_monomials(
        f,
        i,
        |a| (r.powi(-exp_sum(a, 1, i)), r.powi(-exp_sum(a, 1, i - 1))),
        S::one() / r.clone() - S::one(),
    )
}

/// `A_i f` or `Ã_i f`. Plain takes `i` in `1..=N+1`, tilde `i` in `0..=N`.
pub fn dilatation_apply<S: Scalar>(
    f: &LatticeFunction<S>,
    r: &S,
    i: usize,
    variant: DilatationVariant,
) -> Result<LatticeFunction<S>, JacksonError> {
    check_base(r)?;
    let n = f.n();
    let (lo, hi, factor, step) = match variant {
        DilatationVariant::Plain if (1..=n + 1).contains(&i) => (i, n, r.clone(), -1),
        DilatationVariant::Tilde if i <= n => (1, i, S::one() / r.clone(), 1),
        _ => return Err(JacksonError::AxisOutOfRange { axis: i, n }),
    };
    Ok(match f {
        LatticeFunction::Monomial { coeffs, .. } => {
            let sign = if variant == DilatationVariant::Plain {
                1
            } else {
                -1
            };
            let coeffs = coeffs
                .iter()
                .map(|(a, c)| (a.clone(), c.clone() * r.powi(sign * exp_sum(a, lo, hi))))
                .collect();
            LatticeFunction::Monomial { n, coeffs }
        }
        LatticeFunction::Sampled { lattice, values } => {
            // x_j r = r^-(l_j - 1), x_j / r = r^-(l_j + 1)
            let shift = |l: &[i64]| -> Vec<i64> {
                l.iter()
                    .enumerate()
                    .map(|(k, &v)| {
                        if (lo..=hi).contains(&(k + 1)) {
                            v + step
                        } else {
                            v
                        }
                    })
                    .collect()
            };
            let values: HashMap<_, _> = lattice
                .indices()
                .into_iter()
                .filter_map(|l| values.get(&shift(&l)).map(|v| (l, v.clone())))
                .collect();
            LatticeFunction::Sampled {
                lattice: lattice.clone(),
                values,
            }
        }
        LatticeFunction::Analytic { f, .. } => {
            let f = f.clone();
            LatticeFunction::Analytic {
                n,
                f: Arc::new(move |x| f(&scaled(x, &factor, lo, hi))),
            }
        }
    })
}
