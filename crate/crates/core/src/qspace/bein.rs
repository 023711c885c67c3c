//! Beins for the orthogonal and symplectic series.
//!
//! With `i' = N + 1 - i`, the conditions `e^i e^{i'} = 1` (and for B the
//! middle bein equal to 1) collapse the bein algebra to `k` invertible
//! generators. Consistency of the original relations `e^a e^b = f_ab^2 e^b e^a`
//! with that collapse fixes every twist factor in terms of `f_ij`, `i < j <= k`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::twist::dress;
use super::{CocycleAlgebra, CocycleElement, QSpaceError};
use crate::report::{Entry, VerificationReport};
use crate::scalars::{DeformationParams, LaurentPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    B,
    C,
    D,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::B => "B",
            Series::C => "C",
            Series::D => "D",
        })
    }
}

impl FromStr for Series {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "B" => Ok(Series::B),
            "C" => Ok(Series::C),
            "D" => Ok(Series::D),
            _ => Err(format!("unknown series `{s}`")),
        }
    }
}

impl Series {
    /// Rank `k` for dimension `n`: B needs odd `n = 2k + 1`, C and D even `n = 2k`.
    pub fn rank(self, n: usize) -> Result<usize, QSpaceError> {
        let ok = match self {
            Series::B => n % 2 == 1 && n >= 3,
            Series::C | Series::D => n.is_multiple_of(2) && n >= 2,
        };
        if ok {
            Ok(n / 2)
        } else {
            Err(QSpaceError::SeriesDimensionMismatch { series: self, n })
        }
    }

    /// The fixed middle index `(N+1)/2` of the B series.
    pub fn middle(self, n: usize) -> Option<usize> {
        (self == Series::B).then_some(n.div_ceil(2))
    }
}

/// Result of imposing the orthogonal/symplectic bein conditions.
#[derive(Clone, Debug)]
pub struct BeinConstraints {
    pub series: Series,
    pub n: usize,
    pub rank: usize,
    /// Parameters with every `f_ab` replaced by its induced value.
    pub params: DeformationParams,
    /// The surviving independent pairs `(i, j)`, `i < j <= k`.
    pub free: Vec<(usize, usize)>,
    /// The collapsed algebra on `k` invertible generators.
    pub reduced: Arc<CocycleAlgebra>,
}

impl BeinConstraints {
    /// Exponent vector in the collapsed algebra representing `e^a` (1-based).
    pub fn image(&self, a: usize) -> Vec<i32> {
        image(self.n, self.rank, a)
    }

    pub fn image_element(&self, a: usize) -> CocycleElement {
        CocycleElement::monomial(
            &self.reduced,
            &self.image(a),
            LaurentPoly::one(self.reduced.universe()),
        )
        .expect("beins are invertible")
    }
}

fn image(n: usize, k: usize, a: usize) -> Vec<i32> {
    let mut v = vec![0; k];
    if a <= k {
        v[a - 1] = 1;
    } else if a > n - k {
        v[n - a] = -1;
    }
    v
}

/// Halve every exponent of a monomial with unit coefficient.
fn monomial_sqrt(p: &LaurentPoly) -> Option<LaurentPoly> {
    let (e, c) = p.as_monomial()?;
    if !num_traits::One::is_one(c) || e.iter().any(|k| k % 2 != 0) {
        return None;
    }
    let half: Vec<i32> = e.iter().map(|k| k / 2).collect();
    Some(LaurentPoly::monomial(p.universe(), c.clone(), &half))
}

pub fn bein_constraints(
    params: &DeformationParams,
    series: Series,
) -> Result<BeinConstraints, QSpaceError> {
    let n = params.n();
    let k = series.rank(n)?;
    let reduced = CocycleAlgebra::new(
        params.universe(),
        (1..=k).map(|i| format!("e{i}")).collect(),
        vec![true; k],
        |i, j| {
            let f = params.f(i + 1, j + 1);
            &f * &f
        },
    )?;
    let mut constrained = params.clone();
    for a in 1..=n {
        for b in a + 1..=n {
            let (ia, ib) = (image(n, k, a), image(n, k, b));
            let ratio =
                &reduced.cocycle(&ia, &ib) * &reduced.cocycle(&ib, &ia).inverse_monomial().unwrap();
            let f = monomial_sqrt(&ratio).ok_or(QSpaceError::BadCommutationFactor(a, b))?;
            constrained = constrained.with_f(a, b, f).expect("monomial");
        }
    }
    let free = (1..=k)
        .flat_map(|i| (i + 1..=k).map(move |j| (i, j)))
        .collect();
    Ok(BeinConstraints {
        series,
        n,
        rank: k,
        params: constrained,
        free,
        reduced,
    })
}

/// Closed form of the induced factors, stated independently of the collapse.
fn rule(
    params: &DeformationParams,
    n: usize,
    k: usize,
    a: usize,
    b: usize,
) -> (LaurentPoly, &'static str) {
    let low = |x: usize| x <= k;
    let high = |x: usize| x > n - k;
    let prime = |x: usize| n + 1 - x;
    if !(low(a) || high(a)) || !(low(b) || high(b)) {
        return (params.one(), "middle bein is 1");
    }
    match (low(a), low(b)) {
        (true, true) => (params.f(a, b), "free"),
        (false, false) => (params.f(prime(a), prime(b)), "f_{i'j'} = f_ij"),
        (true, false) if a == prime(b) => (params.one(), "f_{ii'} = 1"),
        (false, true) if b == prime(a) => (params.one(), "f_{ii'} = 1"),
        (true, false) => (params.f(prime(b), a), "f_{ij'} = f_ji"),
        (false, true) => (params.f(b, prime(a)), "f_{i'j} = f_ji"),
    }
}

/// Impose the bein conditions for a B, C or D series and check that
/// the quadratic length form is unchanged by the frame change.
pub fn verify_bein_constraints_bcd(
    params: &DeformationParams,
    series: Series,
) -> Result<VerificationReport, QSpaceError> {
    let c = bein_constraints(params, series)?;
    let (n, k) = (c.n, c.rank);
    let mut report = VerificationReport::new("bein_constraints")
        .with_config("series", series)
        .with_config("n", n)
        .with_config("rank", k)
        .with_config("free_parameters", c.free.len());

    // induced factors against their closed form
    for a in 1..=n {
        for b in a + 1..=n {
            let (expected, label) = rule(params, n, k, a, b);
            let res = &c.params.f(a, b) - &expected;
            report.push(
                Entry::exact(format!("f_{a}{b}"), &[a as i64, b as i64], &res).with_note(label),
            );
        }
    }

    // the original relations hold in the collapsed algebra
    for a in 1..=n {
        for b in a + 1..=n {
            let (ea, eb) = (c.image_element(a), c.image_element(b));
            let f = c.params.f(a, b);
            let res = &(&ea * &eb) - &(&eb * &ea).scale(&(&f * &f));
            report.push(res.residual_entry(format!("e{a}*e{b}"), &[a as i64, b as i64]));
        }
    }

    let one = CocycleElement::one(&c.reduced);
    for i in 1..=k {
        let ip = n + 1 - i;
        let prod = &c.image_element(i) * &c.image_element(ip);
        let back = &c.image_element(ip) * &c.image_element(i);
        report.push((&prod - &one).residual_entry(format!("e{i}*e{ip}=1"), &[i as i64, ip as i64]));
        report.push((&back - &one).residual_entry(format!("e{ip}*e{i}=1"), &[ip as i64, i as i64]));
    }
    if let Some(mid) = series.middle(n) {
        let res = &c.image_element(mid) - &one;
        report.push(res.residual_entry(format!("e{mid}=1"), &[mid as i64]));
    }

    // length form sum_i l_i x^{i'} x^i, before and after dressing
    let d = dress(&c.params, &c.reduced, |_, i| c.image_element(i + 1));
    let mut plain = CocycleElement::zero(&d.algebra);
    let mut dressed = CocycleElement::zero(&d.algebra);
    for i in 1..=n {
        let ip = n + 1 - i;
        let l = c.params.l(i);
        plain = &plain + &(&d.x[ip - 1] * &d.x[i - 1]).scale(&l);
        dressed = &dressed + &(&d.xt[ip - 1] * &d.xt[i - 1]).scale(&l);
    }
    report.push((&dressed - &plain).residual_entry("length_form", &[]));

    report.push(
        Entry::flag(
            "free_parameters",
            &[c.free.len() as i64],
            c.free.len() == k * (k.saturating_sub(1)) / 2,
        )
        .with_note(format!("k = {k}, free pairs {:?}", c.free)),
    );
    Ok(report)
}
