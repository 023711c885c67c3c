use std::f64::consts::PI;

use rayon::prelude::*;

use super::{lambda_operator, QmError};
use crate::jackson::check_base;

const MAX_DEPTH: u32 = 60;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceConfig {
    pub r: f64,
    /// Infrared regulator added to every eigenvalue.
    pub mu2: f64,
    pub m_max: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceResult {
    pub value: f64,
    /// Upper bound on the omitted `|m| > M` terms.
    pub tail_bound: f64,
    /// `(m, integral)` in increasing `m`.
    pub per_m: Vec<(i64, f64)>,
}

/// `int_0^(pi/|chi|) dP / (lambda_(P,m) + mu^2)` by adaptive Simpson.
pub fn trace_term(r: f64, mu2: f64, m: i64, tol: f64) -> Result<f64, QmError> {
    check_base(&r).map_err(|e| QmError::InvalidBasis(e.to_string()))?;
    if m == 0 && mu2 <= 0.0 {
        return Err(QmError::InfraredDivergence);
    }
    let f = |p: f64| 1.0 / (lambda_operator(r, p, m) + mu2);
    let b = PI / r.ln().abs();
    // the integrand peaks at P = 0; a coarse estimate sets the absolute target
    let (fa, fm, fb) = (f(0.0), f(b / 2.0), f(b));
    let whole = simpson(0.0, b, fa, fm, fb);
    let target = tol * whole.abs().max(f64::MIN_POSITIVE);
    adaptive(&f, 0.0, b, fa, fm, fb, whole, target, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64, QmError> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || !delta.is_finite() {
        return Err(QmError::QuadratureFailed { a, b });
    }
    Ok(adaptive(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)?
        + adaptive(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)?)
}

/// Closed form `pi / (|chi| sqrt(a^2 - b^2))` with
/// `a = (2 + chi^2 m^2)/(1-r)^2 + mu^2`, `b = 2/(1-r)^2`.
pub fn trace_term_closed(r: f64, mu2: f64, m: i64) -> f64 {
    let chi = r.ln();
    let s = (1.0 - r).powi(2);
    let a = (2.0 + chi * chi * (m * m) as f64) / s + mu2;
    let b = 2.0 / s;
    PI / (chi.abs() * ((a - b) * (a + b)).sqrt())
}

/// Sum of `trace_term` over `|m| <= M` and a bound on the rest.
///
/// Every omitted term is at most `(pi/|chi|) (1-r)^2 / (chi^2 m^2)`, and
/// `sum_(|m| > M) 1/m^2 < 2/M`.
pub fn one_loop_trace(cfg: &TraceConfig) -> Result<TraceResult, QmError> {
    if cfg.mu2 < 0.0 {
        return Err(QmError::InvalidBasis(format!(
            "mu^2 must be >= 0, got {}",
            cfg.mu2
        )));
    }
    let modes: Vec<i64> = (-(cfg.m_max as i64)..=cfg.m_max as i64).collect();
    let per_m = modes
        .par_iter()
        .map(|&m| trace_term(cfg.r, cfg.mu2, m, cfg.tol).map(|v| (m, v)))
        .collect::<Result<Vec<_>, _>>()?;
    let chi = cfg.r.ln();
    let tail_bound = if cfg.m_max == 0 {
        f64::INFINITY
    } else {
        PI / chi.abs() * (1.0 - cfg.r).powi(2) / (chi * chi) * 2.0 / cfg.m_max as f64
    };
    Ok(TraceResult {
        value: per_m.iter().map(|(_, v)| v).sum(),
        tail_bound,
        per_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_matches_closed_form() {
        for (r, mu2, m) in [(0.5, 0.01, 0), (0.5, 0.0, 3), (0.9, 1.0, -2), (0.2, 0.5, 7)] {
            let num = trace_term(r, mu2, m, 1e-12).unwrap();
            let exact = trace_term_closed(r, mu2, m);
            assert!(
                (num - exact).abs() <= 1e-10 * exact,
                "{r} {mu2} {m}: {num} vs {exact}"
            );
        }
    }

    #[test]
    fn infrared() {
        assert_eq!(
            trace_term(0.5, 0.0, 0, 1e-10),
            Err(QmError::InfraredDivergence)
        );
        let cfg = TraceConfig {
            r: 0.5,
            mu2: 0.0,
            m_max: 2,
            tol: 1e-10,
        };
        assert_eq!(one_loop_trace(&cfg), Err(QmError::InfraredDivergence));
    }
}
