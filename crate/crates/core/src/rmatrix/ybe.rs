use std::collections::BTreeMap;

use rayon::prelude::*;

use super::RMatrix;
use crate::report::{Entry, VerificationReport};
use crate::scalars::LaurentPoly;

type SparseRows = Vec<Vec<(usize, LaurentPoly)>>;

/// Which pair of tensor legs an embedded copy acts on.
#[derive(Clone, Copy)]
enum Legs {
    L12,
    L13,
    L23,
}

/// `R_{legs}` on the `N^3`-dimensional cube, row `(a, b, c)` -> index `(a*N + b)*N + c` (0-based).
fn embed(r: &RMatrix, legs: Legs) -> SparseRows {
    let n = r.n();
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut rows = vec![Vec::new(); n * n * n];
    for ([m, nn, p, s], v) in r.nonzero() {
        let (m, nn, p, s) = (m - 1, nn - 1, p - 1, s - 1);
        for spectator in 0..n {
            let (row, col) = match legs {
                Legs::L12 => (idx(m, nn, spectator), idx(p, s, spectator)),
                Legs::L13 => (idx(m, spectator, nn), idx(p, spectator, s)),
                Legs::L23 => (idx(spectator, m, nn), idx(spectator, p, s)),
            };
            rows[row].push((col, v.clone()));
        }
    }
    rows
}

fn multiply(a: &SparseRows, b: &SparseRows) -> SparseRows {
    a.par_iter()
        .map(|row| {
            let mut acc: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
            for (k, x) in row {
                for (j, y) in &b[*k] {
                    let t = x * y;
                    match acc.get_mut(j) {
                        Some(v) => *v = &*v + &t,
                        None => {
                            acc.insert(*j, t);
                        }
                    }
                }
            }
            acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
        })
        .collect()
}

/// Exact check of `R12 R13 R23 = R23 R13 R12`.
///
/// On failure the report lists up to 64 nonzero residual components by
/// `(a, b, c, d, e, f)` and records the count and largest exponent.
pub fn check_yang_baxter(r: &RMatrix) -> VerificationReport {
    let n = r.n();
    let (r12, r13, r23) = (
        embed(r, Legs::L12),
        embed(r, Legs::L13),
        embed(r, Legs::L23),
    );
    let (lhs, rhs) = rayon::join(
        || multiply(&multiply(&r12, &r13), &r23),
        || multiply(&multiply(&r23, &r13), &r12),
    );

    let zero = LaurentPoly::zero(r.params().universe());
    let mut residuals = Vec::new();
    for (row, (lr, rr)) in lhs.iter().zip(&rhs).enumerate() {
        let mut diff: BTreeMap<usize, LaurentPoly> = lr.iter().cloned().collect();
        for (c, v) in rr {
            let d = diff.get(c).unwrap_or(&zero) - v;
            diff.insert(*c, d);
        }
        for (c, v) in diff {
            if !v.is_zero() {
                residuals.push((row, c, v));
            }
        }
    }

    let unpack = |x: usize| {
        [
            (x / (n * n)) as i64 + 1,
            ((x / n) % n) as i64 + 1,
            (x % n) as i64 + 1,
        ]
    };
    let max_degree = residuals
        .iter()
        .map(|(_, _, v)| v.max_abs_degree())
        .max()
        .unwrap_or(0);
    let mut report = VerificationReport::new("yang_baxter")
        .with_config("family", r.family())
        .with_config("n", n)
        .with_config("nonzero_components", residuals.len())
        .with_config("max_degree", max_degree);
    if residuals.is_empty() {
        report.push(Entry::exact("R12R13R23-R23R13R12", &[], &zero));
    } else {
        for (row, col, v) in residuals.iter().take(64) {
            let mut idx = unpack(*row).to_vec();
            idx.extend(unpack(*col));
            report.push(Entry::exact(format!("component{idx:?}"), &idx, v));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::build_gl_r;
    use crate::scalars::DeformationParams;

    #[test]
    fn gl2_symbolic() {
        let r = build_gl_r(&DeformationParams::symbolic(2)).unwrap();
        assert!(check_yang_baxter(&r).pass);
    }

    #[test]
    fn identity_passes() {
        let r = build_gl_r(&DeformationParams::undeformed(2)).unwrap();
        assert!(check_yang_baxter(&r).pass);
    }

    #[test]
    fn perturbed_entry_fails() {
        let p = DeformationParams::symbolic(2);
        let r = build_gl_r(&p).unwrap();
        let bumped = r.get(1, 2, 1, 2) + &p.one();
        let r = r.with_entry([1, 2, 1, 2], bumped);
        let rep = check_yang_baxter(&r);
        assert!(!rep.pass);
        assert!(rep.config["nonzero_components"] != "0");
    }
}
