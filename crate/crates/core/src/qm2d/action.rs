use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{hamiltonian, Hamiltonian, QmError, TruncatedBasis};

type Field = BTreeMap<i64, Vec<Complex64>>;

fn check_field(basis: &TruncatedBasis, field: &Field) -> Result<Vec<Complex64>, QmError> {
    let mut full = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (&m, comp) in field {
        basis.check_mode(m)?;
        if comp.len() != basis.sites() {
            return Err(QmError::ShapeMismatch {
                m,
                expected: basis.sites(),
                got: comp.len(),
            });
        }
        for (n, v) in comp.iter().enumerate() {
            full[basis.index(n, m).unwrap()] = *v;
        }
    }
    Ok(full)
}

/// Jackson weight `(1-r) r^-N` of radial site `N`.
fn weights(basis: &TruncatedBasis) -> Vec<f64> {
    let w = 1.0 - basis.r_f64();
    (0..basis.sites())
        .map(|n| w * basis.r_pow::<f64>(-(n as i64)))
        .collect()
}

/// `sum_m sum_N W_N f_(-m)(N) g_m(N)` over full-basis vectors.
fn pair(basis: &TruncatedBasis, f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let w = weights(basis);
    basis
        .modes()
        .flat_map(|m| (0..basis.sites()).map(move |n| (n, m)))
        .map(|(n, m)| {
            let a = f[basis.index(n, -m).unwrap()];
            let b = g[basis.index(n, m).unwrap()];
            w[n] * a * b
        })
        .sum()
}

/// Bilinear Jackson pairing `sum_m sum_N W_N Psi_(-m)(N) Psi_m(N)`.
///
/// For a real field, `Psi_(-m) = conj(Psi_m)`, this is the Jackson norm
/// `sum W |Psi|^2`.
pub fn jackson_pairing(basis: &TruncatedBasis, field: &Field) -> Result<Complex64, QmError> {
    let v = check_field(basis, field)?;
    Ok(pair(basis, &v, &v))
}

/// `S = sum_m sum_N W_N Psi_(-m)(N) (G^-1 Psi_m)(N)` with `G^-1 = H / Omega`.
///
/// Modes missing from `field` are zero.
pub fn free_action(
    basis: &TruncatedBasis,
    field: &Field,
    omega: f64,
) -> Result<Complex64, QmError> {
    let v = check_field(basis, field)?;
    let g = hamiltonian(basis, Hamiltonian::Log, omega)?.scale(&(1.0 / omega));
    let gv = g.map(|x| Complex64::new(*x, 0.0)).apply(&v);
    Ok(pair(basis, &v, &gv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qm2d::Boundary;

    #[test]
    fn constant_zero_mode_has_no_action() {
        let b = TruncatedBasis::with_f64(6, 1, Boundary::Cyclic, 0.5).unwrap();
        let field = Field::from([(0, vec![Complex64::new(1.5, 0.0); 6])]);
        assert!(free_action(&b, &field, 2.0).unwrap().norm() < 1e-12);
        let norm = jackson_pairing(&b, &field).unwrap();
        let expect: f64 = (0..6).map(|n| 0.5 * 2f64.powi(n) * 2.25).sum();
        assert!((norm.re - expect).abs() < 1e-12 && norm.im == 0.0);
    }

    #[test]
    fn shape_checked() {
        let b = TruncatedBasis::with_f64(6, 1, Boundary::Cyclic, 0.5).unwrap();
        let field = Field::from([(1, vec![Complex64::new(1.0, 0.0); 5])]);
        assert_eq!(
            free_action(&b, &field, 1.0),
            Err(QmError::ShapeMismatch {
                m: 1,
                expected: 6,
                got: 5
            })
        );
        let far = Field::from([(2, vec![Complex64::new(1.0, 0.0); 6])]);
        assert!(matches!(
            free_action(&b, &far, 1.0),
            Err(QmError::ModeOutOfRange { .. })
        ));
    }
}
