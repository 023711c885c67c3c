use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_basic_ops, Boundary, OpTag, QmError, SparseOp, TruncatedBasis};
use crate::report::{Entry, VerificationReport};

/// Relative tolerance between diagonalized and closed-form eigenvalues.
pub const SPECTRUM_TOL: f64 = 1e-10;
const GRID_TOL: f64 = 1e-9;

/// The two Hamiltonians of the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hamiltonian {
    /// `(1-A)(1-A^+) + (1-B)^2`, eigenvalues `xi`.
    #[serde(rename = "h")]
    Shift,
    /// `(1-A)(1-A^+) + ln^2 B`, eigenvalues `lambda`.
    #[serde(rename = "H")]
    Log,
}

impl std::str::FromStr for Hamiltonian {
    type Err = QmError;
    fn from_str(s: &str) -> Result<Self, QmError> {
        match s {
            "h" => Ok(Hamiltonian::Shift),
            "H" => Ok(Hamiltonian::Log),
            _ => Err(QmError::Parse(format!(
                "unknown Hamiltonian `{s}`, expected h or H"
            ))),
        }
    }
}

impl std::fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Hamiltonian::Shift => "h",
            Hamiltonian::Log => "H",
        })
    }
}

/// `[m; r] = (1 - r^m) / (1 - r)`.
pub fn q_bracket(m: i64, r: f64) -> f64 {
    (1.0 - r.powi(m as i32)) / (1.0 - r)
}

fn kinetic(r: f64, p: f64) -> f64 {
    1.0 - (r.ln() * p).cos()
}

/// `[2(1 - cos chi P) + chi^2 m^2] / (1-r)^2`, the spectrum of `H / Omega`.
pub fn lambda_operator(r: f64, p: f64, m: i64) -> f64 {
    let chi = r.ln();
    (2.0 * kinetic(r, p) + chi * chi * (m * m) as f64) / (1.0 - r).powi(2)
}

/// The printed form, with coefficient 1 on the kinetic term.
pub fn lambda_printed(r: f64, p: f64, m: i64) -> f64 {
    let chi = r.ln();
    (kinetic(r, p) + chi * chi * (m * m) as f64) / (1.0 - r).powi(2)
}

/// `[2(1 - cos chi P) + (1 - r^-m)^2] / (1-r)^2`, the spectrum of `h / Omega`.
pub fn xi_operator(r: f64, p: f64, m: i64) -> f64 {
    (2.0 * kinetic(r, p) + (1.0 - r.powi(-m as i32)).powi(2)) / (1.0 - r).powi(2)
}

/// The printed form `(1 - cos chi P)/(1-r)^2 + [m; r]^2`.
pub fn xi_printed(r: f64, p: f64, m: i64) -> f64 {
    kinetic(r, p) / (1.0 - r).powi(2) + q_bracket(m, r).powi(2)
}

/// Distance of `lambda_operator` from its continuum value `P^2 + m^2`.
pub fn continuum_error(r: f64, p: f64, m: i64) -> f64 {
    (lambda_operator(r, p, m) - (p * p + (m * m) as f64)).abs()
}

fn require_cyclic(basis: &TruncatedBasis, what: &'static str) -> Result<(), QmError> {
    match basis.boundary() {
        Boundary::Cyclic => Ok(()),
        Boundary::Open => Err(QmError::NeedsCyclic(what)),
    }
}

/// `Omega/(1-r)^2 [(1-A)(1-A^+) + D]` with `D = (1-B)^2` or `ln^2 B`.
pub fn hamiltonian(
    basis: &TruncatedBasis,
    which: Hamiltonian,
    omega: f64,
) -> Result<SparseOp<f64>, QmError> {
    require_cyclic(basis, "hamiltonian")?;
    let ops = build_basic_ops::<f64>(basis);
    let one = SparseOp::identity(basis.dim());
    let kinetic = &(&one - &ops.a) * &(&one - &ops.a.adjoint());
    let chi = basis.chi();
    let potential = SparseOp::diagonal((0..basis.dim()).map(|i| {
        let m = basis.label(i).1;
        match which {
            Hamiltonian::Shift => (1.0 - basis.r_pow::<f64>(-m)).powi(2),
            // ln B = -m chi on the diagonal
            Hamiltonian::Log => (m as f64 * chi).powi(2),
        }
    }));
    let scale = omega / (1.0 - basis.r_f64()).powi(2);
    Ok((&kinetic + &potential)
        .scale(&scale)
        .with_tag(OpTag::Hermitian))
}

/// `P_k = 2 pi k / (L |chi|)`.
fn momentum(basis: &TruncatedBasis, k: usize) -> f64 {
    2.0 * PI * k as f64 / (basis.sites() as f64 * basis.chi().abs())
}

/// `|P_k, m>` with components `e^(-i N P chi) / sqrt(L)` on the `m` block.
pub fn plane_wave_k(basis: &TruncatedBasis, k: usize, m: i64) -> Result<Vec<Complex64>, QmError> {
    require_cyclic(basis, "plane_wave")?;
    basis.check_mode(m)?;
    let l = basis.sites();
    let norm = 1.0 / (l as f64).sqrt();
    let mut v = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for n in 0..l {
        // N P chi = -2 pi k N / L exactly on the grid
        let phase = 2.0 * PI * ((k * n) % l) as f64 / l as f64;
        v[basis.index(n, m).unwrap()] = Complex64::from_polar(norm, phase);
    }
    Ok(v)
}

/// Plane wave at a real momentum, which must lie on the cyclic grid.
pub fn plane_wave(basis: &TruncatedBasis, p: f64, m: i64) -> Result<Vec<Complex64>, QmError> {
    require_cyclic(basis, "plane_wave")?;
    let l = basis.sites() as f64;
    let k = p * l * basis.chi().abs() / (2.0 * PI);
    let nearest = k.round();
    if !(k - nearest).abs().le(&GRID_TOL) || nearest < 0.0 {
        return Err(QmError::OffGridMomentum { p });
    }
    plane_wave_k(basis, nearest as usize % basis.sites(), m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: usize,
    #[serde(rename = "P")]
    pub p: f64,
    pub m: i64,
    /// Index of the eigenvector within its `m` block.
    pub vector: usize,
    pub eigenvalue: f64,
    pub lambda_operator: f64,
    pub lambda_printed: f64,
    pub xi_operator: f64,
    pub xi_printed: f64,
}

/// Diagonalized spectrum; analytic columns already include `Omega`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    pub which: Hamiltonian,
    pub omega: f64,
    pub r: f64,
    pub chi: f64,
    pub l: usize,
    pub m_max: usize,
    pub rows: Vec<SpectrumRow>,
}

fn block(h: &SparseOp<f64>, basis: &TruncatedBasis, m: i64) -> DMatrix<f64> {
    let l = basis.sites();
    let start = basis.index(0, m).unwrap();
    let mut mat = DMatrix::zeros(l, l);
    for (&(a, b), v) in h.entries() {
        if (start..start + l).contains(&a) {
            assert!(
                (start..start + l).contains(&b),
                "Hamiltonian couples different m"
            );
            mat[(a - start, b - start)] = *v;
        }
    }
    mat
}

pub fn spectrum(
    basis: &TruncatedBasis,
    which: Hamiltonian,
    omega: f64,
) -> Result<SpectrumResult, QmError> {
    let h = hamiltonian(basis, which, omega)?;
    let r = basis.r_f64();
    let modes: Vec<i64> = basis.modes().collect();
    let rows: Vec<Vec<SpectrumRow>> = modes
        .par_iter()
        .map(|&m| {
            let mut numeric: Vec<(usize, f64)> = SymmetricEigen::new(block(&h, basis, m))
                .eigenvalues
                .iter()
                .copied()
                .enumerate()
                .collect();
            numeric.sort_by(|a, b| a.1.total_cmp(&b.1));
            let mut analytic: Vec<SpectrumRow> = (0..basis.sites())
                .map(|k| {
                    let p = momentum(basis, k);
                    SpectrumRow {
                        k,
                        p,
                        m,
                        vector: 0,
                        eigenvalue: 0.0,
                        lambda_operator: omega * lambda_operator(r, p, m),
                        lambda_printed: omega * lambda_printed(r, p, m),
                        xi_operator: omega * xi_operator(r, p, m),
                        xi_printed: omega * xi_printed(r, p, m),
                    }
                })
                .collect();
            let key = |row: &SpectrumRow| match which {
                Hamiltonian::Shift => row.xi_operator,
                Hamiltonian::Log => row.lambda_operator,
            };
            analytic.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.k.cmp(&b.k)));
            for (row, (vector, value)) in analytic.iter_mut().zip(numeric) {
                row.vector = vector;
                row.eigenvalue = value;
            }
            analytic.sort_by_key(|row| row.k);
            analytic
        })
        .collect();
    Ok(SpectrumResult {
        which,
        omega,
        r,
        chi: basis.chi(),
        l: basis.sites(),
        m_max: basis.max_mode(),
        rows: rows.into_iter().flatten().collect(),
    })
}

impl SpectrumRow {
    /// The closed-form eigenvalue matching `which`.
    pub fn analytic(&self, which: Hamiltonian) -> f64 {
        match which {
            Hamiltonian::Shift => self.xi_operator,
            Hamiltonian::Log => self.lambda_operator,
        }
    }
}

impl SpectrumResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.metadata() {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "k",
            "P",
            "m",
            "vector",
            "eigenvalue",
            "lambda_operator",
            "lambda_printed",
            "xi_operator",
            "xi_printed",
        ])
        .unwrap();
        let f = |v: f64| format!("{v:.16e}");
        for row in &self.rows {
            w.write_record([
                row.k.to_string(),
                f(row.p),
                row.m.to_string(),
                row.vector.to_string(),
                f(row.eigenvalue),
                f(row.lambda_operator),
                f(row.lambda_printed),
                f(row.xi_operator),
                f(row.xi_printed),
            ])
            .unwrap();
        }
        out.push_str(&String::from_utf8(w.into_inner().unwrap()).unwrap());
        out
    }

    fn metadata(&self) -> BTreeMap<&'static str, String> {
        BTreeMap::from([
            ("which", self.which.to_string()),
            ("omega", format!("{:.16e}", self.omega)),
            ("r", format!("{:.16e}", self.r)),
            ("chi", format!("{:.16e}", self.chi)),
            ("L", self.l.to_string()),
            ("M", self.m_max.to_string()),
        ])
    }

    pub fn from_csv(text: &str) -> Result<Self, QmError> {
        let bad = |e: &dyn std::fmt::Display| QmError::Parse(e.to_string());
        let mut meta = BTreeMap::new();
        let mut body = String::new();
        for line in text.lines() {
            match line.strip_prefix("# ") {
                Some(kv) => {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| bad(&format!("metadata `{kv}`")))?;
                    meta.insert(k.to_string(), v.to_string());
                }
                None => {
                    body.push_str(line);
                    body.push('\n');
                }
            }
        }
        let get = |k: &str| {
            meta.get(k)
                .ok_or_else(|| bad(&format!("missing metadata `{k}`")))
        };
        let num = |k: &str| get(k)?.parse::<f64>().map_err(|e| bad(&e));
        let int = |k: &str| get(k)?.parse::<usize>().map_err(|e| bad(&e));
        let rows = csv::Reader::from_reader(body.as_bytes())
            .deserialize()
            .collect::<Result<Vec<SpectrumRow>, _>>()
            .map_err(|e| bad(&e))?;
        Ok(SpectrumResult {
            which: get("which")?.parse()?,
            omega: num("omega")?,
            r: num("r")?,
            chi: num("chi")?,
            l: int("L")?,
            m_max: int("M")?,
            rows,
        })
    }
}

/// Per `m`, the largest `|numeric - analytic| / max(|analytic|, Omega)`.
///
/// The floor at `Omega` keeps the zero mode from dividing by zero.
pub fn verify_spectrum(result: &SpectrumResult) -> VerificationReport {
    let mut worst: BTreeMap<i64, f64> = BTreeMap::new();
    for row in &result.rows {
        let exact = row.analytic(result.which);
        let err = (row.eigenvalue - exact).abs() / exact.abs().max(result.omega.abs());
        let e = worst.entry(row.m).or_insert(0.0);
        *e = e.max(err);
    }
    let mut report = VerificationReport::new("qm_spectrum")
        .with_config("which", result.which)
        .with_config("L", result.l)
        .with_config("M", result.m_max)
        .with_config("r", format!("{:.16e}", result.r))
        .with_config("omega", format!("{:.16e}", result.omega))
        .with_config("tolerance", SPECTRUM_TOL);
    for (m, err) in worst {
        report.push(
            Entry::float(format!("m={m}"), &[m], err, SPECTRUM_TOL).with_note("max relative error"),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mode() {
        let b = TruncatedBasis::with_f64(8, 1, Boundary::Cyclic, 0.5).unwrap();
        let s = spectrum(&b, Hamiltonian::Log, 1.0).unwrap();
        let row = s.rows.iter().find(|r| r.k == 0 && r.m == 0).unwrap();
        assert!(row.eigenvalue.abs() < 1e-12 && row.lambda_operator == 0.0);
        assert!(verify_spectrum(&s).pass);
    }

    #[test]
    fn open_boundary_rejected() {
        let b = TruncatedBasis::with_f64(4, 0, Boundary::Open, 0.5).unwrap();
        assert!(matches!(
            hamiltonian(&b, Hamiltonian::Log, 1.0),
            Err(QmError::NeedsCyclic(_))
        ));
        assert!(plane_wave_k(&b, 0, 0).is_err());
    }

    #[test]
    fn off_grid_momentum() {
        let b = TruncatedBasis::with_f64(4, 0, Boundary::Cyclic, 0.5).unwrap();
        let p = momentum(&b, 1);
        assert!(plane_wave(&b, p, 0).is_ok());
        assert_eq!(
            plane_wave(&b, 0.5 * p, 0),
            Err(QmError::OffGridMomentum { p: 0.5 * p })
        );
        assert!(matches!(
            plane_wave(&b, p, 1),
            Err(QmError::ModeOutOfRange { .. })
        ));
    }

    #[test]
    fn hamiltonian_parse() {
        assert_eq!("h".parse::<Hamiltonian>().unwrap(), Hamiltonian::Shift);
        assert_eq!(Hamiltonian::Log.to_string(), "H");
        assert!("x".parse::<Hamiltonian>().is_err());
    }
}
