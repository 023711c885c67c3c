use serde::Serialize;

use super::TruncatedBasis;
use crate::report::{Entry, VerificationReport};

const LOG_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderSite {
    pub n: usize,
    pub rho: f64,
    /// `tau = ln rho`.
    pub tau: f64,
    /// `tau` in units of the spacing; exactly `n`.
    pub steps: i64,
}

/// Radial sites under `z = e^u`: `tau_N = ln rho_N = N |chi|`.
/// The angular direction stays a Fourier index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderMap {
    pub spacing: f64,
    pub sites: Vec<CylinderSite>,
}

pub fn map_to_cylinder(basis: &TruncatedBasis) -> CylinderMap {
    let spacing = basis.chi().abs();
    let sites = (0..basis.sites())
        .map(|n| CylinderSite {
            n,
            rho: basis.r_pow(-(n as i64)),
            tau: n as f64 * spacing,
            steps: n as i64,
        })
        .collect();
    CylinderMap { spacing, sites }
}

/// Equidistance in exact steps, and `tau_N = ln rho_N` numerically.
pub fn verify_cylinder(basis: &TruncatedBasis) -> VerificationReport {
    let map = map_to_cylinder(basis);
    let mut report = VerificationReport::new("qm_cylinder")
        .with_config("L", basis.sites())
        .with_config("r", basis.r())
        .with_config("spacing", format!("{:.16e}", map.spacing));
    let equidistant = map.sites.windows(2).all(|w| w[1].steps - w[0].steps == 1);
    report.push(Entry::flag(
        "equidistant",
        &[],
        equidistant && map.sites[0].steps == 0,
    ));
    let worst = map
        .sites
        .iter()
        .map(|s| (s.rho.ln() - s.tau).abs() / s.tau.max(1.0))
        .fold(0.0, f64::max);
    report.push(Entry::float("tau = ln rho", &[], worst, LOG_TOL).with_note("max relative error"));
    report
}
