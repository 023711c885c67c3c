//! Parameters shared by the command line and TOML config files.
//!
//! Every flag can also be set in a config file, either at top level or in
//! a section named after the command group (`[rmat]`, `[twist]`, `[alg]`,
//! `[jackson]`, `[qm]`). Flags win over the section, the section wins over
//! top-level keys. Unknown keys or sections are errors.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use qbein_core::scalars::parse_rational;
use serde::{Deserialize, Deserializer, Serialize};

pub const SECTIONS: [&str; 5] = ["rmat", "twist", "alg", "jackson", "qm"];

/// Exact rational written as `a`, `a/b` or a finite decimal.
#[derive(Clone, Debug, PartialEq)]
pub struct Rat(pub BigRational);

impl FromStr for Rat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_rational(s)
            .map(Rat)
            .ok_or_else(|| format!("`{s}` is not a rational number"))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(Rat(BigRational::from_integer(k.into()))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Float(x) => Err(serde::de::Error::custom(format!(
                "write rationals as strings, e.g. \"{x}\" or \"1/2\""
            ))),
        }
    }
}

/// Real number accepted as a TOML integer, float or string.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Real(pub f64);

impl FromStr for Real {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let x: f64 = match parse_rational(s) {
            Some(q) => q.to_f64().unwrap_or(f64::NAN),
            None => s
                .trim()
                .parse()
                .map_err(|_| format!("`{s}` is not a number"))?,
        };
        if x.is_finite() {
            Ok(Real(x))
        } else {
            Err(format!("`{s}` is not finite"))
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(Real(k as f64)),
            Raw::Float(x) => Ok(Real(x)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Dimension N
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Deformation base r in (0, 1], e.g. 1/2 or 0.9
    #[arg(long, global = true)]
    pub r: Option<Rat>,
    /// Lattice sites
    #[arg(long = "L", global = true)]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    /// Largest angular mode |m|
    #[arg(long = "M", global = true)]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    /// cyclic or open
    #[arg(long, global = true)]
    pub boundary: Option<String>,
    #[arg(long, global = true)]
    pub omega: Option<Real>,
    /// Infrared regulator mu^2
    #[arg(long, global = true)]
    pub mu2: Option<Real>,
    #[arg(long, global = true)]
    pub tol: Option<Real>,
    /// Hamiltonian: H (log form) or h (shift form)
    #[arg(long, global = true)]
    pub which: Option<String>,
    /// GL, B, C or D
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// B, C or D
    #[arg(long, global = true)]
    pub series: Option<String>,
    /// amended or printed B/C/D R-matrix
    #[arg(long, global = true)]
    pub form: Option<String>,
    /// B/C/D convention `rho_i`, comma separated (defaults per series)
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub rho: Option<Vec<Rat>>,
    /// B/C/D convention `eps_i` in {1, -1}, comma separated
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub eps: Option<Vec<i32>>,
    /// Apply the twist before checking
    #[arg(long, global = true)]
    pub twisted: Option<bool>,
    /// Relation suite name, `involution`, `subgroup` or `all`
    #[arg(long, global = true)]
    pub suite: Option<String>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Upper summation index K of a Jackson integral
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<i64>,
    /// Axis i of a Jackson derivative (1-based)
    #[arg(long, global = true)]
    pub axis: Option<usize>,
    /// forward (fwd), backward (bwd) or backward-printed
    #[arg(long, global = true)]
    pub dir: Option<String>,
    /// Polynomial as JSON {"exponents": "coefficient"} or sum, product, square
    #[arg(long, global = true)]
    pub func: Option<String>,
    /// Lattice exponents range for sampling
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lmin: Option<i64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lmax: Option<i64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here and a manifest beside it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Params {
    /// Fill every unset field of `self` from `fallback`.
    pub fn or(self, fallback: &Params) -> Params {
        let mut merged = fallback.clone();
        let top = &self;
        overlay!(merged, top; n, r, l, m, boundary, omega, mu2, tol, which, family, series, form, rho, eps,
            twisted, suite, trials, seed, k, axis, dir, func, lmin, lmax, format, out);
        merged
    }
}

/// Top-level keys merged with the section for `group`.
pub fn load_config(path: &Path, group: &str) -> Result<Params, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text, group).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse_config(text: &str, group: &str) -> Result<Params, String> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
    let mut top = toml::Table::new();
    let mut section = None;
    for (key, value) in table {
        match value {
            toml::Value::Table(t) => {
                if !SECTIONS.contains(&key.as_str()) {
                    return Err(format!("unknown section [{key}]"));
                }
                let p: Params = t
                    .try_into()
                    .map_err(|e: toml::de::Error| format!("[{key}]: {e}"))?;
                if key == group {
                    section = Some(p);
                }
            }
            other => {
                top.insert(key, other);
            }
        }
    }
    let top: Params = top.try_into().map_err(|e: toml::de::Error| e.to_string())?;
    Ok(match section {
        Some(s) => s.or(&top),
        None => top,
    })
}
