//! Machine-readable verification reports.
//!
//! Field order is alphabetical so derived serialization has sorted keys.
//! Floats are written with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalars::LaurentPoly;
use crate::ARTIFACT_VERSION;

/// `f64` serialized at full precision (`{:.16e}`); non-finite values as strings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = serde_json::value::RawValue::from_string(format!("{:.16e}", self.0))
                .map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else if self.0.is_nan() {
            s.serialize_str("NaN")
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(F17(v)),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(F17(f64::NAN)),
                "inf" => Ok(F17(f64::INFINITY)),
                "-inf" => Ok(F17(f64::NEG_INFINITY)),
                _ => Err(serde::de::Error::custom(format!("bad float `{t}`"))),
            },
        }
    }
}

/// Residual of one checked identity: exact polynomial text or a float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Residual {
    Exact(String),
    Float(F17),
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(s) => f.write_str(s),
            Residual::Float(v) => write!(f, "{:.16e}", v.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub indices: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub pass: bool,
    pub residual: Residual,
    pub residual_terms: usize,
}

impl Entry {
    /// Passes iff the residual polynomial is literally zero.
    pub fn exact(id: impl Into<String>, indices: &[i64], residual: &LaurentPoly) -> Self {
        Entry {
            id: id.into(),
            indices: indices.to_vec(),
            note: None,
            pass: residual.is_zero(),
            residual: Residual::Exact(residual.to_string()),
            residual_terms: residual.num_terms(),
        }
    }

    /// Passes iff `|value| <= tol` and the value is finite.
    pub fn float(id: impl Into<String>, indices: &[i64], value: f64, tol: f64) -> Self {
        let pass = value.is_finite() && value.abs() <= tol;
        Entry {
            id: id.into(),
            indices: indices.to_vec(),
            note: None,
            pass,
            residual: Residual::Float(F17(value)),
            residual_terms: usize::from(value != 0.0),
        }
    }

    /// A boolean outcome with no natural residual.
    pub fn flag(id: impl Into<String>, indices: &[i64], pass: bool) -> Self {
        Entry {
            id: id.into(),
            indices: indices.to_vec(),
            note: None,
            pass,
            residual: Residual::Exact(if pass { "0" } else { "1" }.into()),
            residual_terms: usize::from(!pass),
        }
    }

    /// An error surfaced as a failing entry.
    pub fn error(id: impl Into<String>, indices: &[i64], message: impl Into<String>) -> Self {
        Entry {
            id: id.into(),
            indices: indices.to_vec(),
            note: Some(message.into()),
            pass: false,
            residual: Residual::Exact("error".into()),
            residual_terms: 0,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Mark as passing regardless of residual, recording why.
    pub fn excused(mut self, note: impl Into<String>) -> Self {
        self.pass = true;
        self.note = Some(note.into());
        self
    }

    /// Invert the outcome, for checks that are expected to fail.
    pub fn expect_failure(mut self, note: impl Into<String>) -> Self {
        self.pass = !self.pass;
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub artifact_version: String,
    pub check: String,
    pub config: BTreeMap<String, String>,
    pub entries: Vec<Entry>,
    pub failed: usize,
    pub pass: bool,
    pub passed: usize,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            artifact_version: ARTIFACT_VERSION.to_string(),
            check: check.into(),
            config: BTreeMap::new(),
            entries: Vec::new(),
            failed: 0,
            pass: true,
            passed: 0,
        }
    }

    pub fn with_config(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.config.insert(key.into(), value.to_string());
        self
    }

    pub fn push(&mut self, entry: Entry) {
        if entry.pass {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.pass = false;
        }
        self.entries.push(entry);
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = Entry>) {
        for e in entries {
            self.push(e);
        }
    }

    /// Append another report's entries, prefixing ids with its check name.
    pub fn absorb(&mut self, other: VerificationReport) {
        for mut e in other.entries {
            e.id = format!("{}/{}", other.check, e.id);
            self.push(e);
        }
    }

    pub fn entry(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    /// Recompute summary fields from the entries.
    pub fn is_consistent(&self) -> bool {
        let passed = self.entries.iter().filter(|e| e.pass).count();
        passed == self.passed
            && self.entries.len() - passed == self.failed
            && self.pass == (self.failed == 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// One row per entry after `# key=value` metadata lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# check={}\n", self.check));
        out.push_str(&format!("# artifact_version={}\n", self.artifact_version));
        for (k, v) in &self.config {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&format!(
            "# pass={} passed={} failed={}\n",
            self.pass, self.passed, self.failed
        ));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "id",
            "indices",
            "pass",
            "residual",
            "residual_terms",
            "note",
        ])
        .unwrap();
        for e in &self.entries {
            let idx = e
                .indices
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            w.write_record([
                e.id.as_str(),
                &idx,
                if e.pass { "true" } else { "false" },
                &e.residual.to_string(),
                &e.residual_terms.to_string(),
                e.note.as_deref().unwrap_or(""),
            ])
            .unwrap();
        }
        out.push_str(&String::from_utf8(w.into_inner().unwrap()).unwrap());
        out
    }
}
