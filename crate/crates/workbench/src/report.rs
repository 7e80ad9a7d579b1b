//! Experiment specifications and machine-readable reports.
//!
//! A [`SuiteReport`] is the single artifact of a verification run: one record
//! per case, each carrying its inputs, computed values, and the asserted
//! bounds with their tolerances.  Case records are byte-stable across reruns
//! — wall-clock time is recorded only at the suite level — so determinism can
//! be checked by comparing serialized case lists.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gowers_core::linear_systems::LinearSystem;
use gowers_core::series::GeneratorSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("suite `{0}` is unknown")]
    UnknownSuite(String),
    #[error("experiment spec invalid: {0}")]
    InvalidSpec(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
}

/// Numeric parameters shared by the suites; every field has a default so a
/// spec file may override only what it cares about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Norm order parameter: the suite works with `U^{s+1}`.
    pub s: u32,
    /// Cube-packing dilation modulus.
    pub q: i64,
    /// Cube-packing side fraction.
    pub eps_prime: f64,
    /// Default tolerance for approximate assertions.
    pub tolerance: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            s: 1,
            q: 1,
            eps_prime: 0.25,
            tolerance: 1e-9,
        }
    }
}

/// A fully pinned description of one suite run.  Spec plus code version
/// determines every output byte except wall-clock times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub suite: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub systems: Vec<LinearSystem>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
    /// Size schedule (the `N` values the suite sweeps).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<i64>,
    #[serde(default)]
    pub params: Params,
    /// Output directory override; `None` falls back to the CLI/env setting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn named(suite: &str) -> Self {
        ExperimentSpec {
            suite: suite.to_string(),
            systems: Vec::new(),
            generators: Vec::new(),
            sizes: Vec::new(),
            params: Params::default(),
            output: None,
        }
    }

    /// Canonical SHA-256 digest of the spec, hex-encoded.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("specs are serializable");
        let mut hasher = Sha256::new();
        hasher.update(&canonical);
        let bytes = hasher.finalize();
        let mut out = String::with_capacity(64);
        for b in bytes {
            use fmt::Write as _;
            write!(out, "{b:02x}").expect("writing to a String cannot fail");
        }
        out
    }
}

/// How an asserted bound was obtained — the provenance tag required on every
/// assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssertionKind {
    /// Integer or bitwise equality; no tolerance involved.
    Exact,
    /// Two routes to the same quantity, equal up to the named tolerance.
    Identity,
    /// An inequality `lhs ≤ rhs + tolerance`.
    Bound,
    /// An inequality against a constant derived from pinned measurements
    /// (never an invented literal).
    DerivedBound,
    /// A qualitative corpus-level property (percentile orderings and the
    /// like); `lhs`/`rhs` record the quantities compared.
    Qualitative,
}

/// One asserted bound: what was compared, how, and to which tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub kind: AssertionKind,
    pub tolerance: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Assertion {
    /// `lhs == rhs` exactly (bitwise on the recorded f64s).
    pub fn exact(name: &str, lhs: f64, rhs: f64) -> Self {
        Assertion {
            name: name.to_string(),
            kind: AssertionKind::Exact,
            tolerance: 0.0,
            lhs,
            rhs,
            pass: lhs == rhs,
        }
    }

    /// Exact integer equality, recorded losslessly for counts below 2^53.
    pub fn exact_count(name: &str, lhs: u128, rhs: u128) -> Self {
        Assertion {
            name: name.to_string(),
            kind: AssertionKind::Exact,
            tolerance: 0.0,
            lhs: lhs as f64,
            rhs: rhs as f64,
            pass: lhs == rhs,
        }
    }

    pub fn exact_flag(name: &str, value: bool) -> Self {
        Assertion {
            name: name.to_string(),
            kind: AssertionKind::Exact,
            tolerance: 0.0,
            lhs: if value { 1.0 } else { 0.0 },
            rhs: 1.0,
            pass: value,
        }
    }

    /// `|lhs − rhs| ≤ tolerance · max(1, |lhs|, |rhs|)`.
    pub fn identity(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.to_string(),
            kind: AssertionKind::Identity,
            tolerance,
            lhs,
            rhs,
            pass: gowers_core::numeric::close(lhs, rhs, tolerance),
        }
    }

    /// `lhs ≤ rhs + tolerance`.
    pub fn bound(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.to_string(),
            kind: AssertionKind::Bound,
            tolerance,
            lhs,
            rhs,
            pass: lhs <= rhs + tolerance,
        }
    }

    /// `lhs ≤ rhs + tolerance` where `rhs` was derived from pinned
    /// measurements rather than written down as a literal.
    pub fn derived_bound(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.to_string(),
            kind: AssertionKind::DerivedBound,
            tolerance,
            lhs,
            rhs,
            pass: lhs <= rhs + tolerance,
        }
    }

    /// A corpus-level implication or ordering; `pass` is supplied by the
    /// caller, `lhs`/`rhs` record the compared quantities.
    pub fn qualitative(name: &str, lhs: f64, rhs: f64, pass: bool) -> Self {
        Assertion {
            name: name.to_string(),
            kind: AssertionKind::Qualitative,
            tolerance: 0.0,
            lhs,
            rhs,
            pass,
        }
    }
}

/// One executed case: pinned inputs, computed values, asserted bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub name: String,
    /// The case's pinned inputs (seeds, sizes, systems) as plain JSON.
    pub inputs: serde_json::Value,
    /// Computed quantities by name; keys are sorted for byte stability.
    pub values: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
}

impl CaseRecord {
    pub fn new(name: impl Into<String>, inputs: serde_json::Value) -> Self {
        CaseRecord {
            name: name.into(),
            inputs,
            values: BTreeMap::new(),
            assertions: Vec::new(),
            pass: true,
        }
    }

    pub fn record(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), value);
    }

    pub fn assert(&mut self, assertion: Assertion) {
        self.pass &= assertion.pass;
        self.assertions.push(assertion);
    }
}

/// The report of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub code_version: String,
    /// SHA-256 of the canonical experiment spec.
    pub inputs_digest: String,
    pub cases: Vec<CaseRecord>,
    pub passed: usize,
    pub failed: usize,
    /// Wall-clock time of the whole suite; the only nondeterministic field.
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn assemble(spec: &ExperimentSpec, cases: Vec<CaseRecord>, wall_ms: u64) -> Self {
        let passed = cases.iter().filter(|c| c.pass).count();
        let failed = cases.len() - passed;
        SuiteReport {
            suite: spec.suite.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs_digest: spec.digest(),
            cases,
            passed,
            failed,
            wall_ms,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    /// Names of failing cases, in case order.
    pub fn failing_cases(&self) -> Vec<&str> {
        self.cases
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }

    /// The case records serialized canonically — the byte sequence that must
    /// be identical across reruns.
    pub fn case_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.cases).expect("case records are serializable")
    }

    /// Writes the report as pretty JSON to `<dir>/<suite>.json`.
    pub fn write_json(&self, dir: &Path) -> Result<PathBuf, ReportError> {
        fs::create_dir_all(dir).map_err(|source| ReportError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = dir.join(format!("{}.json", self.suite));
        let mut file = fs::File::create(&path).map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })?;
        let body = serde_json::to_vec_pretty(self)?;
        file.write_all(&body).map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })?;
        file.write_all(b"\n").map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}
