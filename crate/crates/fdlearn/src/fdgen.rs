//! Dependency extraction from the autoregression matrix, plus the stable
//! text formats used to exchange dependency sets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::AutoregressionMatrix;

/// One functional dependency: the lhs attributes jointly determine rhs.
/// `weights` carries the autoregression coefficient per lhs attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fd {
    pub lhs: Vec<String>,
    pub rhs: String,
    pub weights: Vec<f64>,
}

impl Fd {
    /// Set equality on lhs plus rhs equality; weights are diagnostics and
    /// do not participate.
    pub fn same_dependency(&self, other: &Fd) -> bool {
        if self.rhs != other.rhs || self.lhs.len() != other.lhs.len() {
            return false;
        }
        let mut a: Vec<&String> = self.lhs.iter().collect();
        let mut b: Vec<&String> = other.lhs.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

/// A set of dependencies over one schema, at most one per rhs attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSet {
    fds: Vec<Fd>,
    schema: Vec<String>,
    threshold: f64,
}

impl FdSet {
    /// Validating constructor: every fd must be non-trivial, reference
    /// schema attributes only, keep lhs strictly before rhs in schema
    /// order, and no rhs may repeat.
    pub fn from_fds(fds: Vec<Fd>, schema: Vec<String>, threshold: f64) -> Result<Self> {
        let index: HashMap<&String, usize> =
            schema.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut seen_rhs = Vec::new();
        for fd in &fds {
            if fd.lhs.is_empty() {
                return Err(Error::InvalidParameter("fd with empty lhs".into()));
            }
            if fd.weights.len() != fd.lhs.len() {
                return Err(Error::InvalidParameter(format!(
                    "fd {} -> {} carries {} weights for {} lhs attributes",
                    fd.lhs.join(","),
                    fd.rhs,
                    fd.weights.len(),
                    fd.lhs.len()
                )));
            }
            let rhs_idx = *index
                .get(&fd.rhs)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown rhs `{}`", fd.rhs)))?;
            for a in &fd.lhs {
                if a == &fd.rhs {
                    return Err(Error::InvalidParameter(format!(
                        "trivial fd: `{}` appears on both sides",
                        a
                    )));
                }
                let i = *index
                    .get(a)
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown lhs `{a}`")))?;
                if i >= rhs_idx {
                    return Err(Error::InvalidParameter(format!(
                        "lhs `{a}` does not precede rhs `{}` in schema order",
                        fd.rhs
                    )));
                }
            }
            if seen_rhs.contains(&fd.rhs) {
                return Err(Error::InvalidParameter(format!(
                    "two dependencies determine `{}`",
                    fd.rhs
                )));
            }
            seen_rhs.push(fd.rhs.clone());
        }
        Ok(FdSet {
            fds,
            schema,
            threshold,
        })
    }

    /// Constructor for externally supplied dependency files (evaluation
    /// input): skips the schema-order triangularity requirement but still
    /// rejects trivial or duplicated dependencies.
    pub fn for_eval(fds: Vec<Fd>, schema: Vec<String>) -> Result<Self> {
        let mut seen_rhs = Vec::new();
        for fd in &fds {
            if fd.lhs.is_empty() {
                return Err(Error::InvalidParameter("fd with empty lhs".into()));
            }
            if fd.lhs.contains(&fd.rhs) {
                return Err(Error::InvalidParameter(format!(
                    "trivial fd: `{}` appears on both sides",
                    fd.rhs
                )));
            }
            if seen_rhs.contains(&fd.rhs) {
                return Err(Error::InvalidParameter(format!(
                    "two dependencies determine `{}`",
                    fd.rhs
                )));
            }
            seen_rhs.push(fd.rhs.clone());
        }
        Ok(FdSet {
            fds,
            schema,
            threshold: 0.0,
        })
    }

    pub fn fds(&self) -> &[Fd] {
        &self.fds
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.fds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fds.is_empty()
    }

    pub fn find_by_rhs(&self, rhs: &str) -> Option<&Fd> {
        self.fds.iter().find(|f| f.rhs == rhs)
    }
}

/// Output format for dependency sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdFormat {
    JsonLines,
    Human,
}

/// Default magnitude threshold applied to autoregression coefficients.
/// The factorization leaves rounding-level nonzeros everywhere, so some
/// absolute cutoff is mandatory.
pub const DEFAULT_TAU: f64 = 0.05;

/// Read dependencies off the autoregression matrix: for each column j,
/// the lhs is every earlier attribute whose coefficient magnitude
/// exceeds `tau`; columns with no survivors emit nothing.
pub fn generate_fds(b: &AutoregressionMatrix, tau: f64) -> Result<FdSet> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter("tau must be >= 0".into()));
    }
    let k = b.k();
    let m = b.matrix();
    let schema = b.schema();
    let mut fds = Vec::new();
    for j in 0..k {
        let mut lhs = Vec::new();
        let mut weights = Vec::new();
        for i in 0..j {
            if m[[i, j]].abs() > tau {
                lhs.push(schema[i].clone());
                weights.push(m[[i, j]]);
            }
        }
        if !lhs.is_empty() {
            fds.push(Fd {
                lhs,
                rhs: schema[j].clone(),
                weights,
            });
        }
    }
    FdSet::from_fds(fds, schema.to_vec(), tau)
}

/// Serialize: one JSON object per line, or `A, B -> C` lines ordered by
/// the rhs position in the schema.
pub fn serialize_fds(set: &FdSet, format: FdFormat) -> String {
    match format {
        FdFormat::JsonLines => {
            let mut out = String::new();
            for fd in set.fds() {
                out.push_str(&serde_json::to_string(fd).expect("fd serializes"));
                out.push('\n');
            }
            out
        }
        FdFormat::Human => {
            let index: HashMap<&String, usize> =
                set.schema().iter().enumerate().map(|(i, s)| (s, i)).collect();
            let mut sorted: Vec<&Fd> = set.fds().iter().collect();
            sorted.sort_by_key(|fd| index.get(&fd.rhs).copied().unwrap_or(usize::MAX));
            let mut out = String::new();
            for fd in sorted {
                out.push_str(&format!("{} -> {}\n", fd.lhs.join(", "), fd.rhs));
            }
            out
        }
    }
}

/// Parse the JSON-lines format back into dependencies. Blank lines are
/// skipped.
pub fn parse_fd_lines(text: &str) -> Result<Vec<Fd>> {
    let mut fds = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fd: Fd = serde_json::from_str(line).map_err(|e| Error::FdParse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        fds.push(fd);
    }
    Ok(fds)
}
