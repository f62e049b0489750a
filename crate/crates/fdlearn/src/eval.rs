//! Precision / recall / F1 scoring of discovered dependency sets, with
//! coupling-preserving median aggregation across benchmark instances.

use std::collections::HashMap;

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fdgen::{Fd, FdSet};

/// Scoring result. A predicted dependency counts as correct only when
/// its rhs matches a truth dependency and its lhs equals that truth lhs
/// as a set; there is no partial credit.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: Vec<Fd>,
    pub spurious: Vec<Fd>,
    pub missed: Vec<Fd>,
    /// True when nothing was predicted against a nonempty truth set, so
    /// precision has no defined value and is reported as zero.
    pub precision_undefined: bool,
}

/// Exact-match scoring of `predicted` against `truth`.
pub fn score(predicted: &FdSet, truth: &FdSet) -> Result<EvalReport> {
    if predicted.schema() != truth.schema() {
        return Err(Error::SchemaMismatch);
    }

    let truth_by_rhs: HashMap<&String, &Fd> =
        truth.fds().iter().map(|fd| (&fd.rhs, fd)).collect();

    let mut matched = Vec::new();
    let mut spurious = Vec::new();
    for fd in predicted.fds() {
        match truth_by_rhs.get(&fd.rhs) {
            Some(t) if fd.same_dependency(t) => matched.push(fd.clone()),
            _ => spurious.push(fd.clone()),
        }
    }
    let missed: Vec<Fd> = truth
        .fds()
        .iter()
        .filter(|t| !matched.iter().any(|m| m.same_dependency(t)))
        .cloned()
        .collect();

    let n_pred = predicted.len();
    let n_truth = truth.len();
    let n_match = matched.len();

    let mut precision_undefined = false;
    let precision = if n_pred == 0 {
        if n_truth == 0 {
            1.0
        } else {
            precision_undefined = true;
            0.0
        }
    } else {
        n_match as f64 / n_pred as f64
    };
    let recall = if n_truth == 0 {
        1.0
    } else {
        n_match as f64 / n_truth as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };

    Ok(EvalReport {
        precision,
        recall,
        f1,
        matched,
        spurious,
        missed,
        precision_undefined,
    })
}

/// Select the report with the median F1 (lower-middle for even counts,
/// lowest index among ties) and return it whole, so precision, recall and
/// F1 stay coupled.
pub fn median_aggregate(reports: &[EvalReport]) -> Result<EvalReport> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter(
            "median aggregation needs at least one report".into(),
        ));
    }
    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.sort_by(|&a, &b| reports[a].f1.total_cmp(&reports[b].f1));
    let median_f1 = reports[order[(reports.len() - 1) / 2]].f1;
    let chosen = reports
        .iter()
        .find(|r| r.f1 == median_f1)
        .expect("median value comes from the list");
    Ok(chosen.clone())
}

/// Aligned text table, one row per labelled report.
pub fn render_table(rows: &[(String, &EvalReport)]) -> String {
    let label_width = rows
        .iter()
        .map(|(l, _)| l.len())
        .chain(std::iter::once("setting".len()))
        .max()
        .unwrap_or(7);
    let mut out = format!(
        "{:<width$}  {:>9}  {:>9}  {:>9}\n",
        "setting",
        "P",
        "R",
        "F1",
        width = label_width
    );
    for (label, r) in rows {
        out.push_str(&format!(
            "{:<width$}  {:>9.3}  {:>9.3}  {:>9.3}\n",
            label,
            r.precision,
            r.recall,
            r.f1,
            width = label_width
        ));
    }
    out
}

/// Brute-force check that a dependency holds exactly in a table: rows
/// grouped by the lhs values must agree on the rhs value. Used as the
/// generator's ground-truth oracle.
pub fn holds_exactly(d: &Dataset, fd: &Fd) -> Result<bool> {
    let mut lhs_idx = Vec::with_capacity(fd.lhs.len());
    for a in &fd.lhs {
        lhs_idx.push(
            d.attribute_index(a)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown attribute `{a}`")))?,
        );
    }
    let rhs_idx = d
        .attribute_index(&fd.rhs)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown attribute `{}`", fd.rhs)))?;

    let mut seen: HashMap<Vec<String>, String> = HashMap::new();
    for row in 0..d.n() {
        let key: Vec<String> = lhs_idx
            .iter()
            .map(|&c| format!("{:?}", d.cell(row, c)))
            .collect();
        let y = format!("{:?}", d.cell(row, rhs_idx));
        if let Some(prev) = seen.insert(key, y.clone()) {
            if prev != y {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
