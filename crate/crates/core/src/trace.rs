//! Execution traces for the computation-tree model: every decision node a
//! solver passes through is appended here, so the topological complexity of
//! a run is a measured number.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complexity::smale_bound;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub label: String,
    pub predicate_value: bool,
}

/// Append-only log of decision outcomes for one solver execution.
///
/// A disabled trace still counts decisions and computations but keeps no
/// records, so it can be threaded through hot loops cheaply.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BranchTrace {
    decisions: Vec<Decision>,
    decision_count: usize,
    computation_count: u64,
    disabled: bool,
}

impl BranchTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn disabled() -> Self {
        Self { disabled: true, ..Self::default() }
    }

    /// Record one decision node and hand the predicate back unchanged, so the
    /// call can sit directly in an `if`.
    pub fn record_decision(&mut self, label: &str, predicate: bool) -> bool {
        self.decision_count += 1;
        if !self.disabled {
            self.decisions.push(Decision { label: label.to_owned(), predicate_value: predicate });
        }
        predicate
    }

    /// Count computation nodes (Newton steps, matrix products). These never
    /// contribute to the complexity.
    pub fn record_computations(&mut self, n: u64) {
        self.computation_count += n;
    }

    /// Number of decision nodes on this path.
    pub fn len(&self) -> usize {
        self.decision_count
    }

    pub fn is_empty(&self) -> bool {
        self.decision_count == 0
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    pub fn computation_count(&self) -> u64 {
        self.computation_count
    }
}

/// Worst case over root-to-leaf paths: the longest recorded trace.
pub fn worst_case_branches(traces: &[BranchTrace]) -> Result<usize> {
    traces.iter().map(BranchTrace::len).max().ok_or(Error::NoTraces)
}

/// Distinct decision labels seen across a set of traces. This counts decision
/// nodes of the whole tree that were exercised, as opposed to the per-path
/// maximum.
pub fn distinct_labels(traces: &[BranchTrace]) -> BTreeSet<String> {
    traces
        .iter()
        .flat_map(|t| t.decisions.iter().map(|d| d.label.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub degree: u64,
    pub measured_branches: u64,
    pub smale_lower_bound: f64,
    pub bound_satisfied: bool,
}

/// Compare a measured branch count against `(log2 d)^(2/3) - 1`. The bound
/// is strict.
pub fn make_report(degree: u64, measured: u64) -> Result<ComplexityReport> {
    let bound = smale_bound(degree)?;
    Ok(ComplexityReport {
        degree,
        measured_branches: measured,
        smale_lower_bound: bound,
        bound_satisfied: (measured as f64) > bound,
    })
}
