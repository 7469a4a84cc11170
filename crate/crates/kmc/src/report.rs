//! Machine-readable run reports.
//!
//! The JSON layout is a stable surface for scripting and CI:
//!
//! ```json
//! {
//!   "states": 1234,
//!   "edges": 5678,
//!   "build_ms": 42,
//!   "formulas": [
//!     { "name": "F1", "verdict": true, "sat_count": 1234, "trace": null }
//!   ]
//! }
//! ```
//!
//! A failed formula in the supported fragment carries a `trace`: a list
//! of states, each rendered as an object mapping `"Agent.var"` to its
//! value (numbers for integer variables, strings for enum members).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::checker::{CheckOutcome, Trace};
use crate::expr::Value;
use crate::model::Model;
use crate::state::{StateGraph, StateId};

/// One rendered state: `"Agent.var"` to value.
pub type StateRecord = BTreeMap<String, serde_json::Value>;

/// Result of checking a single formula.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormulaReport {
    /// The formula's name as declared in the model.
    pub name: String,
    /// True when the formula holds in every initial state.
    pub verdict: bool,
    /// Number of reachable states satisfying the formula.
    pub sat_count: usize,
    /// Counterexample path for failed formulas in the supported fragment.
    pub trace: Option<Vec<StateRecord>>,
}

/// Statistics and verdicts for one checking run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    /// Model file the run was invoked on; not part of the JSON surface.
    #[serde(skip)]
    pub path: String,
    /// Reachable state count.
    pub states: usize,
    /// Transition count.
    pub edges: usize,
    /// Wall-clock milliseconds spent building the state graph.
    pub build_ms: u64,
    /// Per-formula verdicts, in the order they were checked.
    pub formulas: Vec<FormulaReport>,
}

impl RunReport {
    /// Assembles a report from a built graph and check outcomes.
    pub fn new(
        path: impl Into<String>,
        model: &Model,
        graph: &StateGraph,
        build_ms: u64,
        outcomes: &[CheckOutcome],
    ) -> RunReport {
        RunReport {
            path: path.into(),
            states: graph.num_states(),
            edges: graph.num_edges(),
            build_ms,
            formulas: outcomes
                .iter()
                .map(|o| FormulaReport {
                    name: o.name.clone(),
                    verdict: o.holds,
                    sat_count: o.sat_count,
                    trace: o.trace.as_ref().map(|t| render_trace(model, graph, t)),
                })
                .collect(),
        }
    }

    /// Process exit code implied by the verdicts: 0 when everything
    /// checked holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.formulas.iter().all(|f| f.verdict) {
            0
        } else {
            1
        }
    }
}

/// Renders a single state as a `"Agent.var"` to value record.
pub fn render_state(model: &Model, graph: &StateGraph, id: StateId) -> StateRecord {
    let gs = graph.global_state(id);
    let mut record = BTreeMap::new();
    for (slot, info) in model.vars().iter().enumerate() {
        let key = format!("{}.{}", info.agent, info.name);
        let value = match gs.value(model, slot) {
            Value::Int(n) => serde_json::Value::from(n),
            Value::Bool(b) => serde_json::Value::from(b),
            Value::Sym(s) => serde_json::Value::from(s),
        };
        record.insert(key, value);
    }
    record
}

/// Renders every state along a counterexample path.
pub fn render_trace(model: &Model, graph: &StateGraph, trace: &Trace) -> Vec<StateRecord> {
    trace.states.iter().map(|&id| render_state(model, graph, id)).collect()
}
