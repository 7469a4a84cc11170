//! Explicit-state CTL model checker for synchronously composed multi-agent
//! Kripke models.
//!
//! A model is a set of agents, each owning finite-domain variables updated by
//! guarded rules. All agents step simultaneously: every tick each agent takes
//! exactly one enabled move (or a stutter move when no guard is true), and all
//! next-state expressions are evaluated against the current state. The crate
//! provides a textual modeling language, a reachability graph builder, a CTL
//! fixpoint engine with counterexample traces for the `AG` fragment, and a
//! bundled unmanned-surface-vehicle surveillance scenario.

pub mod bitset;
pub mod checker;
mod compile;
pub mod ctl;
pub mod expr;
pub mod graph;
pub mod model;
pub mod report;
pub mod scenario;
pub mod span;
pub mod state;
pub mod syntax;

pub use checker::{check, check_all, counterexample, sat, sat_sets, CheckOutcome, Trace, TraceError};
pub use ctl::Ctl;
pub use expr::{CmpOp, EvalError, Expr, ExprKind, Value};
pub use bitset::BitSet;
pub use graph::{build_state_graph, BuildError, Move};
pub use model::{
    AgentDef, Assign, DefineDef, Domain, FormulaDef, GuardedRule, Model, ModelDef,
    ValidationError, VarInfo, VariableDecl,
};
pub use report::{render_state, render_trace, FormulaReport, RunReport, StateRecord};
pub use span::SourceSpan;
pub use state::{GlobalState, StateGraph, StateId};
pub use syntax::{format_formula, format_model, parse_formula, parse_model, ParseError};

use thiserror::Error;

/// Default cap on the number of states a reachability build may discover.
pub const DEFAULT_STATE_LIMIT: usize = 5_000_000;

/// Failure to turn source text into a compiled model.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validate(#[from] ValidationError),
}

/// Parses and validates model source text in one step.
pub fn load_model(text: &str) -> Result<Model, LoadError> {
    let def = parse_model(text)?;
    Ok(Model::compile(def)?)
}
