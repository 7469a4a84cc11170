//! State expressions: the guard / assignment / atomic-proposition language.
//!
//! Expressions read variables of the *current* state only. Bare identifiers
//! are resolved during model validation, either to a named `define` or to an
//! enum member of the domain they are compared against.

use crate::span::SourceSpan;
use std::fmt;
use thiserror::Error;

/// Comparison operators. Enums support only `Eq`/`Ne`; integers support all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn token(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// A runtime value: integer, boolean, or enum member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// An expression together with its source location.
///
/// Equality is structural and ignores spans, so a parsed expression compares
/// equal to the same expression built programmatically or re-parsed from
/// formatted output.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    /// Bare identifier: a define reference or an enum member literal.
    Ident(String),
    /// Qualified variable reference `agent.var`.
    Var(String, String),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Clamp(Box<Expr>, Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Expr { kind, span }
    }

    fn synth(kind: ExprKind) -> Self {
        Expr::new(kind, SourceSpan::synthetic())
    }

    pub fn int(n: i64) -> Self {
        Expr::synth(ExprKind::Int(n))
    }

    pub fn bool(b: bool) -> Self {
        Expr::synth(ExprKind::Bool(b))
    }

    pub fn ident(name: impl Into<String>) -> Self {
        Expr::synth(ExprKind::Ident(name.into()))
    }

    pub fn var(agent: impl Into<String>, var: impl Into<String>) -> Self {
        Expr::synth(ExprKind::Var(agent.into(), var.into()))
    }

    pub fn cmp(self, op: CmpOp, rhs: Expr) -> Self {
        Expr::synth(ExprKind::Cmp(op, Box::new(self), Box::new(rhs)))
    }

    pub fn eq(self, rhs: Expr) -> Self {
        self.cmp(CmpOp::Eq, rhs)
    }

    pub fn ne(self, rhs: Expr) -> Self {
        self.cmp(CmpOp::Ne, rhs)
    }

    pub fn lt(self, rhs: Expr) -> Self {
        self.cmp(CmpOp::Lt, rhs)
    }

    pub fn le(self, rhs: Expr) -> Self {
        self.cmp(CmpOp::Le, rhs)
    }

    pub fn gt(self, rhs: Expr) -> Self {
        self.cmp(CmpOp::Gt, rhs)
    }

    pub fn ge(self, rhs: Expr) -> Self {
        self.cmp(CmpOp::Ge, rhs)
    }

    #[allow(clippy::should_implement_trait)] // builder named for the operator, like its siblings
    pub fn not(self) -> Self {
        Expr::synth(ExprKind::Not(Box::new(self)))
    }

    pub fn and(self, rhs: Expr) -> Self {
        Expr::synth(ExprKind::And(Box::new(self), Box::new(rhs)))
    }

    pub fn or(self, rhs: Expr) -> Self {
        Expr::synth(ExprKind::Or(Box::new(self), Box::new(rhs)))
    }

    pub fn implies(self, rhs: Expr) -> Self {
        Expr::synth(ExprKind::Implies(Box::new(self), Box::new(rhs)))
    }

    #[allow(clippy::should_implement_trait)] // builder named for the operator, like its siblings
    pub fn add(self, rhs: Expr) -> Self {
        Expr::synth(ExprKind::Add(Box::new(self), Box::new(rhs)))
    }

    #[allow(clippy::should_implement_trait)] // builder named for the operator, like its siblings
    pub fn sub(self, rhs: Expr) -> Self {
        Expr::synth(ExprKind::Sub(Box::new(self), Box::new(rhs)))
    }

    #[allow(clippy::should_implement_trait)] // builder named for the operator, like its siblings
    pub fn neg(self) -> Self {
        Expr::synth(ExprKind::Neg(Box::new(self)))
    }

    pub fn clamp(self, lo: Expr, hi: Expr) -> Self {
        Expr::synth(ExprKind::Clamp(Box::new(self), Box::new(lo), Box::new(hi)))
    }

    /// Folds a nonempty list of expressions with `and`.
    pub fn all(parts: Vec<Expr>) -> Self {
        let mut it = parts.into_iter();
        let first = it.next().expect("Expr::all needs at least one operand");
        it.fold(first, Expr::and)
    }

    /// Folds a nonempty list of expressions with `or`.
    pub fn any(parts: Vec<Expr>) -> Self {
        let mut it = parts.into_iter();
        let first = it.next().expect("Expr::any needs at least one operand");
        it.fold(first, Expr::or)
    }
}

/// Failure while evaluating an expression against a state.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unresolved variable {agent}.{var}")]
    UnresolvedVariable { agent: String, var: String },
    #[error("unresolved identifier {0}")]
    UnresolvedIdent(String),
    #[error("type mismatch: {0}")]
    Type(String),
}
