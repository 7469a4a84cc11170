//! Model definitions, validation, and the compiled form used by the engine.
//!
//! A [`ModelDef`] is plain data as written in source or built
//! programmatically. [`Model::compile`] validates it (name resolution, domain
//! checks, typing, define acyclicity) and lowers guards, assignments, and
//! formula atoms to slot-resolved expressions.

use crate::compile::{CAssign, CExpr, CompileCtx, Ty};
use crate::ctl::Ctl;
use crate::expr::{CmpOp, EvalError, Expr, ExprKind, Value};
use crate::span::SourceSpan;
use crate::state::GlobalState;
use std::collections::HashMap;
use thiserror::Error;

/// Largest domain the packed state encoding supports.
pub const MAX_DOMAIN_SIZE: u64 = 1 << 16;

/// The set of values a variable ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Finite set of named members.
    Enum(Vec<String>),
    /// Bounded integer interval, inclusive on both ends.
    Int { lo: i64, hi: i64 },
}

impl Domain {
    pub fn size(&self) -> u64 {
        match self {
            Domain::Enum(members) => members.len() as u64,
            Domain::Int { lo, hi } => (*hi as i128 - *lo as i128 + 1).min(u64::MAX as i128) as u64,
        }
    }

    /// Ordinal of a value within the domain, if it belongs to it.
    pub fn ordinal(&self, v: &Value) -> Option<u16> {
        match (self, v) {
            (Domain::Enum(members), Value::Sym(s)) => {
                members.iter().position(|m| m == s).map(|i| i as u16)
            }
            (Domain::Int { lo, hi }, Value::Int(n)) if lo <= n && n <= hi => {
                Some((n - lo) as u16)
            }
            _ => None,
        }
    }

    /// Value at a given ordinal.
    pub fn value(&self, ord: u16) -> Value {
        match self {
            Domain::Enum(members) => Value::Sym(members[ord as usize].clone()),
            Domain::Int { lo, .. } => Value::Int(lo + ord as i64),
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.ordinal(v).is_some()
    }
}

/// A variable declaration inside an agent.
#[derive(Debug, Clone)]
pub struct VariableDecl {
    pub name: String,
    pub domain: Domain,
    pub init: Value,
    pub name_span: SourceSpan,
    pub init_span: SourceSpan,
}

impl VariableDecl {
    pub fn new(name: impl Into<String>, domain: Domain, init: Value) -> Self {
        VariableDecl {
            name: name.into(),
            domain,
            init,
            name_span: SourceSpan::synthetic(),
            init_span: SourceSpan::synthetic(),
        }
    }
}

impl PartialEq for VariableDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.domain == other.domain && self.init == other.init
    }
}

impl Eq for VariableDecl {}

/// One assignment `var := expr` on the right side of a rule.
#[derive(Debug, Clone)]
pub struct Assign {
    pub var: String,
    pub value: Expr,
    pub var_span: SourceSpan,
}

impl Assign {
    pub fn new(var: impl Into<String>, value: Expr) -> Self {
        Assign { var: var.into(), value, var_span: SourceSpan::synthetic() }
    }
}

impl PartialEq for Assign {
    fn eq(&self, other: &Self) -> bool {
        self.var == other.var && self.value == other.value
    }
}

impl Eq for Assign {}

/// Default priority tier for rules written without an explicit `[prio n]`.
pub const DEFAULT_PRIORITY: u32 = 1;

/// A guarded transition rule. The guard and all assignment right-hand sides
/// read the current state; lower priority values take precedence.
#[derive(Debug, Clone)]
pub struct GuardedRule {
    pub guard: Expr,
    pub assigns: Vec<Assign>,
    pub priority: u32,
    pub span: SourceSpan,
}

impl GuardedRule {
    pub fn new(guard: Expr, assigns: Vec<Assign>) -> Self {
        GuardedRule { guard, assigns, priority: DEFAULT_PRIORITY, span: SourceSpan::synthetic() }
    }

    pub fn with_priority(mut self, priority: u32) -> Self {
        self.priority = priority;
        self
    }
}

impl PartialEq for GuardedRule {
    fn eq(&self, other: &Self) -> bool {
        self.guard == other.guard
            && self.assigns == other.assigns
            && self.priority == other.priority
    }
}

impl Eq for GuardedRule {}

/// An agent: a named group of variables plus the rules that update them.
#[derive(Debug, Clone)]
pub struct AgentDef {
    pub name: String,
    pub vars: Vec<VariableDecl>,
    pub rules: Vec<GuardedRule>,
    pub name_span: SourceSpan,
}

impl AgentDef {
    pub fn new(name: impl Into<String>) -> Self {
        AgentDef {
            name: name.into(),
            vars: Vec::new(),
            rules: Vec::new(),
            name_span: SourceSpan::synthetic(),
        }
    }
}

impl PartialEq for AgentDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.vars == other.vars && self.rules == other.rules
    }
}

impl Eq for AgentDef {}

/// A named reusable boolean predicate.
#[derive(Debug, Clone)]
pub struct DefineDef {
    pub name: String,
    pub body: Expr,
    pub name_span: SourceSpan,
}

impl DefineDef {
    pub fn new(name: impl Into<String>, body: Expr) -> Self {
        DefineDef { name: name.into(), body, name_span: SourceSpan::synthetic() }
    }
}

impl PartialEq for DefineDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.body == other.body
    }
}

impl Eq for DefineDef {}

/// A named CTL formula.
#[derive(Debug, Clone)]
pub struct FormulaDef {
    pub name: String,
    pub body: Ctl<Expr>,
    pub name_span: SourceSpan,
}

impl FormulaDef {
    pub fn new(name: impl Into<String>, body: Ctl<Expr>) -> Self {
        FormulaDef { name: name.into(), body, name_span: SourceSpan::synthetic() }
    }
}

impl PartialEq for FormulaDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.body == other.body
    }
}

impl Eq for FormulaDef {}

/// A complete model: agents, defines, and formulas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelDef {
    pub agents: Vec<AgentDef>,
    pub defines: Vec<DefineDef>,
    pub formulas: Vec<FormulaDef>,
}

/// Rejection of a structurally well-formed but invalid model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("{span}: duplicate agent name {name}")]
    DuplicateAgent { name: String, span: SourceSpan },
    #[error("{span}: duplicate variable {agent}.{name}")]
    DuplicateVariable { agent: String, name: String, span: SourceSpan },
    #[error("{span}: duplicate define name {name}")]
    DuplicateDefine { name: String, span: SourceSpan },
    #[error("{span}: duplicate formula name {name}")]
    DuplicateFormula { name: String, span: SourceSpan },
    #[error("{span}: enum domain of {agent}.{name} has no members")]
    EmptyEnum { agent: String, name: String, span: SourceSpan },
    #[error("{span}: duplicate enum member {member}")]
    DuplicateEnumMember { member: String, span: SourceSpan },
    #[error("{span}: empty integer range {lo}..{hi}")]
    BadIntRange { lo: i64, hi: i64, span: SourceSpan },
    #[error("{span}: domain of {agent}.{name} exceeds {MAX_DOMAIN_SIZE} values")]
    DomainTooLarge { agent: String, name: String, span: SourceSpan },
    #[error("{span}: init value out of domain for {agent}.{name}")]
    InitOutOfDomain { agent: String, name: String, span: SourceSpan },
    #[error("{span}: unknown variable {agent}.{var}")]
    UnknownVariable { agent: String, var: String, span: SourceSpan },
    #[error("{span}: unresolved identifier {name}")]
    UnknownIdent { name: String, span: SourceSpan },
    #[error("{span}: {message}")]
    TypeMismatch { message: String, span: SourceSpan },
    #[error("{span}: rule assigns {var} twice")]
    DuplicateAssign { var: String, span: SourceSpan },
    #[error("{span}: cyclic define {name}")]
    CyclicDefine { name: String, span: SourceSpan },
    #[error("{span}: {name} is a reserved word and cannot be declared")]
    ReservedName { name: String, span: SourceSpan },
}

/// Words with fixed meaning in formula syntax (`A [ .. U .. ]`, `E [ .. U .. ]`)
/// that therefore cannot name agents, variables, enum members, defines, or
/// formulas. Enforced at compile time so every valid model also has a valid
/// textual form.
pub const RESERVED_WORDS: [&str; 3] = ["A", "E", "U"];

fn check_reserved(name: &str, span: SourceSpan) -> Result<(), ValidationError> {
    if RESERVED_WORDS.contains(&name) {
        return Err(ValidationError::ReservedName { name: name.to_string(), span });
    }
    Ok(())
}

/// Metadata for one packed state slot.
#[derive(Debug, Clone)]
pub struct VarInfo {
    pub agent: String,
    pub name: String,
    pub domain: Domain,
    pub agent_idx: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledRule {
    pub guard: CExpr,
    pub assigns: Vec<CAssign>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledAgent {
    /// Rules grouped by priority, ascending; declaration order within a tier.
    pub tiers: Vec<(u32, Vec<CompiledRule>)>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledFormula {
    pub name: String,
    pub ctl: Ctl<CExpr>,
}

/// A validated model, ready for state-graph construction and checking.
///
/// Immutable after construction; all operations on it are pure.
pub struct Model {
    def: ModelDef,
    vars: Vec<VarInfo>,
    lookup: HashMap<(String, String), usize>,
    defines: HashMap<String, CExpr>,
    pub(crate) agents: Vec<CompiledAgent>,
    /// Per agent, the half-open slot range its variables occupy.
    pub(crate) agent_ranges: Vec<(u32, u32)>,
    init: GlobalState,
    pub(crate) compiled_formulas: Vec<CompiledFormula>,
}

impl Model {
    /// Validates and compiles a model definition.
    pub fn compile(def: ModelDef) -> Result<Model, ValidationError> {
        let mut agent_names: HashMap<&str, ()> = HashMap::new();
        for a in &def.agents {
            check_reserved(&a.name, a.name_span)?;
            if agent_names.insert(a.name.as_str(), ()).is_some() {
                return Err(ValidationError::DuplicateAgent {
                    name: a.name.clone(),
                    span: a.name_span,
                });
            }
        }

        let mut vars: Vec<VarInfo> = Vec::new();
        let mut lookup: HashMap<(String, String), usize> = HashMap::new();
        let mut init_ords: Vec<u16> = Vec::new();
        let mut agent_ranges: Vec<(u32, u32)> = Vec::with_capacity(def.agents.len());
        for (ai, a) in def.agents.iter().enumerate() {
            let slot_lo = vars.len() as u32;
            for v in &a.vars {
                check_reserved(&v.name, v.name_span)?;
                match &v.domain {
                    Domain::Enum(members) => {
                        if members.is_empty() {
                            return Err(ValidationError::EmptyEnum {
                                agent: a.name.clone(),
                                name: v.name.clone(),
                                span: v.name_span,
                            });
                        }
                        let mut seen: HashMap<&str, ()> = HashMap::new();
                        for m in members {
                            check_reserved(m, v.name_span)?;
                            if seen.insert(m.as_str(), ()).is_some() {
                                return Err(ValidationError::DuplicateEnumMember {
                                    member: m.clone(),
                                    span: v.name_span,
                                });
                            }
                        }
                    }
                    Domain::Int { lo, hi } => {
                        if lo > hi {
                            return Err(ValidationError::BadIntRange {
                                lo: *lo,
                                hi: *hi,
                                span: v.name_span,
                            });
                        }
                    }
                }
                if v.domain.size() > MAX_DOMAIN_SIZE {
                    return Err(ValidationError::DomainTooLarge {
                        agent: a.name.clone(),
                        name: v.name.clone(),
                        span: v.name_span,
                    });
                }
                let key = (a.name.clone(), v.name.clone());
                if lookup.contains_key(&key) {
                    return Err(ValidationError::DuplicateVariable {
                        agent: a.name.clone(),
                        name: v.name.clone(),
                        span: v.name_span,
                    });
                }
                let ord = v.domain.ordinal(&v.init).ok_or_else(|| {
                    ValidationError::InitOutOfDomain {
                        agent: a.name.clone(),
                        name: v.name.clone(),
                        span: v.init_span,
                    }
                })?;
                lookup.insert(key, vars.len());
                vars.push(VarInfo {
                    agent: a.name.clone(),
                    name: v.name.clone(),
                    domain: v.domain.clone(),
                    agent_idx: ai,
                });
                init_ords.push(ord);
            }
            agent_ranges.push((slot_lo, vars.len() as u32));
        }

        for d in &def.defines {
            check_reserved(&d.name, d.name_span)?;
        }
        let defines = compile_defines(&def, &vars, &lookup)?;

        let mut formula_names: HashMap<&str, ()> = HashMap::new();
        for f in &def.formulas {
            check_reserved(&f.name, f.name_span)?;
            if formula_names.insert(f.name.as_str(), ()).is_some() {
                return Err(ValidationError::DuplicateFormula {
                    name: f.name.clone(),
                    span: f.name_span,
                });
            }
        }

        let ctx = CompileCtx { vars: &vars, lookup: &lookup, defines: &defines };

        let mut agents = Vec::with_capacity(def.agents.len());
        for a in &def.agents {
            let mut by_prio: Vec<(u32, Vec<CompiledRule>)> = Vec::new();
            for r in &a.rules {
                let guard = ctx.compile_bool(&r.guard)?;
                let mut assigns = Vec::with_capacity(r.assigns.len());
                let mut targets: Vec<u32> = Vec::new();
                for asg in &r.assigns {
                    let slot = *lookup.get(&(a.name.clone(), asg.var.clone())).ok_or_else(
                        || ValidationError::UnknownVariable {
                            agent: a.name.clone(),
                            var: asg.var.clone(),
                            span: asg.var_span,
                        },
                    )?;
                    if targets.contains(&(slot as u32)) {
                        return Err(ValidationError::DuplicateAssign {
                            var: asg.var.clone(),
                            span: asg.var_span,
                        });
                    }
                    targets.push(slot as u32);
                    assigns.push(ctx.compile_assign(slot, &asg.value)?);
                }
                let compiled = CompiledRule { guard, assigns };
                match by_prio.iter_mut().find(|(p, _)| *p == r.priority) {
                    Some((_, rules)) => rules.push(compiled),
                    None => by_prio.push((r.priority, vec![compiled])),
                }
            }
            by_prio.sort_by_key(|(p, _)| *p);
            agents.push(CompiledAgent { tiers: by_prio });
        }

        let mut compiled_formulas = Vec::with_capacity(def.formulas.len());
        for f in &def.formulas {
            let ctl = f.body.try_map_atoms(&mut |atom: &Expr| ctx.compile_bool(atom))?;
            compiled_formulas.push(CompiledFormula { name: f.name.clone(), ctl });
        }

        let init = GlobalState::new(init_ords.into_boxed_slice());
        Ok(Model { def, vars, lookup, defines, agents, agent_ranges, init, compiled_formulas })
    }

    /// Half-open packed-slot range of an agent's variables.
    pub(crate) fn agent_range(&self, agent: usize) -> (u32, u32) {
        self.agent_ranges[agent]
    }

    /// Compiles a boolean expression against this model's layout and defines.
    pub(crate) fn compile_bool_expr(&self, e: &Expr) -> Result<CExpr, ValidationError> {
        let ctx = CompileCtx { vars: &self.vars, lookup: &self.lookup, defines: &self.defines };
        ctx.compile_bool(e)
    }

    pub fn def(&self) -> &ModelDef {
        &self.def
    }

    /// Packed-state slot metadata, in declaration order.
    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn var_index(&self, agent: &str, var: &str) -> Option<usize> {
        self.lookup.get(&(agent.to_string(), var.to_string())).copied()
    }

    pub fn agent_count(&self) -> usize {
        self.def.agents.len()
    }

    /// The set of initial states; synchronous models have exactly one.
    pub fn initial_states(&self) -> Vec<GlobalState> {
        vec![self.init.clone()]
    }

    pub(crate) fn init_state(&self) -> &GlobalState {
        &self.init
    }

    pub fn formulas(&self) -> &[FormulaDef] {
        &self.def.formulas
    }

    pub fn formula(&self, name: &str) -> Option<&FormulaDef> {
        self.def.formulas.iter().find(|f| f.name == name)
    }

    /// Renders a packed state as `(agent, var, value)` triples.
    pub fn describe_state(&self, state: &GlobalState) -> Vec<(String, String, Value)> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.agent.clone(), v.name.clone(), state.value(self, i)))
            .collect()
    }

    /// Evaluates an expression against a state by name resolution.
    ///
    /// This is the reference tree-walking semantics; the engine's compiled
    /// path must agree with it.
    pub fn eval_expr(&self, e: &Expr, s: &GlobalState) -> Result<Value, EvalError> {
        match &e.kind {
            ExprKind::Int(n) => Ok(Value::Int(*n)),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Ident(name) => {
                if let Some(d) = self.def.defines.iter().find(|d| d.name == *name) {
                    return self.eval_expr(&d.body, s);
                }
                Ok(Value::Sym(name.clone()))
            }
            ExprKind::Var(agent, var) => {
                let slot = self.var_index(agent, var).ok_or_else(|| {
                    EvalError::UnresolvedVariable { agent: agent.clone(), var: var.clone() }
                })?;
                Ok(s.value(self, slot))
            }
            ExprKind::Cmp(op, l, r) => {
                let (a, b) = (self.eval_expr(l, s)?, self.eval_expr(r, s)?);
                let res = match (&a, &b, op) {
                    (Value::Int(x), Value::Int(y), _) => match op {
                        CmpOp::Eq => x == y,
                        CmpOp::Ne => x != y,
                        CmpOp::Lt => x < y,
                        CmpOp::Le => x <= y,
                        CmpOp::Gt => x > y,
                        CmpOp::Ge => x >= y,
                    },
                    (Value::Sym(x), Value::Sym(y), CmpOp::Eq) => x == y,
                    (Value::Sym(x), Value::Sym(y), CmpOp::Ne) => x != y,
                    _ => {
                        return Err(EvalError::Type(format!(
                            "cannot apply {} to {a} and {b}",
                            op.token()
                        )))
                    }
                };
                Ok(Value::Bool(res))
            }
            ExprKind::Not(p) => Ok(Value::Bool(!self.eval_bool(p, s)?)),
            ExprKind::And(p, q) => {
                Ok(Value::Bool(self.eval_bool(p, s)? && self.eval_bool(q, s)?))
            }
            ExprKind::Or(p, q) => {
                Ok(Value::Bool(self.eval_bool(p, s)? || self.eval_bool(q, s)?))
            }
            ExprKind::Implies(p, q) => {
                Ok(Value::Bool(!self.eval_bool(p, s)? || self.eval_bool(q, s)?))
            }
            ExprKind::Add(l, r) => {
                Ok(Value::Int(self.eval_int(l, s)?.saturating_add(self.eval_int(r, s)?)))
            }
            ExprKind::Sub(l, r) => {
                Ok(Value::Int(self.eval_int(l, s)?.saturating_sub(self.eval_int(r, s)?)))
            }
            ExprKind::Neg(x) => Ok(Value::Int(self.eval_int(x, s)?.saturating_neg())),
            ExprKind::Clamp(x, lo, hi) => {
                let (x, lo, hi) =
                    (self.eval_int(x, s)?, self.eval_int(lo, s)?, self.eval_int(hi, s)?);
                Ok(Value::Int(x.max(lo).min(hi)))
            }
            ExprKind::Min(l, r) => {
                Ok(Value::Int(self.eval_int(l, s)?.min(self.eval_int(r, s)?)))
            }
            ExprKind::Max(l, r) => {
                Ok(Value::Int(self.eval_int(l, s)?.max(self.eval_int(r, s)?)))
            }
        }
    }

    fn eval_bool(&self, e: &Expr, s: &GlobalState) -> Result<bool, EvalError> {
        match self.eval_expr(e, s)? {
            Value::Bool(b) => Ok(b),
            v => Err(EvalError::Type(format!("expected boolean, got {v}"))),
        }
    }

    fn eval_int(&self, e: &Expr, s: &GlobalState) -> Result<i64, EvalError> {
        match self.eval_expr(e, s)? {
            Value::Int(n) => Ok(n),
            v => Err(EvalError::Type(format!("expected integer, got {v}"))),
        }
    }
}

/// Compiles defines in dependency order, rejecting cycles.
fn compile_defines(
    def: &ModelDef,
    vars: &[VarInfo],
    lookup: &HashMap<(String, String), usize>,
) -> Result<HashMap<String, CExpr>, ValidationError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, d) in def.defines.iter().enumerate() {
        if index.insert(d.name.as_str(), i).is_some() {
            return Err(ValidationError::DuplicateDefine {
                name: d.name.clone(),
                span: d.name_span,
            });
        }
    }

    fn deps<'a>(e: &'a Expr, index: &HashMap<&str, usize>, out: &mut Vec<&'a str>) {
        match &e.kind {
            ExprKind::Ident(n) => {
                if index.contains_key(n.as_str()) {
                    out.push(n);
                }
            }
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Var(_, _) => {}
            ExprKind::Not(p) | ExprKind::Neg(p) => deps(p, index, out),
            ExprKind::Cmp(_, l, r)
            | ExprKind::And(l, r)
            | ExprKind::Or(l, r)
            | ExprKind::Implies(l, r)
            | ExprKind::Add(l, r)
            | ExprKind::Sub(l, r)
            | ExprKind::Min(l, r)
            | ExprKind::Max(l, r) => {
                deps(l, index, out);
                deps(r, index, out);
            }
            ExprKind::Clamp(x, lo, hi) => {
                deps(x, index, out);
                deps(lo, index, out);
                deps(hi, index, out);
            }
        }
    }

    // Topological order by depth-first search; a back edge is a cycle.
    const UNSEEN: u8 = 0;
    const OPEN: u8 = 1;
    const DONE: u8 = 2;
    let n = def.defines.len();
    let mut mark = vec![UNSEEN; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if mark[start] != UNSEEN {
            continue;
        }
        stack.push((start, 0));
        mark[start] = OPEN;
        while let Some((i, di)) = stack.last().copied() {
            let mut ds: Vec<&str> = Vec::new();
            deps(&def.defines[i].body, &index, &mut ds);
            if di < ds.len() {
                let j = index[ds[di]];
                stack.last_mut().unwrap().1 += 1;
                match mark[j] {
                    UNSEEN => {
                        mark[j] = OPEN;
                        stack.push((j, 0));
                    }
                    OPEN => {
                        return Err(ValidationError::CyclicDefine {
                            name: def.defines[j].name.clone(),
                            span: def.defines[j].name_span,
                        });
                    }
                    _ => {}
                }
            } else {
                mark[i] = DONE;
                order.push(i);
                stack.pop();
            }
        }
    }

    let mut compiled: HashMap<String, CExpr> = HashMap::new();
    for i in order {
        let d = &def.defines[i];
        let ctx = CompileCtx { vars, lookup, defines: &compiled };
        let (body, ty) = ctx.compile(&d.body, Some(&Ty::Bool))?;
        if ty != Ty::Bool {
            return Err(ValidationError::TypeMismatch {
                message: format!("define {} must be boolean", d.name),
                span: d.name_span,
            });
        }
        compiled.insert(d.name.clone(), body);
    }
    Ok(compiled)
}
