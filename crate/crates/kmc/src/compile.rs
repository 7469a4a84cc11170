//! Slot-resolved expression form used by the graph builder and the checker.
//!
//! Validation lowers every guard, assignment, and formula atom into a
//! [`CExpr`] whose variable reads are direct indexes into the packed state
//! vector. Enum values are represented by their member ordinal; integers by
//! their actual value. Booleans evaluate to 0 or 1.

use crate::expr::{CmpOp, Expr, ExprKind};
use crate::model::{ValidationError, VarInfo};
use crate::span::SourceSpan;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Ty {
    Int,
    Bool,
    /// Enum type identified by its member list; domains with identical
    /// members are interchangeable.
    Enum(Vec<String>),
}

impl Ty {
    fn describe(&self) -> String {
        match self {
            Ty::Int => "integer".to_string(),
            Ty::Bool => "boolean".to_string(),
            Ty::Enum(members) => format!("enum {{{}}}", members.join(", ")),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum CExpr {
    Const(i64),
    SlotEnum(u32),
    SlotInt { slot: u32, lo: i64 },
    Cmp(CmpOp, Box<CExpr>, Box<CExpr>),
    Not(Box<CExpr>),
    And(Box<CExpr>, Box<CExpr>),
    Or(Box<CExpr>, Box<CExpr>),
    Add(Box<CExpr>, Box<CExpr>),
    Sub(Box<CExpr>, Box<CExpr>),
    Neg(Box<CExpr>),
    Clamp(Box<CExpr>, Box<CExpr>, Box<CExpr>),
    Min(Box<CExpr>, Box<CExpr>),
    Max(Box<CExpr>, Box<CExpr>),
}

impl CExpr {
    /// Evaluates against a packed state vector. Arithmetic saturates at the
    /// i64 range; domains keep realistic models far from the edges.
    pub(crate) fn eval(&self, s: &[u16]) -> i64 {
        match self {
            CExpr::Const(n) => *n,
            CExpr::SlotEnum(slot) => s[*slot as usize] as i64,
            CExpr::SlotInt { slot, lo } => lo + s[*slot as usize] as i64,
            CExpr::Cmp(op, l, r) => {
                let (a, b) = (l.eval(s), r.eval(s));
                let res = match op {
                    CmpOp::Eq => a == b,
                    CmpOp::Ne => a != b,
                    CmpOp::Lt => a < b,
                    CmpOp::Le => a <= b,
                    CmpOp::Gt => a > b,
                    CmpOp::Ge => a >= b,
                };
                res as i64
            }
            CExpr::Not(p) => (p.eval(s) == 0) as i64,
            CExpr::And(p, q) => (p.eval(s) != 0 && q.eval(s) != 0) as i64,
            CExpr::Or(p, q) => (p.eval(s) != 0 || q.eval(s) != 0) as i64,
            CExpr::Add(l, r) => l.eval(s).saturating_add(r.eval(s)),
            CExpr::Sub(l, r) => l.eval(s).saturating_sub(r.eval(s)),
            CExpr::Neg(x) => x.eval(s).saturating_neg(),
            CExpr::Clamp(x, lo, hi) => x.eval(s).max(lo.eval(s)).min(hi.eval(s)),
            CExpr::Min(l, r) => l.eval(s).min(r.eval(s)),
            CExpr::Max(l, r) => l.eval(s).max(r.eval(s)),
        }
    }

    pub(crate) fn eval_bool(&self, s: &[u16]) -> bool {
        self.eval(s) != 0
    }

    /// Appends every state slot this expression reads to `out`.
    pub(crate) fn collect_slots(&self, out: &mut Vec<u32>) {
        match self {
            CExpr::Const(_) => {}
            CExpr::SlotEnum(slot) | CExpr::SlotInt { slot, .. } => out.push(*slot),
            CExpr::Not(p) | CExpr::Neg(p) => p.collect_slots(out),
            CExpr::Cmp(_, l, r)
            | CExpr::And(l, r)
            | CExpr::Or(l, r)
            | CExpr::Add(l, r)
            | CExpr::Sub(l, r)
            | CExpr::Min(l, r)
            | CExpr::Max(l, r) => {
                l.collect_slots(out);
                r.collect_slots(out);
            }
            CExpr::Clamp(x, lo, hi) => {
                x.collect_slots(out);
                lo.collect_slots(out);
                hi.collect_slots(out);
            }
        }
    }
}

/// A compiled assignment. Enum targets need no runtime check: typing
/// guarantees the ordinal is in range. Integer targets are range-checked when
/// successors are computed.
#[derive(Debug, Clone)]
pub(crate) enum CAssign {
    Enum { slot: u32, rhs: CExpr },
    Int { slot: u32, lo: i64, hi: i64, rhs: CExpr },
}

pub(crate) struct CompileCtx<'a> {
    pub vars: &'a [VarInfo],
    pub lookup: &'a HashMap<(String, String), usize>,
    pub defines: &'a HashMap<String, CExpr>,
}

impl CompileCtx<'_> {
    fn mismatch(&self, span: SourceSpan, msg: impl Into<String>) -> ValidationError {
        ValidationError::TypeMismatch { message: msg.into(), span }
    }

    fn slot_expr(&self, slot: usize) -> (CExpr, Ty) {
        let info = &self.vars[slot];
        match &info.domain {
            crate::model::Domain::Enum(members) => {
                (CExpr::SlotEnum(slot as u32), Ty::Enum(members.clone()))
            }
            crate::model::Domain::Int { lo, .. } => {
                (CExpr::SlotInt { slot: slot as u32, lo: *lo }, Ty::Int)
            }
        }
    }

    /// Compiles an expression. `expected` supplies the enum domain against
    /// which a bare identifier is resolved as a member literal.
    pub(crate) fn compile(
        &self,
        e: &Expr,
        expected: Option<&Ty>,
    ) -> Result<(CExpr, Ty), ValidationError> {
        match &e.kind {
            ExprKind::Int(n) => Ok((CExpr::Const(*n), Ty::Int)),
            ExprKind::Bool(b) => Ok((CExpr::Const(*b as i64), Ty::Bool)),
            ExprKind::Ident(name) => {
                if let Some(body) = self.defines.get(name) {
                    return Ok((body.clone(), Ty::Bool));
                }
                if let Some(Ty::Enum(members)) = expected {
                    if let Some(ord) = members.iter().position(|m| m == name) {
                        return Ok((CExpr::Const(ord as i64), Ty::Enum(members.clone())));
                    }
                    return Err(self.mismatch(
                        e.span,
                        format!("{name} is not a member of {}", Ty::Enum(members.clone()).describe()),
                    ));
                }
                Err(ValidationError::UnknownIdent { name: name.clone(), span: e.span })
            }
            ExprKind::Var(agent, var) => {
                let slot = self
                    .lookup
                    .get(&(agent.clone(), var.clone()))
                    .copied()
                    .ok_or_else(|| ValidationError::UnknownVariable {
                        agent: agent.clone(),
                        var: var.clone(),
                        span: e.span,
                    })?;
                Ok(self.slot_expr(slot))
            }
            ExprKind::Cmp(op, l, r) => {
                // A bare identifier gets its enum domain from the other side.
                let bare = |x: &Expr| {
                    matches!(&x.kind, ExprKind::Ident(n) if !self.defines.contains_key(n))
                };
                let (cl, tl, cr, tr) = if bare(l) && !bare(r) {
                    let (cr, tr) = self.compile(r, None)?;
                    let (cl, tl) = self.compile(l, Some(&tr))?;
                    (cl, tl, cr, tr)
                } else {
                    let (cl, tl) = self.compile(l, None)?;
                    let (cr, tr) = self.compile(r, Some(&tl))?;
                    (cl, tl, cr, tr)
                };
                match (&tl, &tr) {
                    (Ty::Int, Ty::Int) => {}
                    (Ty::Enum(a), Ty::Enum(b)) => {
                        if a != b {
                            return Err(self.mismatch(
                                e.span,
                                format!(
                                    "cannot compare {} with {}",
                                    tl.describe(),
                                    tr.describe()
                                ),
                            ));
                        }
                        if !matches!(op, CmpOp::Eq | CmpOp::Ne) {
                            return Err(self.mismatch(
                                e.span,
                                format!("enum operands support = and != only, not {}", op.token()),
                            ));
                        }
                    }
                    _ => {
                        return Err(self.mismatch(
                            e.span,
                            format!(
                                "comparison needs integer or same-enum operands, got {} and {}",
                                tl.describe(),
                                tr.describe()
                            ),
                        ));
                    }
                }
                Ok((CExpr::Cmp(*op, Box::new(cl), Box::new(cr)), Ty::Bool))
            }
            ExprKind::Not(p) => {
                let c = self.compile_bool(p)?;
                Ok((CExpr::Not(Box::new(c)), Ty::Bool))
            }
            ExprKind::And(p, q) => {
                let (cp, cq) = (self.compile_bool(p)?, self.compile_bool(q)?);
                Ok((CExpr::And(Box::new(cp), Box::new(cq)), Ty::Bool))
            }
            ExprKind::Or(p, q) => {
                let (cp, cq) = (self.compile_bool(p)?, self.compile_bool(q)?);
                Ok((CExpr::Or(Box::new(cp), Box::new(cq)), Ty::Bool))
            }
            ExprKind::Implies(p, q) => {
                let (cp, cq) = (self.compile_bool(p)?, self.compile_bool(q)?);
                Ok((CExpr::Or(Box::new(CExpr::Not(Box::new(cp))), Box::new(cq)), Ty::Bool))
            }
            ExprKind::Add(l, r) => {
                let (cl, cr) = (self.compile_int(l)?, self.compile_int(r)?);
                Ok((CExpr::Add(Box::new(cl), Box::new(cr)), Ty::Int))
            }
            ExprKind::Sub(l, r) => {
                let (cl, cr) = (self.compile_int(l)?, self.compile_int(r)?);
                Ok((CExpr::Sub(Box::new(cl), Box::new(cr)), Ty::Int))
            }
            ExprKind::Neg(x) => {
                let c = self.compile_int(x)?;
                Ok((CExpr::Neg(Box::new(c)), Ty::Int))
            }
            ExprKind::Clamp(x, lo, hi) => {
                let (cx, clo, chi) =
                    (self.compile_int(x)?, self.compile_int(lo)?, self.compile_int(hi)?);
                Ok((CExpr::Clamp(Box::new(cx), Box::new(clo), Box::new(chi)), Ty::Int))
            }
            ExprKind::Min(l, r) => {
                let (cl, cr) = (self.compile_int(l)?, self.compile_int(r)?);
                Ok((CExpr::Min(Box::new(cl), Box::new(cr)), Ty::Int))
            }
            ExprKind::Max(l, r) => {
                let (cl, cr) = (self.compile_int(l)?, self.compile_int(r)?);
                Ok((CExpr::Max(Box::new(cl), Box::new(cr)), Ty::Int))
            }
        }
    }

    pub(crate) fn compile_bool(&self, e: &Expr) -> Result<CExpr, ValidationError> {
        let (c, ty) = self.compile(e, Some(&Ty::Bool))?;
        if ty != Ty::Bool {
            return Err(self.mismatch(e.span, format!("expected boolean, got {}", ty.describe())));
        }
        Ok(c)
    }

    fn compile_int(&self, e: &Expr) -> Result<CExpr, ValidationError> {
        let (c, ty) = self.compile(e, Some(&Ty::Int))?;
        if ty != Ty::Int {
            return Err(self.mismatch(e.span, format!("expected integer, got {}", ty.describe())));
        }
        Ok(c)
    }

    /// Compiles the right-hand side of `slot := rhs`.
    pub(crate) fn compile_assign(
        &self,
        slot: usize,
        rhs: &Expr,
    ) -> Result<CAssign, ValidationError> {
        let info = &self.vars[slot];
        match &info.domain {
            crate::model::Domain::Enum(members) => {
                let want = Ty::Enum(members.clone());
                let (c, ty) = self.compile(rhs, Some(&want))?;
                if ty != want {
                    return Err(self.mismatch(
                        rhs.span,
                        format!("expected {}, got {}", want.describe(), ty.describe()),
                    ));
                }
                Ok(CAssign::Enum { slot: slot as u32, rhs: c })
            }
            crate::model::Domain::Int { lo, hi } => {
                let c = self.compile_int(rhs)?;
                Ok(CAssign::Int { slot: slot as u32, lo: *lo, hi: *hi, rhs: c })
            }
        }
    }
}
