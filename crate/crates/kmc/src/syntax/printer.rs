//! Canonical pretty-printer. Output re-parses to a structurally equal
//! definition and is byte-stable: agents, then defines, then formulas, with
//! minimal parentheses under the documented precedence.

use crate::ctl::Ctl;
use crate::expr::{Expr, ExprKind};
use crate::model::{AgentDef, Domain, GuardedRule, ModelDef, DEFAULT_PRIORITY};
use std::fmt::Write;

// Precedence levels, shared by the expression and formula grammars.
// Higher binds tighter.
const P_IMPLIES: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_NOT: u8 = 4;
const P_CMP: u8 = 5;
const P_ADD: u8 = 6;
const P_NEG: u8 = 7;
const P_LEAF: u8 = 8;

fn expr_prec(e: &ExprKind) -> u8 {
    match e {
        ExprKind::Implies(..) => P_IMPLIES,
        ExprKind::Or(..) => P_OR,
        ExprKind::And(..) => P_AND,
        ExprKind::Not(..) => P_NOT,
        ExprKind::Cmp(..) => P_CMP,
        ExprKind::Add(..) | ExprKind::Sub(..) => P_ADD,
        ExprKind::Neg(..) => P_NEG,
        _ => P_LEAF,
    }
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let prec = expr_prec(&e.kind);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Ident(name) => out.push_str(name),
        ExprKind::Var(agent, var) => {
            let _ = write!(out, "{agent}.{var}");
        }
        ExprKind::Cmp(op, a, b) => {
            write_expr(out, a, P_ADD);
            let _ = write!(out, " {} ", op.token());
            write_expr(out, b, P_ADD);
        }
        ExprKind::Not(a) => {
            out.push_str("not ");
            write_expr(out, a, P_NOT);
        }
        ExprKind::And(a, b) => {
            write_expr(out, a, P_AND);
            out.push_str(" and ");
            write_expr(out, b, P_AND + 1);
        }
        ExprKind::Or(a, b) => {
            write_expr(out, a, P_OR);
            out.push_str(" or ");
            write_expr(out, b, P_OR + 1);
        }
        ExprKind::Implies(a, b) => {
            write_expr(out, a, P_IMPLIES + 1);
            out.push_str(" -> ");
            write_expr(out, b, P_IMPLIES);
        }
        ExprKind::Add(a, b) => {
            write_expr(out, a, P_ADD);
            out.push_str(" + ");
            write_expr(out, b, P_ADD + 1);
        }
        ExprKind::Sub(a, b) => {
            write_expr(out, a, P_ADD);
            out.push_str(" - ");
            write_expr(out, b, P_ADD + 1);
        }
        ExprKind::Neg(a) => {
            out.push('-');
            write_expr(out, a, P_NEG);
        }
        ExprKind::Clamp(x, lo, hi) => {
            out.push_str("clamp(");
            write_expr(out, x, P_IMPLIES);
            out.push_str(", ");
            write_expr(out, lo, P_IMPLIES);
            out.push_str(", ");
            write_expr(out, hi, P_IMPLIES);
            out.push(')');
        }
        ExprKind::Min(a, b) | ExprKind::Max(a, b) => {
            out.push_str(if matches!(e.kind, ExprKind::Min(..)) { "min(" } else { "max(" });
            write_expr(out, a, P_IMPLIES);
            out.push_str(", ");
            write_expr(out, b, P_IMPLIES);
            out.push(')');
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders an expression with minimal parentheses.
pub fn format_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, P_IMPLIES);
    out
}

fn ctl_prec(f: &Ctl<Expr>) -> u8 {
    match f {
        Ctl::Implies(..) => P_IMPLIES,
        Ctl::Or(..) => P_OR,
        Ctl::And(..) => P_AND,
        Ctl::Not(..) => P_NOT,
        _ => P_CMP,
    }
}

fn write_ctl(out: &mut String, f: &Ctl<Expr>, min_prec: u8) {
    let prec = ctl_prec(f);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match f {
        Ctl::True => out.push_str("true"),
        Ctl::Atom(e) => {
            // Atoms with a boolean-operator top would re-parse as formula
            // connectives; parenthesize to keep them atomic on re-parse.
            if expr_prec(&e.kind) < P_CMP {
                out.push('(');
                write_expr(out, e, P_IMPLIES);
                out.push(')');
            } else {
                write_expr(out, e, P_IMPLIES);
            }
        }
        Ctl::Not(p) => {
            out.push_str("not ");
            write_ctl(out, p, P_NOT);
        }
        Ctl::And(p, q) => {
            write_ctl(out, p, P_AND);
            out.push_str(" and ");
            write_ctl(out, q, P_AND + 1);
        }
        Ctl::Or(p, q) => {
            write_ctl(out, p, P_OR);
            out.push_str(" or ");
            write_ctl(out, q, P_OR + 1);
        }
        Ctl::Implies(p, q) => {
            write_ctl(out, p, P_IMPLIES + 1);
            out.push_str(" -> ");
            write_ctl(out, q, P_IMPLIES);
        }
        Ctl::Ex(p) | Ctl::Ax(p) | Ctl::Ef(p) | Ctl::Af(p) | Ctl::Eg(p) | Ctl::Ag(p) => {
            out.push_str(match f {
                Ctl::Ex(_) => "EX(",
                Ctl::Ax(_) => "AX(",
                Ctl::Ef(_) => "EF(",
                Ctl::Af(_) => "AF(",
                Ctl::Eg(_) => "EG(",
                Ctl::Ag(_) => "AG(",
                _ => unreachable!(),
            });
            write_ctl(out, p, P_IMPLIES);
            out.push(')');
        }
        Ctl::Eu(p, q) | Ctl::Au(p, q) => {
            out.push_str(if matches!(f, Ctl::Eu(..)) { "E[" } else { "A[" });
            write_ctl(out, p, P_IMPLIES);
            out.push_str(" U ");
            write_ctl(out, q, P_IMPLIES);
            out.push(']');
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders a CTL formula with minimal parentheses.
pub fn format_formula(f: &Ctl<Expr>) -> String {
    let mut out = String::new();
    write_ctl(&mut out, f, P_IMPLIES);
    out
}

fn write_domain(out: &mut String, d: &Domain) {
    match d {
        Domain::Enum(members) => {
            out.push('{');
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(m);
            }
            out.push('}');
        }
        Domain::Int { lo, hi } => {
            let _ = write!(out, "{lo}..{hi}");
        }
    }
}

fn write_rule(out: &mut String, r: &GuardedRule) {
    out.push_str("  rule ");
    if r.priority != DEFAULT_PRIORITY {
        let _ = write!(out, "[prio {}] ", r.priority);
    }
    // Guards parse at the `or` level, so an implication needs parentheses.
    write_expr(out, &r.guard, P_OR);
    out.push_str(" -> ");
    for (i, a) in r.assigns.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&a.var);
        out.push_str(" := ");
        write_expr(out, &a.value, P_IMPLIES);
    }
    out.push_str(";\n");
}

fn agent_block(a: &AgentDef) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "agent {} {{", a.name);
    for v in &a.vars {
        out.push_str("  var ");
        out.push_str(&v.name);
        out.push_str(" : ");
        write_domain(&mut out, &v.domain);
        let _ = writeln!(out, " init {};", v.init);
    }
    for r in &a.rules {
        write_rule(&mut out, r);
    }
    out.push('}');
    out
}

/// Renders a model canonically: agents, then defines, then formulas.
pub fn format_model(def: &ModelDef) -> String {
    let mut blocks: Vec<String> = def.agents.iter().map(agent_block).collect();
    if !def.defines.is_empty() {
        let mut block = String::new();
        for (i, d) in def.defines.iter().enumerate() {
            if i > 0 {
                block.push('\n');
            }
            block.push_str("define ");
            block.push_str(&d.name);
            block.push_str(" := ");
            write_expr(&mut block, &d.body, P_IMPLIES);
            block.push(';');
        }
        blocks.push(block);
    }
    if !def.formulas.is_empty() {
        let mut block = String::new();
        for (i, f) in def.formulas.iter().enumerate() {
            if i > 0 {
                block.push('\n');
            }
            block.push_str("formula ");
            block.push_str(&f.name);
            block.push_str(" := ");
            write_ctl(&mut block, &f.body, P_IMPLIES);
            block.push(';');
        }
        blocks.push(block);
    }
    let mut out = blocks.join("\n\n");
    out.push('\n');
    out
}
