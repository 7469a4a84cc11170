//! Recursive-descent parser for models, expressions, and CTL formulas.

use super::lexer::{Tok, Token};
use super::ParseError;
use crate::ctl::Ctl;
use crate::expr::{CmpOp, Expr, ExprKind, Value};
use crate::model::{
    AgentDef, Assign, DefineDef, Domain, FormulaDef, GuardedRule, ModelDef, VariableDecl,
    DEFAULT_PRIORITY,
};
use crate::span::SourceSpan;

pub(super) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    pub(super) fn new(toks: &'a [Token]) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(
            self.span(),
            format!("unexpected {}", self.peek().describe()),
            expected,
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.err(tok.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek() {
            Tok::Ident(_) => {
                let t = self.bump();
                let Tok::Ident(name) = &t.tok else { unreachable!() };
                Ok((name.clone(), t.span))
            }
            _ => self.err(what),
        }
    }

    // ---- model items ----

    pub(super) fn model(&mut self) -> PResult<ModelDef> {
        let mut def = ModelDef::default();
        loop {
            match self.peek() {
                Tok::Agent => def.agents.push(self.agent()?),
                Tok::Define => def.defines.push(self.define()?),
                Tok::Formula => def.formulas.push(self.formula()?),
                Tok::Eof => return Ok(def),
                _ => return self.err("`agent`, `define`, or `formula`"),
            }
        }
    }

    fn agent(&mut self) -> PResult<AgentDef> {
        self.expect(Tok::Agent)?;
        let (name, name_span) = self.ident("an agent name")?;
        let mut agent = AgentDef::new(name);
        agent.name_span = name_span;
        self.expect(Tok::LBrace)?;
        loop {
            match self.peek() {
                Tok::Var => agent.vars.push(self.vardecl()?),
                Tok::Rule => agent.rules.push(self.rule()?),
                Tok::RBrace => {
                    self.bump();
                    return Ok(agent);
                }
                _ => return self.err("`var`, `rule`, or `}`"),
            }
        }
    }

    fn vardecl(&mut self) -> PResult<VariableDecl> {
        self.expect(Tok::Var)?;
        let (name, name_span) = self.ident("a variable name")?;
        self.expect(Tok::Colon)?;
        let domain = self.domain()?;
        self.expect(Tok::Init)?;
        let (init, init_span) = self.value()?;
        self.expect(Tok::Semi)?;
        let mut decl = VariableDecl::new(name, domain, init);
        decl.name_span = name_span;
        decl.init_span = init_span;
        Ok(decl)
    }

    fn domain(&mut self) -> PResult<Domain> {
        match self.peek() {
            Tok::LBrace => {
                self.bump();
                let mut members = vec![self.ident("an enum member")?.0];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    members.push(self.ident("an enum member")?.0);
                }
                self.expect(Tok::RBrace)?;
                Ok(Domain::Enum(members))
            }
            Tok::Int(_) | Tok::Minus => {
                let lo = self.signed_int()?.0;
                self.expect(Tok::DotDot)?;
                let hi = self.signed_int()?.0;
                Ok(Domain::Int { lo, hi })
            }
            _ => self.err("`{` or an integer range"),
        }
    }

    fn signed_int(&mut self) -> PResult<(i64, SourceSpan)> {
        let neg = if *self.peek() == Tok::Minus {
            Some(self.bump().span)
        } else {
            None
        };
        match *self.peek() {
            Tok::Int(n) => {
                let span = self.bump().span;
                match neg {
                    Some(s) => Ok((-n, s)),
                    None => Ok((n, span)),
                }
            }
            _ => self.err("an integer"),
        }
    }

    fn value(&mut self) -> PResult<(Value, SourceSpan)> {
        match self.peek() {
            Tok::Int(_) | Tok::Minus => {
                let (n, span) = self.signed_int()?;
                Ok((Value::Int(n), span))
            }
            Tok::True => Ok((Value::Bool(true), self.bump().span)),
            Tok::False => Ok((Value::Bool(false), self.bump().span)),
            Tok::Ident(_) => {
                let (name, span) = self.ident("a value")?;
                Ok((Value::Sym(name), span))
            }
            _ => self.err("an integer, boolean, or enum member"),
        }
    }

    fn rule(&mut self) -> PResult<GuardedRule> {
        let rule_span = self.expect(Tok::Rule)?;
        let mut priority = DEFAULT_PRIORITY;
        if *self.peek() == Tok::LBracket {
            self.bump();
            self.expect(Tok::Prio)?;
            match *self.peek() {
                Tok::Int(n) if n >= 0 && n <= u32::MAX as i64 => {
                    priority = n as u32;
                    self.bump();
                }
                _ => return self.err("a nonnegative priority"),
            }
            self.expect(Tok::RBracket)?;
        }
        // Guards stop below `->`, which separates guard from assignments.
        let guard = self.expr_or()?;
        self.expect(Tok::Arrow)?;
        let mut assigns = vec![self.assign()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            assigns.push(self.assign()?);
        }
        self.expect(Tok::Semi)?;
        let mut rule = GuardedRule::new(guard, assigns).with_priority(priority);
        rule.span = rule_span;
        Ok(rule)
    }

    fn assign(&mut self) -> PResult<Assign> {
        let (var, var_span) = self.ident("a variable name")?;
        self.expect(Tok::ColonEq)?;
        let value = self.expr()?;
        let mut a = Assign::new(var, value);
        a.var_span = var_span;
        Ok(a)
    }

    fn define(&mut self) -> PResult<DefineDef> {
        self.expect(Tok::Define)?;
        let (name, name_span) = self.ident("a define name")?;
        self.expect(Tok::ColonEq)?;
        let body = self.expr()?;
        self.expect(Tok::Semi)?;
        let mut d = DefineDef::new(name, body);
        d.name_span = name_span;
        Ok(d)
    }

    fn formula(&mut self) -> PResult<FormulaDef> {
        self.expect(Tok::Formula)?;
        let (name, name_span) = self.ident("a formula name")?;
        self.expect(Tok::ColonEq)?;
        let body = self.ctl()?;
        self.expect(Tok::Semi)?;
        let mut f = FormulaDef::new(name, body);
        f.name_span = name_span;
        Ok(f)
    }

    pub(super) fn standalone_formula(&mut self) -> PResult<Ctl<Expr>> {
        let f = self.ctl()?;
        self.expect(Tok::Eof)?;
        Ok(f)
    }

    pub(super) fn standalone_expr(&mut self) -> PResult<Expr> {
        let e = self.expr()?;
        self.expect(Tok::Eof)?;
        Ok(e)
    }

    // ---- expressions ----
    // Levels, loosest to tightest: implies, or, and, not, cmp, add, unary.

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.expr_or()?;
        if *self.peek() == Tok::Arrow {
            let span = self.bump().span;
            let rhs = self.expr()?; // right-associative
            Ok(Expr::new(ExprKind::Implies(Box::new(lhs), Box::new(rhs)), span))
        } else {
            Ok(lhs)
        }
    }

    fn expr_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_and()?;
        while *self.peek() == Tok::Or {
            let span = self.bump().span;
            let rhs = self.expr_and()?;
            lhs = Expr::new(ExprKind::Or(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn expr_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_not()?;
        while *self.peek() == Tok::And {
            let span = self.bump().span;
            let rhs = self.expr_not()?;
            lhs = Expr::new(ExprKind::And(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn expr_not(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Not {
            let span = self.bump().span;
            let inner = self.expr_not()?;
            Ok(Expr::new(ExprKind::Not(Box::new(inner)), span))
        } else {
            self.expr_cmp()
        }
    }

    fn expr_cmp(&mut self) -> PResult<Expr> {
        let lhs = self.expr_add()?;
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        let span = self.bump().span;
        let rhs = self.expr_add()?;
        Ok(Expr::new(ExprKind::Cmp(op, Box::new(lhs), Box::new(rhs)), span))
    }

    fn expr_add(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_unary()?;
        loop {
            let plus = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.expr_unary()?;
            let kind = if plus {
                ExprKind::Add(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Sub(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr::new(kind, span);
        }
    }

    fn expr_unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            let span = self.bump().span;
            let inner = self.expr_unary()?;
            // A negated integer literal is the negative literal, however it
            // was written (`-2`, `- 2`, `-(2)`), so formatting as `-2` and
            // reparsing reproduces the same tree.
            if let ExprKind::Int(n) = inner.kind {
                return Ok(Expr::new(ExprKind::Int(n.checked_neg().unwrap_or(n)), span));
            }
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span));
        }
        self.expr_primary()
    }

    fn expr_primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(n), span))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(true), span))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(false), span))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::Dot {
                    self.bump();
                    let (var, _) = self.ident("a variable name")?;
                    Ok(Expr::new(ExprKind::Var(name, var), span))
                } else {
                    Ok(Expr::new(ExprKind::Ident(name), span))
                }
            }
            Tok::Clamp => {
                self.bump();
                self.expect(Tok::LParen)?;
                let x = self.expr()?;
                self.expect(Tok::Comma)?;
                let lo = self.expr()?;
                self.expect(Tok::Comma)?;
                let hi = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::new(
                    ExprKind::Clamp(Box::new(x), Box::new(lo), Box::new(hi)),
                    span,
                ))
            }
            Tok::Min | Tok::Max => {
                let is_min = *self.peek() == Tok::Min;
                self.bump();
                self.expect(Tok::LParen)?;
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::RParen)?;
                let kind = if is_min {
                    ExprKind::Min(Box::new(a), Box::new(b))
                } else {
                    ExprKind::Max(Box::new(a), Box::new(b))
                };
                Ok(Expr::new(kind, span))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => self.err("an expression"),
        }
    }

    // ---- CTL formulas ----
    // Boolean layers mirror the expression grammar; leaves are temporal
    // operators or comparison-level expressions.

    fn ctl(&mut self) -> PResult<Ctl<Expr>> {
        let lhs = self.ctl_or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.ctl()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ctl_or(&mut self) -> PResult<Ctl<Expr>> {
        let mut lhs = self.ctl_and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = lhs.or(self.ctl_and()?);
        }
        Ok(lhs)
    }

    fn ctl_and(&mut self) -> PResult<Ctl<Expr>> {
        let mut lhs = self.ctl_not()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = lhs.and(self.ctl_not()?);
        }
        Ok(lhs)
    }

    fn ctl_not(&mut self) -> PResult<Ctl<Expr>> {
        if *self.peek() == Tok::Not {
            self.bump();
            Ok(self.ctl_not()?.not())
        } else {
            self.ctl_leaf()
        }
    }

    fn ctl_leaf(&mut self) -> PResult<Ctl<Expr>> {
        match self.peek() {
            Tok::Ag | Tok::Af | Tok::Ax | Tok::Eg | Tok::Ef | Tok::Ex => {
                let op = self.bump().tok.clone();
                self.expect(Tok::LParen)?;
                let inner = self.ctl()?;
                self.expect(Tok::RParen)?;
                Ok(match op {
                    Tok::Ag => inner.ag(),
                    Tok::Af => inner.af(),
                    Tok::Ax => inner.ax(),
                    Tok::Eg => inner.eg(),
                    Tok::Ef => inner.ef(),
                    Tok::Ex => inner.ex(),
                    _ => unreachable!(),
                })
            }
            Tok::A | Tok::E => {
                let universal = *self.peek() == Tok::A;
                self.bump();
                self.expect(Tok::LBracket)?;
                let p = self.ctl()?;
                self.expect(Tok::U)?;
                let q = self.ctl()?;
                self.expect(Tok::RBracket)?;
                Ok(if universal { p.au(q) } else { p.eu(q) })
            }
            _ => {
                // A leaf is an expression unless it contains a temporal
                // operator inside parentheses; try the expression grammar
                // first and fall back to a parenthesized formula.
                let save = self.pos;
                match self.expr_cmp() {
                    Ok(e) => Ok(decompose(e)),
                    Err(expr_err) => {
                        self.pos = save;
                        if *self.peek() != Tok::LParen {
                            return Err(expr_err);
                        }
                        self.bump();
                        let inner = match self.ctl() {
                            Ok(f) => f,
                            Err(ctl_err) => {
                                return Err(furthest(expr_err, ctl_err));
                            }
                        };
                        match self.expect(Tok::RParen) {
                            Ok(_) => Ok(inner),
                            Err(ctl_err) => Err(furthest(expr_err, ctl_err)),
                        }
                    }
                }
            }
        }
    }
}

/// Keeps the error that made it furthest through the input.
fn furthest(a: ParseError, b: ParseError) -> ParseError {
    if b.pos() >= a.pos() {
        b
    } else {
        a
    }
}

/// Lifts boolean structure of a parsed leaf expression into CTL connectives
/// so that `(a and b) -> AX(c)` and `a and b -> AX(c)` produce the same tree.
fn decompose(e: Expr) -> Ctl<Expr> {
    let Expr { kind, span } = e;
    match kind {
        ExprKind::And(a, b) => decompose(*a).and(decompose(*b)),
        ExprKind::Or(a, b) => decompose(*a).or(decompose(*b)),
        ExprKind::Implies(a, b) => decompose(*a).implies(decompose(*b)),
        ExprKind::Not(a) => decompose(*a).not(),
        ExprKind::Bool(true) => Ctl::True,
        other => Ctl::Atom(Expr::new(other, span)),
    }
}
