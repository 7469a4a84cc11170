//! Concrete syntax: lexer, recursive-descent parser, and canonical printer.
//!
//! Grammar sketch (terminals quoted):
//!
//! ```text
//! model    := item* ;
//! item     := agent | define | formula ;
//! agent    := "agent" IDENT "{" (vardecl | rule)* "}" ;
//! vardecl  := "var" IDENT ":" domain "init" value ";" ;
//! domain   := "{" IDENT ("," IDENT)* "}" | INT ".." INT ;
//! rule     := "rule" ("[" "prio" INT "]")? expr "->" assign ("," assign)* ";" ;
//! assign   := IDENT ":=" expr ;
//! define   := "define" IDENT ":=" expr ";" ;
//! formula  := "formula" IDENT ":=" ctl ";" ;
//! ```
//!
//! Expression precedence, tightest to loosest: primary (literals, variable
//! references, builtins, parentheses, unary minus), additive `+`/`-`,
//! comparisons, `not`, `and`, `or`, `implies` written `->`
//! (right-associative). Comparisons do not chain. Rule guards parse at the
//! `or` level, so the rule arrow is unambiguous; a guard with a top-level
//! implication needs parentheses.
//!
//! CTL formulas share the boolean layers of the expression grammar;
//! temporal operators `AG AF AX EG EF EX` prefix a parenthesized argument
//! and `A[p U q]` / `E[p U q]` are bracketed.

mod lexer;
mod parser;
mod printer;

use crate::ctl::Ctl;
use crate::expr::Expr;
use crate::model::ModelDef;
use crate::span::SourceSpan;
use thiserror::Error;

pub use printer::{format_expr, format_formula, format_model};

/// A syntax error at a source position; always the first error in the text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// Summary of what would have been accepted; empty when not applicable.
    pub expected: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, "; expected {}", self.expected)?;
        }
        Ok(())
    }
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>, expected: impl Into<String>) -> Self {
        ParseError { span, message: message.into(), expected: expected.into() }
    }

    /// Source order on error positions, used to keep the furthest error when
    /// a leaf admits two parses.
    fn pos(&self) -> (u32, u32) {
        (self.span.line, self.span.col)
    }
}

/// Parses a complete model file (agents, defines, formulas).
pub fn parse_model(text: &str) -> Result<ModelDef, ParseError> {
    let tokens = lexer::lex(text)?;
    parser::Parser::new(&tokens).model()
}

/// Parses a standalone CTL formula.
pub fn parse_formula(text: &str) -> Result<Ctl<Expr>, ParseError> {
    let tokens = lexer::lex(text)?;
    parser::Parser::new(&tokens).standalone_formula()
}

/// Parses a standalone expression (guards, defines, atoms).
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = lexer::lex(text)?;
    parser::Parser::new(&tokens).standalone_expr()
}
