//! Tokenizer. Tracks 1-based line/column positions; accepts LF or CRLF
//! line endings and `//` comments.

use super::ParseError;
use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Tok {
    Ident(String),
    Int(i64),
    // Keywords.
    Agent,
    Var,
    Init,
    Rule,
    Prio,
    Define,
    Formula,
    True,
    False,
    And,
    Or,
    Not,
    Clamp,
    Min,
    Max,
    Ag,
    Af,
    Ax,
    Eg,
    Ef,
    Ex,
    A,
    E,
    U,
    // Punctuation.
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    DotDot,
    Arrow,
    ColonEq,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Eof,
}

impl Tok {
    /// Short rendering for error messages.
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Agent => "agent",
            Tok::Var => "var",
            Tok::Init => "init",
            Tok::Rule => "rule",
            Tok::Prio => "prio",
            Tok::Define => "define",
            Tok::Formula => "formula",
            Tok::True => "true",
            Tok::False => "false",
            Tok::And => "and",
            Tok::Or => "or",
            Tok::Not => "not",
            Tok::Clamp => "clamp",
            Tok::Min => "min",
            Tok::Max => "max",
            Tok::Ag => "AG",
            Tok::Af => "AF",
            Tok::Ax => "AX",
            Tok::Eg => "EG",
            Tok::Ef => "EF",
            Tok::Ex => "EX",
            Tok::A => "A",
            Tok::E => "E",
            Tok::U => "U",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Arrow => "->",
            Tok::ColonEq => ":=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => unreachable!(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn keyword(ident: &str) -> Option<Tok> {
    Some(match ident {
        "agent" => Tok::Agent,
        "var" => Tok::Var,
        "init" => Tok::Init,
        "rule" => Tok::Rule,
        "prio" => Tok::Prio,
        "define" => Tok::Define,
        "formula" => Tok::Formula,
        "true" => Tok::True,
        "false" => Tok::False,
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "clamp" => Tok::Clamp,
        "min" => Tok::Min,
        "max" => Tok::Max,
        "AG" => Tok::Ag,
        "AF" => Tok::Af,
        "AX" => Tok::Ax,
        "EG" => Tok::Eg,
        "EF" => Tok::Ef,
        "EX" => Tok::Ex,
        "A" => Tok::A,
        "E" => Tok::E,
        "U" => Tok::U,
        _ => return None,
    })
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self, len: u32) -> SourceSpan {
        SourceSpan::new(self.line, self.col, len)
    }
}

pub(super) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();

    loop {
        // Skip whitespace and comments.
        loop {
            match cur.peek() {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('/') => {
                    let mut probe = cur.chars.clone();
                    probe.next();
                    if probe.peek() == Some(&'/') {
                        while let Some(c) = cur.peek() {
                            if c == '\n' {
                                break;
                            }
                            cur.bump();
                        }
                    } else {
                        return Err(ParseError::new(
                            cur.span(1),
                            "unexpected character `/`",
                            "`//` to start a comment",
                        ));
                    }
                }
                _ => break,
            }
        }

        let start = cur.span(1);
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, span: start });
            return Ok(out);
        };

        let tok = if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            let len = s.chars().count() as u32;
            let tok = keyword(&s).unwrap_or(Tok::Ident(s));
            out.push(Token { tok, span: SourceSpan::new(start.line, start.col, len) });
            continue;
        } else if c.is_ascii_digit() {
            let mut n: i128 = 0;
            let mut len = 0u32;
            while let Some(c) = cur.peek() {
                if let Some(d) = c.to_digit(10) {
                    n = n * 10 + d as i128;
                    len += 1;
                    cur.bump();
                    if n > i64::MAX as i128 {
                        return Err(ParseError::new(
                            SourceSpan::new(start.line, start.col, len),
                            "integer literal too large",
                            "",
                        ));
                    }
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Int(n as i64),
                span: SourceSpan::new(start.line, start.col, len),
            });
            continue;
        } else {
            cur.bump();
            match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '+' => Tok::Plus,
                '=' => Tok::Eq,
                ':' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        Tok::ColonEq
                    } else {
                        Tok::Colon
                    }
                }
                '.' => {
                    if cur.peek() == Some('.') {
                        cur.bump();
                        Tok::DotDot
                    } else {
                        Tok::Dot
                    }
                }
                '-' => {
                    if cur.peek() == Some('>') {
                        cur.bump();
                        Tok::Arrow
                    } else {
                        Tok::Minus
                    }
                }
                '!' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        Tok::Ne
                    } else {
                        return Err(ParseError::new(
                            start,
                            "unexpected character `!`",
                            "`!=`",
                        ));
                    }
                }
                '<' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        Tok::Le
                    } else {
                        Tok::Lt
                    }
                }
                '>' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        Tok::Ge
                    } else {
                        Tok::Gt
                    }
                }
                other => {
                    return Err(ParseError::new(
                        start,
                        format!("unexpected character `{other}`"),
                        "",
                    ));
                }
            }
        };

        let len = match tok {
            Tok::DotDot | Tok::Arrow | Tok::ColonEq | Tok::Ne | Tok::Le | Tok::Ge => 2,
            _ => 1,
        };
        out.push(Token { tok, span: SourceSpan::new(start.line, start.col, len) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        lex(text).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn punctuation_pairs_lex_greedily() {
        assert_eq!(
            kinds("0..10 := -> != <= >= . -"),
            vec![
                Tok::Int(0),
                Tok::DotDot,
                Tok::Int(10),
                Tok::ColonEq,
                Tok::Arrow,
                Tok::Ne,
                Tok::Le,
                Tok::Ge,
                Tok::Dot,
                Tok::Minus,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn keywords_and_idents_separate() {
        assert_eq!(
            kinds("agent Agency AG aging"),
            vec![
                Tok::Agent,
                Tok::Ident("Agency".into()),
                Tok::Ag,
                Tok::Ident("aging".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_crlf_are_skipped() {
        let toks = lex("var// note\r\nx").unwrap();
        assert_eq!(toks[1].tok, Tok::Ident("x".into()));
        assert_eq!(toks[1].span.line, 2);
        assert_eq!(toks[1].span.col, 1);
    }

    #[test]
    fn error_positions_are_exact() {
        let err = lex("ab @").unwrap_err();
        assert_eq!((err.span.line, err.span.col), (1, 4));
        let err = lex("x\n  !y").unwrap_err();
        assert_eq!((err.span.line, err.span.col), (2, 3));
    }

    #[test]
    fn oversized_integer_is_rejected() {
        assert!(lex("99999999999999999999").is_err());
        assert!(lex(&i64::MAX.to_string()).is_ok());
    }
}
