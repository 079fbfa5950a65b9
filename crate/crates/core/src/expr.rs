// SPDX-License-Identifier: Apache-2.0

//! Expression trees used by condition headers and by the HDL front end.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::bitvec::{parse_raw_literal, RawLiteral};
use crate::lexer::{tokenize, LexError, Pos, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    /// `~`, bitwise complement.
    Not,
    /// `!`, logical negation.
    LogicalNot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    And,
    Or,
    Xor,
    LogicalAnd,
    LogicalOr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
            BinaryOp::Xor => "^",
            BinaryOp::LogicalAnd => "&&",
            BinaryOp::LogicalOr => "||",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinaryOp::LogicalAnd | BinaryOp::LogicalOr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Ident(String),
    Literal(RawLiteral),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Only produced by the HDL parser; condition headers reject it.
    Ternary(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn ident(name: &str) -> Self {
        Expr::Ident(name.to_string())
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn identifiers(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_idents(&mut out);
        out
    }

    fn collect_idents<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Ident(name) => {
                out.insert(name);
            }
            Expr::Literal(_) => {}
            Expr::Unary(_, e) => e.collect_idents(out),
            Expr::Binary(_, a, b) => {
                a.collect_idents(out);
                b.collect_idents(out);
            }
            Expr::Ternary(c, a, b) => {
                c.collect_idents(out);
                a.collect_idents(out);
                b.collect_idents(out);
            }
        }
    }

    /// Rewrites every identifier through `f`.
    pub fn map_idents(&self, f: &mut impl FnMut(&str) -> Expr) -> Expr {
        match self {
            Expr::Ident(name) => f(name),
            Expr::Literal(l) => Expr::Literal(*l),
            Expr::Unary(op, e) => Expr::Unary(*op, Box::new(e.map_idents(f))),
            Expr::Binary(op, a, b) => {
                Expr::Binary(*op, Box::new(a.map_idents(f)), Box::new(b.map_idents(f)))
            }
            Expr::Ternary(c, a, b) => Expr::Ternary(
                Box::new(c.map_idents(f)),
                Box::new(a.map_idents(f)),
                Box::new(b.map_idents(f)),
            ),
        }
    }

    pub fn contains_ternary(&self) -> bool {
        match self {
            Expr::Ternary(..) => true,
            Expr::Ident(_) | Expr::Literal(_) => false,
            Expr::Unary(_, e) => e.contains_ternary(),
            Expr::Binary(_, a, b) => a.contains_ternary() || b.contains_ternary(),
        }
    }

    fn is_compound(&self) -> bool {
        matches!(self, Expr::Binary(..) | Expr::Ternary(..))
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    if e.is_compound() {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ident(name) => f.write_str(name),
            Expr::Literal(RawLiteral {
                width: Some(w),
                value,
            }) => write!(f, "{w}'d{value}"),
            Expr::Literal(RawLiteral { width: None, value }) => write!(f, "{value}"),
            Expr::Unary(op, e) => {
                f.write_str(match op {
                    UnaryOp::Not => "~",
                    UnaryOp::LogicalNot => "!",
                })?;
                write_operand(f, e)
            }
            Expr::Binary(op, a, b) => {
                write_operand(f, a)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, b)
            }
            Expr::Ternary(c, a, b) => {
                write_operand(f, c)?;
                f.write_str(" ? ")?;
                write_operand(f, a)?;
                f.write_str(" : ")?;
                write_operand(f, b)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("{pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unsupported construct `{construct}`")]
    Unsupported { pos: Pos, construct: String },
}

impl ExprError {
    pub fn pos(&self) -> Pos {
        match self {
            ExprError::Syntax { pos, .. } | ExprError::Unsupported { pos, .. } => *pos,
        }
    }
}

impl From<LexError> for ExprError {
    fn from(e: LexError) -> Self {
        ExprError::Syntax {
            pos: e.pos,
            message: e.message,
        }
    }
}

/// Parses a standalone expression such as a condition header.
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(tokens);
    let e = cur.expr()?;
    if !cur.at_eof() {
        let t = cur.peek();
        return Err(ExprError::Syntax {
            pos: t.pos,
            message: format!("unexpected `{}` after expression", t.kind),
        });
    }
    Ok(e)
}

/// Token stream with the expression grammar; the HDL parser builds on it.
pub struct Cursor {
    tokens: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self { tokens, at: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    pub fn peek_at(&self, off: usize) -> &Token {
        &self.tokens[(self.at + off).min(self.tokens.len() - 1)]
    }

    pub fn pos(&self) -> Pos {
        self.peek().pos
    }

    pub fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    pub fn is_sym(&self, sym: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Sym(s) if *s == sym)
    }

    pub fn is_word(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    pub fn eat_sym(&mut self, sym: &str) -> bool {
        if self.is_sym(sym) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn eat_word(&mut self, word: &str) -> bool {
        if self.is_word(word) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn syntax(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            pos: self.pos(),
            message: message.into(),
        }
    }

    pub fn expect_sym(&mut self, sym: &str) -> Result<(), ExprError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{sym}`, found `{}`", self.peek().kind)))
        }
    }

    pub fn expect_word(&mut self, word: &str) -> Result<(), ExprError> {
        if self.eat_word(word) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{word}`, found `{}`", self.peek().kind)))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Pos), ExprError> {
        let t = self.peek().clone();
        match t.kind {
            TokenKind::Ident(name) if !name.starts_with('$') => {
                self.next();
                Ok((name, t.pos))
            }
            other => Err(self.syntax(format!("expected identifier, found `{other}`"))),
        }
    }

    pub fn expect_number(&mut self) -> Result<(RawLiteral, Pos), ExprError> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Number(text) => {
                let lit = literal_at(text, t.pos)?;
                self.next();
                Ok((lit, t.pos))
            }
            other => Err(self.syntax(format!("expected number, found `{other}`"))),
        }
    }

    pub fn expr(&mut self) -> Result<Expr, ExprError> {
        let cond = self.binary(0)?;
        if self.eat_sym("?") {
            let a = self.expr()?;
            self.expect_sym(":")?;
            let b = self.expr()?;
            return Ok(Expr::Ternary(Box::new(cond), Box::new(a), Box::new(b)));
        }
        Ok(cond)
    }

    fn binary(&mut self, min_level: usize) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            self.reject_unsupported_operator()?;
            let Some((op, level)) = self.peek_binary() else {
                break;
            };
            if level < min_level {
                break;
            }
            self.next();
            let rhs = self.binary(level + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn peek_binary(&self) -> Option<(BinaryOp, usize)> {
        let TokenKind::Sym(s) = &self.peek().kind else {
            return None;
        };
        // Verilog precedence, loosest first.
        Some(match *s {
            "||" => (BinaryOp::LogicalOr, 0),
            "&&" => (BinaryOp::LogicalAnd, 1),
            "|" => (BinaryOp::Or, 2),
            "^" => (BinaryOp::Xor, 3),
            "&" => (BinaryOp::And, 4),
            "==" => (BinaryOp::Eq, 5),
            "!=" => (BinaryOp::Ne, 5),
            "<" => (BinaryOp::Lt, 6),
            "<=" => (BinaryOp::Le, 6),
            ">" => (BinaryOp::Gt, 6),
            ">=" => (BinaryOp::Ge, 6),
            _ => return None,
        })
    }

    fn reject_unsupported_operator(&self) -> Result<(), ExprError> {
        if let TokenKind::Sym(s) = &self.peek().kind {
            if matches!(
                *s,
                "+" | "-"
                    | "*"
                    | "/"
                    | "%"
                    | "**"
                    | "<<"
                    | ">>"
                    | "<<<"
                    | ">>>"
                    | "==="
                    | "!=="
                    | "~^"
                    | "^~"
            ) {
                return Err(ExprError::Unsupported {
                    pos: self.pos(),
                    construct: format!("operator {s}"),
                });
            }
        }
        Ok(())
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos();
        if self.eat_sym("~") {
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(self.unary()?)));
        }
        if self.eat_sym("!") {
            return Ok(Expr::Unary(UnaryOp::LogicalNot, Box::new(self.unary()?)));
        }
        for reduction in ["&", "|", "^", "~&", "~|", "-", "+"] {
            if self.is_sym(reduction) {
                return Err(ExprError::Unsupported {
                    pos,
                    construct: format!("unary operator {reduction}"),
                });
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Ident(name) => {
                if name.starts_with('$') {
                    return Err(ExprError::Unsupported {
                        pos: t.pos,
                        construct: name.clone(),
                    });
                }
                self.next();
                if self.is_sym("[") {
                    return Err(ExprError::Unsupported {
                        pos: self.pos(),
                        construct: "bit select".into(),
                    });
                }
                if self.is_sym("(") {
                    return Err(ExprError::Unsupported {
                        pos: self.pos(),
                        construct: "function call".into(),
                    });
                }
                Ok(Expr::Ident(name.clone()))
            }
            TokenKind::Number(text) => {
                let lit = literal_at(text, t.pos)?;
                self.next();
                Ok(Expr::Literal(lit))
            }
            TokenKind::Sym("(") => {
                self.next();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            TokenKind::Sym("{") => Err(ExprError::Unsupported {
                pos: t.pos,
                construct: "concatenation".into(),
            }),
            other => Err(self.syntax(format!("expected expression, found `{other}`"))),
        }
    }
}

fn literal_at(text: &str, pos: Pos) -> Result<RawLiteral, ExprError> {
    let lowered = text.to_ascii_lowercase();
    if let Some((_, digits)) = lowered.split_once('\'') {
        if digits.chars().skip(1).any(|c| matches!(c, 'x' | 'z' | '?')) {
            return Err(ExprError::Unsupported {
                pos,
                construct: format!("x/z literal {text}"),
            });
        }
        if digits.starts_with('s') || digits.starts_with('o') {
            return Err(ExprError::Unsupported {
                pos,
                construct: format!("literal {text}"),
            });
        }
    }
    parse_raw_literal(text).map_err(|e| ExprError::Syntax {
        pos,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_matches_verilog() {
        let e = parse_expr("a | b & c == 1").unwrap();
        assert_eq!(e.to_string(), "a | (b & (c == 1))");
        let e = parse_expr("x && y || !z").unwrap();
        assert_eq!(e.to_string(), "(x && y) || !z");
    }

    #[test]
    fn header_examples_print_stably() {
        for src in ["A & ~B", "C <= 10", "(A & B) | C", "~(A ^ B)"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(e.to_string(), src);
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
        // Redundant parentheses vanish.
        assert_eq!(
            parse_expr("((A) & (~B))").unwrap(),
            parse_expr("A & ~B").unwrap()
        );
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let err = parse_expr("a + 1").unwrap_err();
        assert!(
            matches!(err, ExprError::Unsupported { ref construct, .. } if construct == "operator +")
        );
        assert!(matches!(
            parse_expr("{a, b}").unwrap_err(),
            ExprError::Unsupported { .. }
        ));
        assert!(matches!(
            parse_expr("a[1]").unwrap_err(),
            ExprError::Unsupported { .. }
        ));
        assert!(matches!(
            parse_expr("4'bxx01").unwrap_err(),
            ExprError::Unsupported { .. }
        ));
    }

    #[test]
    fn ternary_and_identifiers() {
        let e = parse_expr("sel ? a : b").unwrap();
        assert!(e.contains_ternary());
        assert_eq!(
            e.identifiers().into_iter().collect::<Vec<_>>(),
            vec!["a", "b", "sel"]
        );
        assert!(parse_expr("a b").is_err());
    }
}
