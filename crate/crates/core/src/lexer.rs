// SPDX-License-Identifier: Apache-2.0

//! Tokenizer for the supported HDL subset and for expression headers.

use std::fmt;

use thiserror::Error;

/// 1-based source coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    /// Numeric literal exactly as written, e.g. `8'hFF` or `12`.
    Number(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) | TokenKind::Number(s) => f.write_str(s),
            TokenKind::Sym(s) => f.write_str(s),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

// Longest first so that maximal munch works with a linear scan.
const SYMBOLS: &[&str] = &[
    "<<<", ">>>", "===", "!==", "&&", "||", "==", "!=", "<=", ">=", "<<", ">>", "~&", "~|", "~^",
    "^~", "**", "+:", "-:", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "#", "@", "*", "?",
    "=", "<", ">", "!", "~", "&", "|", "^", "+", "-", "/", "%",
];

/// Verilog keywords; identifiers may not use these.
pub const KEYWORDS: &[&str] = &[
    "always",
    "always_comb",
    "always_ff",
    "always_latch",
    "and",
    "assign",
    "begin",
    "case",
    "casex",
    "casez",
    "default",
    "else",
    "end",
    "endcase",
    "endfunction",
    "endgenerate",
    "endmodule",
    "endtask",
    "for",
    "forever",
    "function",
    "generate",
    "genvar",
    "if",
    "initial",
    "inout",
    "input",
    "integer",
    "localparam",
    "logic",
    "module",
    "negedge",
    "nor",
    "not",
    "or",
    "output",
    "parameter",
    "posedge",
    "reg",
    "repeat",
    "signed",
    "task",
    "while",
    "wire",
    "xor",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    at: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            at: 0,
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.at + off).copied()
    }

    fn bump(&mut self) {
        if let Some(b) = self.peek(0) {
            self.at += 1;
            if b == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn err(&self, pos: Pos, message: impl Into<String>) -> LexError {
        LexError {
            pos,
            message: message.into(),
        }
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia()?;
            let pos = self.pos();
            let Some(b) = self.peek(0) else {
                out.push(Token {
                    kind: TokenKind::Eof,
                    pos,
                });
                return Ok(out);
            };
            let kind = if b.is_ascii_alphabetic() || b == b'_' || b == b'$' {
                let start = self.at;
                self.bump();
                while matches!(self.peek(0), Some(c) if c.is_ascii_alphanumeric() || c == b'_' || c == b'$')
                {
                    self.bump();
                }
                TokenKind::Ident(self.src[start..self.at].to_string())
            } else if b.is_ascii_digit() || (b == b'\'' && self.is_based_tick(1)) {
                self.number()
            } else if b == b'`' {
                self.directive(pos)?;
                continue;
            } else if b == b'"' {
                return Err(self.err(pos, "string literals are not supported"));
            } else {
                let rest = &self.src[self.at..];
                let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                    return Err(self.err(pos, format!("unexpected character `{}`", b as char)));
                };
                for _ in 0..sym.len() {
                    self.bump();
                }
                TokenKind::Sym(sym)
            };
            out.push(Token { kind, pos });
        }
    }

    fn is_based_tick(&self, off: usize) -> bool {
        matches!(
            self.peek(off),
            Some(b'b' | b'B' | b'd' | b'D' | b'h' | b'H' | b'o' | b'O' | b's' | b'S')
        )
    }

    fn number(&mut self) -> TokenKind {
        let start = self.at;
        while matches!(self.peek(0), Some(c) if c.is_ascii_digit() || c == b'_') {
            self.bump();
        }
        if self.peek(0) == Some(b'\'') && self.is_based_tick(1) {
            self.bump();
            self.bump();
            while matches!(self.peek(0), Some(c) if c.is_ascii_alphanumeric() || c == b'_' || c == b'?')
            {
                self.bump();
            }
        }
        TokenKind::Number(self.src[start..self.at].to_string())
    }

    fn directive(&mut self, pos: Pos) -> Result<(), LexError> {
        let rest = &self.src[self.at + 1..];
        let name: String = rest
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        match name.as_str() {
            "timescale" | "default_nettype" | "resetall" | "celldefine" | "endcelldefine" => {
                while !matches!(self.peek(0), None | Some(b'\n')) {
                    self.bump();
                }
                Ok(())
            }
            other => Err(self.err(pos, format!("unsupported compiler directive `{other}"))),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(c), _) if c.is_ascii_whitespace() => self.bump(),
                (Some(b'/'), Some(b'/')) => {
                    while !matches!(self.peek(0), None | Some(b'\n')) {
                        self.bump();
                    }
                }
                (Some(b'/'), Some(b'*')) => {
                    let pos = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(0), self.peek(1)) {
                            (None, _) => return Err(self.err(pos, "unterminated block comment")),
                            (Some(b'*'), Some(b'/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            _ => self.bump(),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }
}
