// SPDX-License-Identifier: Apache-2.0

//! Unsigned fixed-width bit vectors and HDL-style literal parsing.
//!
//! Literals take the form `<width>'<base><digits>` with base `b`, `d` or
//! `h` (either case), or a bare decimal that inherits a width from context.
//! `3'd5`, `3'b101` and `3'h5` all denote the same [`BitVector`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Widest vector the toolkit handles.
pub const MAX_WIDTH: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("malformed literal `{0}`")]
    Malformed(String),
    #[error("literal `{text}` does not fit in {width} bits")]
    Overflow { text: String, width: u32 },
    #[error("bare decimal `{0}` needs a width from context")]
    MissingWidth(String),
    #[error("width {0} is outside 1..={MAX_WIDTH}")]
    BadWidth(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVector {
    width: u32,
    value: u64,
}

impl BitVector {
    pub fn new(width: u32, value: u64) -> Result<Self, LiteralError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(LiteralError::BadWidth(width));
        }
        if value > mask(width) {
            return Err(LiteralError::Overflow {
                text: value.to_string(),
                width,
            });
        }
        Ok(Self { width, value })
    }

    /// Builds a vector keeping only the low `width` bits of `value`.
    pub fn truncating(width: u32, value: u64) -> Self {
        let width = width.clamp(1, MAX_WIDTH);
        Self {
            width,
            value: value & mask(width),
        }
    }

    pub fn zero(width: u32) -> Self {
        Self::truncating(width, 0)
    }

    pub fn bit(set: bool) -> Self {
        Self {
            width: 1,
            value: set as u64,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_true(&self) -> bool {
        self.value != 0
    }

    /// Zero-extends or truncates to `width`.
    pub fn resize(&self, width: u32) -> Self {
        Self::truncating(width, self.value)
    }

    /// Sized binary form, e.g. `3'b101`.
    pub fn to_binary_literal(&self) -> String {
        format!(
            "{}'b{:0w$b}",
            self.width,
            self.value,
            w = self.width as usize
        )
    }
}

/// Canonical textual form: sized decimal, `3'd5`.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}'d{}", self.width, self.value)
    }
}

/// All-ones mask for `width` bits.
pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Number of distinct values of a `width`-bit signal, saturating at `u64::MAX`.
pub fn domain_size(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        1u64 << width
    }
}

/// A literal as written: the width is absent for bare decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RawLiteral {
    pub width: Option<u32>,
    pub value: u64,
}

/// Parses `<width>'<base><digits>`, `'<base><digits>` or a bare decimal.
pub fn parse_raw_literal(text: &str) -> Result<RawLiteral, LiteralError> {
    let malformed = || LiteralError::Malformed(text.to_string());
    let text_trim = text.trim();
    let Some((size, rest)) = text_trim.split_once('\'') else {
        let value = parse_digits(text_trim, 10).ok_or_else(malformed)?;
        return Ok(RawLiteral { width: None, value });
    };
    let width = if size.is_empty() {
        None
    } else {
        let w: u32 = size.trim().parse().map_err(|_| malformed())?;
        if w == 0 || w > MAX_WIDTH {
            return Err(LiteralError::BadWidth(w));
        }
        Some(w)
    };
    let mut chars = rest.chars();
    let radix = match chars.next() {
        Some('b' | 'B') => 2,
        Some('d' | 'D') => 10,
        Some('h' | 'H') => 16,
        _ => return Err(malformed()),
    };
    let value = parse_digits(chars.as_str().trim(), radix).ok_or_else(malformed)?;
    if let Some(w) = width {
        if value > mask(w) {
            return Err(LiteralError::Overflow {
                text: text_trim.to_string(),
                width: w,
            });
        }
    }
    Ok(RawLiteral { width, value })
}

fn parse_digits(digits: &str, radix: u32) -> Option<u64> {
    let cleaned: String = digits.chars().filter(|c| *c != '_').collect();
    if cleaned.is_empty() || digits.starts_with('_') {
        return None;
    }
    if !cleaned.chars().all(|c| c.is_digit(radix)) {
        return None;
    }
    u64::from_str_radix(&cleaned, radix).ok()
}

/// Parses a literal into a [`BitVector`]; bare decimals take `default_width`.
pub fn parse_literal(text: &str, default_width: Option<u32>) -> Result<BitVector, LiteralError> {
    let raw = parse_raw_literal(text)?;
    let width = match raw.width.or(default_width) {
        Some(w) => w,
        None => return Err(LiteralError::MissingWidth(text.trim().to_string())),
    };
    if width == 0 || width > MAX_WIDTH {
        return Err(LiteralError::BadWidth(width));
    }
    if raw.value > mask(width) {
        return Err(LiteralError::Overflow {
            text: text.trim().to_string(),
            width,
        });
    }
    Ok(BitVector {
        width,
        value: raw.value,
    })
}

/// True when `text` looks like a literal (starts with a digit or a tick).
pub fn looks_like_literal(text: &str) -> bool {
    matches!(text.trim().chars().next(), Some(c) if c.is_ascii_digit() || c == '\'')
}
