//! Recursive-descent parser for the textual H-expression grammar.
//!
//! ```text
//! expr      := op_head '[' operand ',' operand ']' | primitive
//! op_head   := NAME ws*            (NAME in JOIN, UNION, AND, COMP_=, COMP_<, COMP_>, SUB, ADD)
//! operand   := ws* expr ws*
//! primitive := (escaped | [^\[\],])+     escaped := '\' any
//! ```
//!
//! At the top level a primitive may contain bare commas, since there is no
//! operand list to split. Inside an operand list the first unescaped comma
//! at the current depth separates the operands.

use std::fmt;

use super::ast::{HExpr, OpKind, Primitive};

/// Nesting beyond this is rejected before the recursion gets deep enough
/// to threaten the stack. Validation applies its own (much lower) limit.
pub const MAX_NESTING: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnbalancedBrackets,
    UnknownOperation(String),
    MissingOperand,
    ExtraOperand,
    EmptyOperand,
    UnescapedBracket,
    TrailingInput,
    NestingTooDeep,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::EmptyInput => f.write_str("empty expression"),
            ParseErrorKind::UnbalancedBrackets => f.write_str("unbalanced brackets"),
            ParseErrorKind::UnknownOperation(name) => write!(f, "unknown operation {name:?}"),
            ParseErrorKind::MissingOperand => f.write_str("operation needs two operands, found one"),
            ParseErrorKind::ExtraOperand => f.write_str("operation takes exactly two operands"),
            ParseErrorKind::EmptyOperand => f.write_str("empty operand"),
            ParseErrorKind::UnescapedBracket => f.write_str("unescaped '[' inside a question"),
            ParseErrorKind::TrailingInput => f.write_str("unexpected text after expression"),
            ParseErrorKind::NestingTooDeep => write!(f, "nesting deeper than {MAX_NESTING}"),
        }
    }
}

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

impl ParseError {
    fn new(kind: ParseErrorKind, position: usize) -> Self {
        ParseError { kind, position }
    }

    /// Stable snake_case code for reports.
    pub fn code(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::EmptyInput => "empty_input",
            ParseErrorKind::UnbalancedBrackets => "unbalanced_brackets",
            ParseErrorKind::UnknownOperation(_) => "unknown_operation",
            ParseErrorKind::MissingOperand => "missing_operand",
            ParseErrorKind::ExtraOperand => "extra_operand",
            ParseErrorKind::EmptyOperand => "empty_operand",
            ParseErrorKind::UnescapedBracket => "unescaped_bracket",
            ParseErrorKind::TrailingInput => "trailing_input",
            ParseErrorKind::NestingTooDeep => "nesting_too_deep",
        }
    }
}

pub fn parse_hexpression(text: &str) -> Result<HExpr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::new(ParseErrorKind::EmptyInput, 0));
    }
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    let expr = match p.op_head()? {
        Some(kind) => p.operation(kind, 1)?,
        None => p.top_level_primitive()?,
    };
    p.skip_ws();
    match p.peek() {
        None => Ok(expr),
        Some(']') => Err(ParseError::new(ParseErrorKind::UnbalancedBrackets, p.pos)),
        Some(_) => Err(ParseError::new(ParseErrorKind::TrailingInput, p.pos)),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    /// Recognizes `NAME ws* '['` at the cursor and consumes it. Leaves the
    /// cursor untouched when the text is not an operation head.
    fn op_head(&mut self) -> Result<Option<OpKind>, ParseError> {
        let start = self.pos;
        if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            return Ok(None);
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        let mut name = self.src[start..self.pos].to_string();
        let lower = name.to_ascii_lowercase();
        if lower == "comp" || lower == "comp_" {
            // `COMP_<`, and the spaced `COMP <` seen in typeset output.
            let save = self.pos;
            self.skip_ws();
            match self.peek() {
                Some(sym @ ('=' | '<' | '>')) => {
                    self.bump();
                    name = format!("comp_{sym}");
                }
                _ => self.pos = save,
            }
        }
        self.skip_ws();
        if self.peek() != Some('[') {
            self.pos = start;
            return Ok(None);
        }
        self.bump();
        match OpKind::from_name(&name) {
            Some(kind) => Ok(Some(kind)),
            None => Err(ParseError::new(ParseErrorKind::UnknownOperation(name), start)),
        }
    }

    /// Parses the operand list after `OP[`.
    fn operation(&mut self, kind: OpKind, depth: usize) -> Result<HExpr, ParseError> {
        if depth > MAX_NESTING {
            return Err(ParseError::new(ParseErrorKind::NestingTooDeep, self.pos));
        }
        let left = self.operand(depth)?;
        self.skip_ws();
        match self.peek() {
            Some(',') => {
                self.bump();
            }
            Some(']') => return Err(ParseError::new(ParseErrorKind::MissingOperand, self.pos)),
            _ => return Err(ParseError::new(ParseErrorKind::UnbalancedBrackets, self.pos)),
        }
        let right = self.operand(depth)?;
        self.skip_ws();
        match self.peek() {
            Some(']') => {
                self.bump();
            }
            Some(',') => return Err(ParseError::new(ParseErrorKind::ExtraOperand, self.pos)),
            _ => return Err(ParseError::new(ParseErrorKind::UnbalancedBrackets, self.pos)),
        }
        Ok(HExpr::op(kind, left, right))
    }

    fn operand(&mut self, depth: usize) -> Result<HExpr, ParseError> {
        self.skip_ws();
        if let Some(kind) = self.op_head()? {
            return self.operation(kind, depth + 1);
        }
        let start = self.pos;
        loop {
            match self.peek() {
                None => return Err(ParseError::new(ParseErrorKind::UnbalancedBrackets, self.pos)),
                Some(',') | Some(']') => break,
                Some('[') => return Err(ParseError::new(ParseErrorKind::UnescapedBracket, self.pos)),
                Some('\\') => {
                    self.bump();
                    self.bump();
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        let raw = self.src[start..self.pos].trim();
        if raw.is_empty() {
            return Err(ParseError::new(ParseErrorKind::EmptyOperand, start));
        }
        Ok(HExpr::Primitive(Primitive::new(unescape(raw))))
    }

    fn top_level_primitive(&mut self) -> Result<HExpr, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            match c {
                '[' => return Err(ParseError::new(ParseErrorKind::UnescapedBracket, self.pos)),
                ']' => return Err(ParseError::new(ParseErrorKind::UnbalancedBrackets, self.pos)),
                '\\' => {
                    self.bump();
                    self.bump();
                }
                _ => {
                    self.bump();
                }
            }
        }
        let raw = self.src[start..].trim();
        Ok(HExpr::Primitive(Primitive::new(unescape(raw))))
    }
}

fn unescape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some(e @ (',' | '[' | ']' | '\\')) => out.push(e),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

/// Escapes the characters that are structural inside an operand list.
pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if matches!(c, ',' | '[' | ']' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}
