//! Property language: AST, lexer, parser and pretty-printer.

pub mod ast;
pub mod lexer;
pub mod parser;
mod pretty;

use std::fmt;

pub use ast::*;
pub use parser::{parse_pattern, parse_property, parse_property_spanned, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    NotOnNonScope,
    UnknownKeyword,
    MalformedNumber,
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DslError {
    pub kind: ErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl DslError {
    pub fn new(kind: ErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        DslError { kind, line, column, message: message.into() }
    }

    pub fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        DslError::new(ErrorKind::Syntax, line, column, message)
    }

    pub fn malformed_number(line: usize, column: usize, text: &str) -> Self {
        DslError::new(ErrorKind::MalformedNumber, line, column, format!("malformed number `{text}`"))
    }
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for DslError {}
