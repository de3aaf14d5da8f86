//! The `.tcc` specification language.
//!
//! A document is a list of brace-delimited blocks:
//!
//! ```text
//! set T { t1 t2 }
//! rel f : T*C -> B { (t1,c1)->b1 }
//! preorder ord on B { b2>=b1 }
//! tcc N { targets T contexts C behaviors B eval f order ord ambient relations }
//! simulator s in N { programs P compiler { p->t1 } context passthrough }
//! ```
//!
//! Parsing yields a [`Document`]; [`build`] resolves it into a [`Model`] of
//! validated objects, and [`to_text`] prints the canonical form.

pub mod ast;
mod build;
mod export;
mod lexer;
mod parser;
mod print;

use std::fmt;

use serde::Serialize;

pub use ast::{Block, Document, ElemRef, Pair, RelDecl, RelSource, SetDecl, Spanned};
pub use build::{build, CheckEntry, Model, ProcEntry, SimEntry, Table, TccEntry};
pub use export::Exporter;
pub use lexer::{lex, Token, TokenKind};
pub use parser::parse;
pub use print::{quote, to_text};

/// Line and column, both starting at 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Stable diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Code {
    #[serde(rename = "E-LEX")]
    Lex,
    #[serde(rename = "E-SYNTAX")]
    Syntax,
    #[serde(rename = "E-REF")]
    Ref,
    #[serde(rename = "E-DUP")]
    Dup,
    #[serde(rename = "E-TYPE")]
    Type,
    #[serde(rename = "E-ELEM")]
    Elem,
    #[serde(rename = "E-VALID")]
    Valid,
    #[serde(rename = "E-BUDGET")]
    Budget,
}

impl Code {
    pub const ALL: [Code; 8] = [
        Code::Lex,
        Code::Syntax,
        Code::Ref,
        Code::Dup,
        Code::Type,
        Code::Elem,
        Code::Valid,
        Code::Budget,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::Lex => "E-LEX",
            Code::Syntax => "E-SYNTAX",
            Code::Ref => "E-REF",
            Code::Dup => "E-DUP",
            Code::Type => "E-TYPE",
            Code::Elem => "E-ELEM",
            Code::Valid => "E-VALID",
            Code::Budget => "E-BUDGET",
        }
    }

    pub fn parse(s: &str) -> Option<Code> {
        Code::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.span, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// Parses and builds in one step.
pub fn load(
    text: &str,
    meter: &mut crate::budget::Meter,
) -> Result<(Document, Model), Vec<Diagnostic>> {
    let doc = parse(text)?;
    let model = build(&doc, meter)?;
    Ok((doc, model))
}
