//! Textual syntax for models, views, and witnesses.
//!
//! Documents are plain text. A model document declares one component tree
//! with typed directed ports and connectors; a view document declares a
//! component forest where port names and types may be `*` (unknown) and
//! connector endpoints may omit the port. `//` starts a line comment.
//!
//! ```text
//! model M {
//!   component Top {
//!     component A { port out T x; }
//!     component B { port in T y; }
//!     connect A.x -> B.y;
//!   }
//! }
//! ```
//!
//! Parsing recovers from syntax errors at declaration boundaries and
//! reports every diagnostic with a source position. Printing is canonical:
//! ports, then subcomponents, then connectors, two-space indent, connectors
//! grouped under the component whose body declares them (the parent of the
//! endpoints). Parsing a printed document reproduces the original value.

mod json;
mod lexer;
mod parser;
mod printer;

pub use json::export_json;
pub use parser::{parse_model, parse_model_named, parse_view, parse_view_named};
pub use printer::{print_model, print_view, print_witness};

use crate::model::ElementRef;
use std::collections::HashMap;
use std::fmt;

/// A position in a source document, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match &self.span {
            Some(span) => write!(f, "{span}: {sev}: {}", self.message),
            None => write!(f, "{sev}: {}", self.message),
        }
    }
}

/// Source positions of parsed elements, for diagnostics and tooling.
pub type SpanTable = HashMap<ElementRef, SourceSpan>;

/// A successfully parsed document plus where its elements came from.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: T,
    pub spans: SpanTable,
}
