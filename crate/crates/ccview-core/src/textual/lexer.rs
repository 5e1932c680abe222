//! Tokenizer for the textual syntax.

use super::{ParseDiagnostic, Severity, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum TokKind {
    Ident,
    Star,
    LBrace,
    RBrace,
    Semi,
    Dot,
    Arrow,
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub kind: TokKind,
    pub text: String,
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub(super) fn span(&self, file: &str) -> SourceSpan {
        SourceSpan {
            file: file.to_string(),
            line: self.line,
            column: self.column,
            length: self.text.chars().count() as u32,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits the source into tokens. Unexpected characters become error
/// diagnostics and are skipped, so the token stream is always usable.
pub(super) fn lex(src: &str, file: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < chars.len() {
        let c = chars[i];
        let (tok_line, tok_col) = (line, col);
        let advance = |i: &mut usize, line: &mut u32, col: &mut u32| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_continue(chars[i]) {
                advance(&mut i, &mut line, &mut col);
            }
            toks.push(Token {
                kind: TokKind::Ident,
                text: chars[start..i].iter().collect(),
                line: tok_line,
                column: tok_col,
            });
            continue;
        }
        let single = |kind: TokKind| Token {
            kind,
            text: c.to_string(),
            line: tok_line,
            column: tok_col,
        };
        match c {
            '*' => toks.push(single(TokKind::Star)),
            '{' => toks.push(single(TokKind::LBrace)),
            '}' => toks.push(single(TokKind::RBrace)),
            ';' => toks.push(single(TokKind::Semi)),
            '.' => toks.push(single(TokKind::Dot)),
            '-' if chars.get(i + 1) == Some(&'>') => {
                advance(&mut i, &mut line, &mut col);
                toks.push(Token {
                    kind: TokKind::Arrow,
                    text: "->".to_string(),
                    line: tok_line,
                    column: tok_col,
                });
            }
            _ => diags.push(ParseDiagnostic {
                severity: Severity::Error,
                message: format!("unexpected character `{c}`"),
                span: Some(SourceSpan {
                    file: file.to_string(),
                    line: tok_line,
                    column: tok_col,
                    length: 1,
                }),
            }),
        }
        advance(&mut i, &mut line, &mut col);
    }
    (toks, diags)
}
