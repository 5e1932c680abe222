//! Recursive-descent parser with error recovery.
//!
//! The parser never aborts on the first problem: it records a diagnostic,
//! skips to the next declaration boundary, and keeps going, so one run
//! reports every syntax error in the document. After a clean parse the
//! document is validated (single top component, legal connectors, unique
//! port names, ...) and violations are reported at the position of the
//! offending element.

use super::lexer::{lex, TokKind, Token};
use super::{ParseDiagnostic, Parsed, Severity, SourceSpan, SpanTable};
use crate::model::{
    validate_model, validate_view, AbstractConnector, CncModel, CncView, Direction, ElementRef,
    ViewPort,
};

/// Parses a complete model document.
pub fn parse_model(src: &str) -> Result<CncModel, Vec<ParseDiagnostic>> {
    parse_model_named(src, "<input>").map(|p| p.value)
}

/// Parses a model document, attributing positions to `file`.
pub fn parse_model_named(src: &str, file: &str) -> Result<Parsed<CncModel>, Vec<ParseDiagnostic>> {
    let (toks, lex_diags) = lex(src, file);
    let mut p = Parser::new(&toks, file, lex_diags);
    let model = p.document_model();
    p.finish(model, validate_model)
}

/// Parses a complete view document.
pub fn parse_view(src: &str) -> Result<CncView, Vec<ParseDiagnostic>> {
    parse_view_named(src, "<input>").map(|p| p.value)
}

/// Parses a view document, attributing positions to `file`.
pub fn parse_view_named(src: &str, file: &str) -> Result<Parsed<CncView>, Vec<ParseDiagnostic>> {
    let (toks, lex_diags) = lex(src, file);
    let mut p = Parser::new(&toks, file, lex_diags);
    let view = p.document_view();
    p.finish(view, validate_view)
}

const MAX_DIAGNOSTICS: usize = 100;

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    file: &'a str,
    diags: Vec<ParseDiagnostic>,
    spans: SpanTable,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], file: &'a str, lex_diags: Vec<ParseDiagnostic>) -> Self {
        Parser {
            toks,
            pos: 0,
            file,
            diags: lex_diags,
            spans: SpanTable::new(),
        }
    }

    fn cur(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn at(&self, kind: TokKind) -> bool {
        self.cur().is_some_and(|t| t.kind == kind)
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.cur()
            .is_some_and(|t| t.kind == TokKind::Ident && t.text == kw)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn span_here(&self) -> Option<SourceSpan> {
        match self.cur() {
            Some(t) => Some(t.span(self.file)),
            None => self.toks.last().map(|t| {
                let mut s = t.span(self.file);
                s.column += s.length;
                s.length = 0;
                s
            }),
        }
    }

    fn error(&mut self, message: impl Into<String>, span: Option<SourceSpan>) {
        if self.diags.len() < MAX_DIAGNOSTICS {
            self.diags.push(ParseDiagnostic {
                severity: Severity::Error,
                message: message.into(),
                span,
            });
        }
    }

    fn error_here(&mut self, message: impl Into<String>) {
        let span = self.span_here();
        self.error(message, span);
    }

    fn describe_cur(&self) -> String {
        match self.cur() {
            Some(t) => format!("`{}`", t.text),
            None => "end of input".to_string(),
        }
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Option<&'a Token> {
        if self.at(kind) {
            self.bump()
        } else {
            let found = self.describe_cur();
            self.error_here(format!("expected {what}, found {found}"));
            None
        }
    }

    fn expect_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            let found = self.describe_cur();
            self.error_here(format!("expected `{kw}`, found {found}"));
            false
        }
    }

    fn expect_ident(&mut self, what: &str) -> Option<&'a Token> {
        self.expect(TokKind::Ident, what)
    }

    /// Panic-mode recovery: skip ahead to a token that can start or end a
    /// declaration. A `;` is consumed (it ends the broken declaration),
    /// everything else is left for the caller.
    fn recover(&mut self) {
        while let Some(t) = self.cur() {
            match t.kind {
                TokKind::Semi => {
                    self.bump();
                    return;
                }
                TokKind::RBrace => return,
                TokKind::Ident if matches!(t.text.as_str(), "component" | "port" | "connect") => {
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn finish<T, F>(mut self, value: T, validate: F) -> Result<Parsed<T>, Vec<ParseDiagnostic>>
    where
        F: Fn(&T) -> Vec<crate::model::Violation>,
    {
        let had_syntax_errors = !self.diags.is_empty();
        if !had_syntax_errors {
            for v in validate(&value) {
                let span = self.spans.get(&v.element).cloned();
                self.error(v.message, span);
            }
        }
        if self.diags.is_empty() {
            Ok(Parsed {
                value,
                spans: self.spans,
            })
        } else {
            Err(self.diags)
        }
    }

    // ------------------------------------------------------------------
    // Documents
    // ------------------------------------------------------------------

    fn document_model(&mut self) -> CncModel {
        let mut model = CncModel::new("");
        if self.at_kw("view") {
            self.error_here("expected a model document, found a view (use `model`)");
            self.bump();
        } else if !self.expect_kw("model") {
            return model;
        }
        if let Some(name) = self.expect_ident("model name") {
            model.set_name(&name.text);
            self.spans
                .insert(ElementRef::Document, name.span(self.file));
        }
        if self.expect(TokKind::LBrace, "`{`").is_none() {
            return model;
        }
        loop {
            if self.at(TokKind::RBrace) {
                self.bump();
                break;
            }
            if self.at_kw("component") {
                self.component_decl(&mut Doc::Model(&mut model), None);
            } else if self.at_kw("connect") {
                self.error_here("connectors must appear inside a component");
                self.connect_decl(&mut Doc::Discard);
            } else if self.cur().is_none() {
                self.error_here("unexpected end of input, missing `}`");
                break;
            } else {
                let found = self.describe_cur();
                self.error_here(format!("expected `component` or `}}`, found {found}"));
                self.bump();
                self.recover();
            }
        }
        if let Some(t) = self.cur() {
            let span = t.span(self.file);
            self.error("unexpected content after the document", Some(span));
        }
        model
    }

    fn document_view(&mut self) -> CncView {
        let mut view = CncView::new("");
        if self.at_kw("model") {
            self.error_here("expected a view document, found a model (use `view`)");
            self.bump();
        } else if !self.expect_kw("view") {
            return view;
        }
        if let Some(name) = self.expect_ident("view name") {
            view.set_name(&name.text);
            self.spans
                .insert(ElementRef::Document, name.span(self.file));
        }
        if self.expect(TokKind::LBrace, "`{`").is_none() {
            return view;
        }
        loop {
            if self.at(TokKind::RBrace) {
                self.bump();
                break;
            }
            if self.at_kw("component") {
                self.component_decl(&mut Doc::View(&mut view), None);
            } else if self.at_kw("connect") {
                self.connect_decl(&mut Doc::View(&mut view));
            } else if self.cur().is_none() {
                self.error_here("unexpected end of input, missing `}`");
                break;
            } else {
                let found = self.describe_cur();
                self.error_here(format!(
                    "expected `component`, `connect`, or `}}`, found {found}"
                ));
                self.bump();
                self.recover();
            }
        }
        if let Some(t) = self.cur() {
            let span = t.span(self.file);
            self.error("unexpected content after the document", Some(span));
        }
        view
    }

    // ------------------------------------------------------------------
    // Declarations
    // ------------------------------------------------------------------

    fn component_decl(&mut self, doc: &mut Doc<'_>, parent: Option<&str>) {
        self.expect_kw("component");
        let Some(name_tok) = self.expect_ident("component name") else {
            self.recover();
            return;
        };
        let name = name_tok.text.clone();
        let span = name_tok.span(self.file);
        match doc.add_component(&name, parent) {
            Ok(()) => {
                self.spans.insert(ElementRef::Component(name.clone()), span);
            }
            Err(_) => {
                // Diagnose but keep parsing the body; items attach to the
                // previously declared component of the same name.
                self.error(format!("duplicate component `{name}`"), Some(span));
            }
        }
        if self.at(TokKind::Semi) {
            self.bump();
            return;
        }
        if self
            .expect(TokKind::LBrace, "`{` or `;` after the component name")
            .is_none()
        {
            self.recover();
            return;
        }
        loop {
            if self.at(TokKind::RBrace) {
                self.bump();
                return;
            }
            if self.at_kw("port") {
                self.port_decl(doc, &name);
            } else if self.at_kw("component") {
                self.component_decl(doc, Some(&name));
            } else if self.at_kw("connect") {
                self.connect_decl(doc);
            } else if self.cur().is_none() {
                self.error_here("unexpected end of input, missing `}`");
                return;
            } else {
                let found = self.describe_cur();
                self.error_here(format!(
                    "expected `port`, `component`, `connect`, or `}}`, found {found}"
                ));
                self.bump();
                self.recover();
            }
        }
    }

    /// Parses `port (in|out) Type name ;`. In views, type and name may each
    /// be `*` for "unknown".
    fn port_decl(&mut self, doc: &mut Doc<'_>, component: &str) {
        let kw = self.cur().expect("caller saw `port`").span(self.file);
        self.bump();
        let direction = match self.cur() {
            Some(t) if t.kind == TokKind::Ident && t.text == "in" => {
                self.bump();
                Direction::In
            }
            Some(t) if t.kind == TokKind::Ident && t.text == "out" => {
                self.bump();
                Direction::Out
            }
            _ => {
                let found = self.describe_cur();
                self.error_here(format!("expected `in` or `out`, found {found}"));
                self.recover();
                return;
            }
        };
        let Some(ty) = self.name_or_star("port type") else {
            self.recover();
            return;
        };
        let Some(name) = self.name_or_star("port name") else {
            self.recover();
            return;
        };
        self.expect(TokKind::Semi, "`;`");
        let name_span = name.1.clone().unwrap_or(kw);
        match doc {
            Doc::Model(m) => {
                let (Some(ty_text), Some(name_text)) = (&ty.0, &name.0) else {
                    self.error(
                        "`*` is only allowed in views; model ports need a type and a name"
                            .to_string(),
                        Some(name_span),
                    );
                    return;
                };
                if m.add_port(component, name_text.as_str(), direction, ty_text.as_str())
                    .is_ok()
                {
                    self.spans.insert(
                        ElementRef::Port {
                            component: component.to_string(),
                            port: name_text.clone(),
                        },
                        name_span,
                    );
                }
            }
            Doc::View(v) => {
                let port = ViewPort {
                    name: name.0.clone(),
                    direction,
                    ty: ty.0.map(Into::into),
                };
                if v.add_port(component, port).is_ok() {
                    let index = v
                        .component(component)
                        .map(|c| c.ports().len() - 1)
                        .unwrap_or(0);
                    self.spans.insert(
                        ElementRef::ViewPort {
                            component: component.to_string(),
                            index,
                        },
                        name_span,
                    );
                }
            }
            Doc::Discard => {}
        }
    }

    /// An identifier, or `*` standing for "unknown". Returns the text (None
    /// for `*`) and the token's span.
    fn name_or_star(&mut self, what: &str) -> Option<(Option<String>, Option<SourceSpan>)> {
        match self.cur() {
            Some(t) if t.kind == TokKind::Ident => {
                let r = (Some(t.text.clone()), Some(t.span(self.file)));
                self.bump();
                Some(r)
            }
            Some(t) if t.kind == TokKind::Star => {
                let r = (None, Some(t.span(self.file)));
                self.bump();
                Some(r)
            }
            _ => {
                let found = self.describe_cur();
                self.error_here(format!("expected {what} or `*`, found {found}"));
                None
            }
        }
    }

    /// Parses `connect A[.p] -> B[.q] ;`. Models require both ports.
    fn connect_decl(&mut self, doc: &mut Doc<'_>) {
        let kw_span = self.cur().expect("caller saw `connect`").span(self.file);
        self.bump();
        let Some(src) = self.endpoint() else {
            self.recover();
            return;
        };
        if self.expect(TokKind::Arrow, "`->`").is_none() {
            self.recover();
            return;
        }
        let Some(tgt) = self.endpoint() else {
            self.recover();
            return;
        };
        self.expect(TokKind::Semi, "`;`");
        match doc {
            Doc::Model(m) => {
                let (Some(sp), Some(tp)) = (&src.1, &tgt.1) else {
                    self.error(
                        "connector endpoints in a model must name a port (component.port)"
                            .to_string(),
                        Some(kw_span),
                    );
                    return;
                };
                m.add_connector(&src.0, sp, &tgt.0, tp);
                self.spans
                    .insert(ElementRef::Connector(m.connectors().len() - 1), kw_span);
            }
            Doc::View(v) => {
                v.add_abs_connector(AbstractConnector {
                    src_cmp: src.0,
                    src_port: src.1,
                    tgt_cmp: tgt.0,
                    tgt_port: tgt.1,
                });
                self.spans.insert(
                    ElementRef::AbsConnector(v.abs_connectors().len() - 1),
                    kw_span,
                );
            }
            Doc::Discard => {}
        }
    }

    fn endpoint(&mut self) -> Option<(String, Option<String>)> {
        let cmp = self.expect_ident("component name")?;
        let cmp = cmp.text.clone();
        if self.at(TokKind::Dot) {
            self.bump();
            let port = self.expect_ident("port name")?;
            Some((cmp, Some(port.text.clone())))
        } else {
            Some((cmp, None))
        }
    }
}

/// The document being built. `Discard` parses for syntax only, e.g. a
/// connector at an illegal position.
enum Doc<'m> {
    Model(&'m mut CncModel),
    View(&'m mut CncView),
    Discard,
}

impl Doc<'_> {
    fn add_component(&mut self, name: &str, parent: Option<&str>) -> crate::Result<()> {
        match self {
            Doc::Model(m) => m.add_component(name, parent),
            Doc::View(v) => v.add_component(name, parent),
            Doc::Discard => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_MODEL: &str = "\
// a tiny system
model M {
  component Top {
    component A { port out T x; }
    component B {
      port in T y;
      component B1 { port in T y1; }
      connect B.y -> B1.y1;
    }
    connect A.x -> B.y;
  }
}
";

    #[test]
    fn parses_model_with_nesting_and_comments() {
        let m = parse_model(SMALL_MODEL).unwrap();
        assert_eq!(m.name(), "M");
        assert_eq!(m.len(), 4);
        assert_eq!(m.root(), Some("Top"));
        assert_eq!(m.connectors().len(), 2);
        assert_eq!(m.component("B").unwrap().children(), &["B1".to_string()]);
        assert_eq!(m.port("A", "x").unwrap().ty.as_str(), "T");
    }

    #[test]
    fn parses_view_with_stars_and_optional_ports() {
        let src = "\
view V {
  component A { port out * x; port in T *; }
  component B;
  connect A.x -> B;
  connect B -> A;
}
";
        let v = parse_view(src).unwrap();
        assert_eq!(v.name(), "V");
        assert_eq!(v.len(), 2);
        let a = v.component("A").unwrap();
        assert_eq!(a.ports().len(), 2);
        assert_eq!(a.ports()[0].name.as_deref(), Some("x"));
        assert!(a.ports()[0].ty.is_none());
        assert!(a.ports()[1].name.is_none());
        assert_eq!(v.abs_connectors().len(), 2);
        assert_eq!(v.abs_connectors()[0].src_port.as_deref(), Some("x"));
        assert!(v.abs_connectors()[0].tgt_port.is_none());
    }

    #[test]
    fn span_table_points_at_names() {
        let parsed = parse_model_named(SMALL_MODEL, "m.ccm").unwrap();
        let span = &parsed.spans[&ElementRef::Component("B1".to_string())];
        assert_eq!(span.file, "m.ccm");
        assert_eq!((span.line, span.column, span.length), (7, 17, 2));
    }

    #[test]
    fn star_is_rejected_in_models() {
        let src = "model M { component A { port in * x; } }";
        let errs = parse_model(src).unwrap_err();
        assert!(errs
            .iter()
            .any(|d| d.message.contains("only allowed in views")));
    }

    #[test]
    fn model_connector_needs_ports() {
        let src = "\
model M {
  component Top {
    component A { port out T x; }
    component B { port in T y; }
    connect A -> B.y;
  }
}
";
        let errs = parse_model(src).unwrap_err();
        assert!(errs.iter().any(|d| d.message.contains("must name a port")));
    }

    #[test]
    fn top_level_connect_is_rejected_in_models() {
        let src = "model M { connect A.x -> B.y; component Top; }";
        let errs = parse_model(src).unwrap_err();
        assert!(errs
            .iter()
            .any(|d| d.message.contains("inside a component")));
    }

    #[test]
    fn recovery_reports_every_error() {
        let src = "\
model M {
  component Top {
    port in T;
    component A { port out T x }
    connect -> B.y;
  }
}
";
        let errs = parse_model(src).unwrap_err();
        // One per broken declaration, not a cascade per token.
        assert_eq!(errs.len(), 3, "{errs:?}");
        assert!(errs[0].message.contains("expected port name"));
        assert!(errs[1].message.contains("expected `;`"));
        assert!(errs[2].message.contains("expected component name"));
        let lines: Vec<u32> = errs.iter().map(|d| d.span.as_ref().unwrap().line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
    }

    #[test]
    fn duplicate_component_reopens_existing_one() {
        let src = "\
model M {
  component Top {
    component A { port in T x; }
    component A { port in T y; }
  }
}
";
        let errs = parse_model(src).unwrap_err();
        assert!(errs
            .iter()
            .any(|d| d.message.contains("duplicate component `A`")));
    }

    #[test]
    fn validation_runs_with_spans() {
        let src = "\
model M {
  component Top1;
  component Top2;
}
";
        let errs = parse_model(src).unwrap_err();
        assert!(errs
            .iter()
            .any(|d| d.message.contains("exactly one top component")));

        let src2 = "\
model M {
  component Top {
    component A { port out T x; }
    component B { port in U y; }
    connect A.x -> B.y;
  }
}
";
        let errs2 = parse_model(src2).unwrap_err();
        let type_err = errs2
            .iter()
            .find(|d| d.message.contains("types differ"))
            .expect("type violation reported");
        assert_eq!(type_err.span.as_ref().unwrap().line, 5);
    }

    #[test]
    fn view_document_keyword_mixup_is_explained() {
        let errs = parse_view("model M { component A; }").unwrap_err();
        assert!(errs[0].message.contains("expected a view document"));
        let errs2 = parse_model("view V { component A; }").unwrap_err();
        assert!(errs2[0].message.contains("expected a model document"));
    }

    #[test]
    fn empty_view_parses() {
        let v = parse_view("view V {\n}\n").unwrap();
        assert_eq!(v.name(), "V");
        assert!(v.is_empty());
    }
}
