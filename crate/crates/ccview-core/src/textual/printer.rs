//! Canonical text for models, views, and witnesses.
//!
//! Output order is fixed: within a component, ports come first, then
//! subcomponents, then the connectors declared in that component's body.
//! A connector belongs to the body of the parent of its endpoints (for a
//! parent-child connector, the parent endpoint's component). Views print
//! their abstract connectors at the top level, after all components.
//! Printing then parsing yields a structurally equal document.

use indexmap::IndexMap;
use std::fmt::Write;

use crate::model::{CncModel, CncView, Connector, ViewPort};
use crate::witness::{witness_as_view, Witness};

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// The component whose body should declare this connector.
fn connector_scope<'a>(m: &'a CncModel, con: &'a Connector) -> Option<&'a str> {
    let src = m.component(&con.src.component)?;
    let tgt = m.component(&con.tgt.component)?;
    if src.name() == tgt.parent().unwrap_or_default() {
        Some(src.name())
    } else if tgt.name() == src.parent().unwrap_or_default() {
        Some(tgt.name())
    } else if src.parent() == tgt.parent() {
        src.parent()
    } else {
        None
    }
}

fn write_model_component(
    m: &CncModel,
    name: &str,
    depth: usize,
    scoped: &IndexMap<&str, Vec<&Connector>>,
    out: &mut String,
) {
    let Some(c) = m.component(name) else {
        return;
    };
    let body_cons = scoped.get(name).map(Vec::as_slice).unwrap_or_default();
    indent(out, depth);
    if c.ports().is_empty() && c.children().is_empty() && body_cons.is_empty() {
        let _ = writeln!(out, "component {name};");
        return;
    }
    let _ = writeln!(out, "component {name} {{");
    for p in c.ports() {
        indent(out, depth + 1);
        let _ = writeln!(out, "port {} {} {};", p.direction, p.ty, p.name);
    }
    for child in c.children() {
        write_model_component(m, child, depth + 1, scoped, out);
    }
    for con in body_cons {
        indent(out, depth + 1);
        let _ = writeln!(out, "connect {} -> {};", con.src, con.tgt);
    }
    indent(out, depth);
    out.push_str("}\n");
}

/// Canonical text of a model.
pub fn print_model(m: &CncModel) -> String {
    let mut scoped: IndexMap<&str, Vec<&Connector>> = IndexMap::new();
    let mut unscoped: Vec<&Connector> = Vec::new();
    for con in m.connectors() {
        match connector_scope(m, con) {
            Some(scope) => scoped.entry(scope).or_default().push(con),
            None => unscoped.push(con),
        }
    }
    let mut out = format!("model {} {{\n", m.name());
    for top in m.tops() {
        write_model_component(m, top, 1, &scoped, &mut out);
    }
    // Only invalid documents have connectors without a home component;
    // keep them visible rather than dropping them.
    for con in unscoped {
        indent(&mut out, 1);
        let _ = writeln!(&mut out, "connect {} -> {};", con.src, con.tgt);
    }
    out.push_str("}\n");
    out
}

fn view_port_text(p: &ViewPort) -> String {
    format!(
        "port {} {} {};",
        p.direction,
        p.ty.as_ref().map_or("*".to_string(), |t| t.to_string()),
        p.name.as_deref().unwrap_or("*"),
    )
}

fn write_view_component(v: &CncView, name: &str, depth: usize, out: &mut String) {
    let Some(c) = v.component(name) else {
        return;
    };
    indent(out, depth);
    if c.ports().is_empty() && c.children().is_empty() {
        let _ = writeln!(out, "component {name};");
        return;
    }
    let _ = writeln!(out, "component {name} {{");
    for p in c.ports() {
        indent(out, depth + 1);
        out.push_str(&view_port_text(p));
        out.push('\n');
    }
    for child in c.children() {
        write_view_component(v, child, depth + 1, out);
    }
    indent(out, depth);
    out.push_str("}\n");
}

/// Canonical text of a view.
pub fn print_view(v: &CncView) -> String {
    let mut out = format!("view {} {{\n", v.name());
    for top in v.tops() {
        write_view_component(v, top, 1, &mut out);
    }
    for con in v.abs_connectors() {
        indent(&mut out, 1);
        let _ = writeln!(&mut out, "connect {con};");
    }
    out.push_str("}\n");
    out
}

/// A witness as text: the kind and its explanations as leading comments,
/// then the fragment as a view document. The result parses as a view.
pub fn print_witness(w: &Witness) -> String {
    let mut out = format!("// witness kind: {}\n", w.kind.kind_str());
    for a in &w.annotations {
        let _ = writeln!(&mut out, "// {}", a.text);
    }
    out.push_str(&print_view(&witness_as_view(w)));
    out
}
