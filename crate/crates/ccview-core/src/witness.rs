//! Builds witnesses: minimal model fragments that demonstrate a verdict.
//!
//! A witness pairs a fragment of the model with natural-language
//! annotations. For a satisfied view the fragment shows how the model
//! realizes every element of the view; for each non-satisfaction reason the
//! fragment shows exactly the part of the model that clashes with the view.
//! Fragments are valid standalone models except that connector chains stay
//! partial: a fragment keeps only the chain links that carry the argument.
//!
//! Every builder is deterministic, and every fragment can be re-read as a
//! view (`witness_as_view`), which the same model then satisfies.

use indexmap::IndexSet;
use std::collections::{HashSet, VecDeque};

use crate::model::{AbstractConnector, CncModel, CncView, ElementRef, ViewPort};
use crate::verify::{
    self, view_port_matches, HierarchyMismatchKind, InterfaceFailure, NonSatReason,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    Satisfaction,
    MissingComponent,
    HierarchyMismatch,
    InterfaceMismatch,
    MissingConnection,
}

impl WitnessKind {
    pub fn kind_str(&self) -> &'static str {
        match self {
            WitnessKind::Satisfaction => "satisfaction",
            WitnessKind::MissingComponent => "missing_component",
            WitnessKind::HierarchyMismatch => "hierarchy_mismatch",
            WitnessKind::InterfaceMismatch => "interface_mismatch",
            WitnessKind::MissingConnection => "missing_connection",
        }
    }
}

/// One sentence of explanation plus the elements it talks about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub text: String,
    pub refers_to: Vec<ElementRef>,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub kind: WitnessKind,
    pub fragment: CncModel,
    pub annotations: Vec<Annotation>,
}

/// The sentence reported for a satisfied view.
pub fn satisfaction_text(model: &str, view: &str) -> String {
    format!("C&C model {model} satisfies view {view}.")
}

fn endpoint_str(cmp: &str, port: Option<&str>) -> String {
    match port {
        Some(p) => format!("{cmp}.{p}"),
        None => cmp.to_string(),
    }
}

/// The explanation sentence for one non-satisfaction reason.
pub fn render_text(model: &str, view: &str, reason: &NonSatReason) -> String {
    match reason {
        NonSatReason::MissingComponent { cmp } => {
            format!("Component {cmp} from view {view} does not exist in C&C model {model}.")
        }
        NonSatReason::HierarchyMismatch { kind, cmp, sub_cmp } => match kind {
            HierarchyMismatchKind::ContainedInModelOnly => format!(
                "Components {cmp} and {sub_cmp} are independent in view {view} \
                 but not independent in C&C model {model}."
            ),
            HierarchyMismatchKind::IndependentInModelOnly => format!(
                "Components {cmp} and {sub_cmp} are independent in C&C model {model} \
                 but not independent in view {view}"
            ),
            HierarchyMismatchKind::ReverseContainment => format!(
                "Component {sub_cmp} contains {cmp} in C&C model {model} \
                 but {cmp} contains {sub_cmp} in view {view}."
            ),
        },
        NonSatReason::InterfaceMismatch {
            cmp,
            view_port,
            failure,
        } => {
            let base = format!(
                "Component {cmp} in C&C model {model} has no port matching \
                 port {} of view {view}",
                view_port.describe()
            );
            let name = view_port.name.as_deref().unwrap_or("*");
            match failure {
                InterfaceFailure::NoMatchingPort => format!("{base}."),
                InterfaceFailure::TypeMismatch { found } => {
                    format!("{base}; port {name} has type {found}.")
                }
                InterfaceFailure::DirectionMismatch { found } => {
                    format!("{base}; port {name} has direction {found}.")
                }
            }
        }
        NonSatReason::MissingConnection { con } => format!(
            "There is no chain of connectors from {} to {} in C&C model {model} \
             as required by view {view}.",
            endpoint_str(&con.src_cmp, con.src_port.as_deref()),
            endpoint_str(&con.tgt_cmp, con.tgt_port.as_deref()),
        ),
    }
}

/// Completes a selection of model elements into a well-formed fragment: the
/// least common parent of the selected components becomes the fragment
/// root, every selected component keeps its ancestor path up to that root,
/// and selected ports and connectors are copied in model declaration order.
fn close_fragment(
    m: &CncModel,
    name: &str,
    comps: &IndexSet<String>,
    ports: &IndexSet<(String, String)>,
    cons: &HashSet<usize>,
) -> CncModel {
    let mut frag = CncModel::new(name);
    if comps.is_empty() {
        return frag;
    }
    let root = m
        .least_common_parent(comps.iter().map(String::as_str))
        .expect("selected components exist in the model");
    let mut include: HashSet<&str> = HashSet::new();
    for c in comps {
        let mut cur: &str = c;
        loop {
            include.insert(cur);
            if cur == root {
                break;
            }
            cur = m
                .component(cur)
                .and_then(|cc| cc.parent())
                .expect("the least common parent is an ancestor of every selection");
        }
    }
    // Model declaration order lists parents before children, so adding in
    // that order and then linking keeps child order identical to the model.
    let ordered: Vec<&str> = m
        .component_names()
        .filter(|c| include.contains(c))
        .collect();
    for &c in &ordered {
        frag.add_component(c, None).expect("names are unique");
    }
    for &c in &ordered {
        if c != root {
            let parent = m.component(c).and_then(|cc| cc.parent());
            frag.set_parent(c, parent).expect("parent was added");
        }
    }
    for &c in &ordered {
        for p in m.component(c).expect("selection exists").ports() {
            if ports.contains(&(c.to_string(), p.name.clone())) {
                frag.add_port(c, &p.name, p.direction, p.ty.clone())
                    .expect("component was added");
            }
        }
    }
    for (idx, con) in m.connectors().iter().enumerate() {
        if cons.contains(&idx) {
            frag.add_connector(
                &con.src.component,
                &con.src.port,
                &con.tgt.component,
                &con.tgt.port,
            );
        }
    }
    frag
}

/// Witness that the model satisfies the view. The fragment contains every
/// view component, one realizing chain per abstract connector (chains
/// already inside the fragment are reused rather than duplicated), one
/// matching model port per view port, and the containment closure of all
/// of that. Fails with `Error::NotSatisfied` on an unsatisfied pair.
pub fn build_satisfaction_witness(m: &CncModel, v: &CncView) -> Result<Witness> {
    if !verify::satisfies(m, v) {
        return Err(Error::NotSatisfied {
            model: m.name().to_string(),
            view: v.name().to_string(),
        });
    }
    let mut comps: IndexSet<String> = v.component_names().map(str::to_string).collect();
    let mut ports: IndexSet<(String, String)> = IndexSet::new();
    let mut cons: HashSet<usize> = HashSet::new();
    for ac in v.abs_connectors() {
        if verify::find_chain(m, v, ac, Some(&cons)).is_some() {
            continue;
        }
        let chain =
            verify::find_chain(m, v, ac, None).expect("connection check passed, chain exists");
        for idx in chain {
            let con = &m.connectors()[idx];
            cons.insert(idx);
            for ep in [&con.src, &con.tgt] {
                comps.insert(ep.component.clone());
                ports.insert((ep.component.clone(), ep.port.clone()));
            }
        }
    }
    for vc in v.components() {
        let mc = m
            .component(vc.name())
            .expect("missing-component check passed");
        for vp in vc.ports() {
            let covered = ports.iter().any(|(c, p)| {
                c == vc.name() && mc.port(p).is_some_and(|mp| view_port_matches(vp, mp))
            });
            if covered {
                continue;
            }
            let pick = mc
                .ports()
                .iter()
                .find(|p| view_port_matches(vp, p))
                .expect("interface check passed, a match exists");
            ports.insert((vc.name().to_string(), pick.name.clone()));
        }
    }
    let fragment = close_fragment(m, &format!("W_sat_{}", v.name()), &comps, &ports, &cons);
    Ok(Witness {
        kind: WitnessKind::Satisfaction,
        fragment,
        annotations: vec![Annotation {
            text: satisfaction_text(m.name(), v.name()),
            refers_to: vec![ElementRef::Document],
        }],
    })
}

fn build_missing_component_witness(m: &CncModel, v: &CncView, cmp: &str) -> Witness {
    // Nothing in the model demonstrates an absence; the fragment is empty.
    Witness {
        kind: WitnessKind::MissingComponent,
        fragment: CncModel::new(format!("W_missing_{cmp}")),
        annotations: vec![Annotation {
            text: render_text(
                m.name(),
                v.name(),
                &NonSatReason::MissingComponent {
                    cmp: cmp.to_string(),
                },
            ),
            refers_to: vec![ElementRef::Component(cmp.to_string())],
        }],
    }
}

fn build_hierarchy_witness(m: &CncModel, v: &CncView, reason: &NonSatReason) -> Witness {
    let NonSatReason::HierarchyMismatch { cmp, sub_cmp, .. } = reason else {
        unreachable!("dispatched on reason kind");
    };
    let comps: IndexSet<String> = [cmp.clone(), sub_cmp.clone()].into_iter().collect();
    let fragment = close_fragment(
        m,
        &format!("W_hierarchy_{cmp}_{sub_cmp}"),
        &comps,
        &IndexSet::new(),
        &HashSet::new(),
    );
    Witness {
        kind: WitnessKind::HierarchyMismatch,
        fragment,
        annotations: vec![Annotation {
            text: render_text(m.name(), v.name(), reason),
            refers_to: vec![
                ElementRef::Component(cmp.clone()),
                ElementRef::Component(sub_cmp.clone()),
            ],
        }],
    }
}

fn build_interface_witness(m: &CncModel, v: &CncView, reason: &NonSatReason) -> Witness {
    let NonSatReason::InterfaceMismatch {
        cmp,
        view_port,
        failure,
    } = reason
    else {
        unreachable!("dispatched on reason kind");
    };
    let mc = m
        .component(cmp)
        .expect("interface check only reports present components");
    let comps: IndexSet<String> = [cmp.clone()].into_iter().collect();
    let mut ports: IndexSet<(String, String)> = IndexSet::new();
    let mut refers = vec![ElementRef::Component(cmp.clone())];
    match failure {
        InterfaceFailure::TypeMismatch { .. } | InterfaceFailure::DirectionMismatch { .. } => {
            // The port with the requested name exists; show only it.
            let name = view_port
                .name
                .clone()
                .expect("mismatch kinds require a name");
            ports.insert((cmp.clone(), name.clone()));
            refers.push(ElementRef::Port {
                component: cmp.clone(),
                port: name,
            });
        }
        InterfaceFailure::NoMatchingPort => {
            // Show the complete interface: no port matches.
            for p in mc.ports() {
                ports.insert((cmp.clone(), p.name.clone()));
            }
        }
    }
    let name = match view_port.name.as_deref() {
        Some(p) => format!("W_interface_{cmp}_{p}"),
        None => format!("W_interface_{cmp}"),
    };
    let fragment = close_fragment(m, &name, &comps, &ports, &HashSet::new());
    Witness {
        kind: WitnessKind::InterfaceMismatch,
        fragment,
        annotations: vec![Annotation {
            text: render_text(m.name(), v.name(), reason),
            refers_to: refers,
        }],
    }
}

fn build_missing_connection_witness(m: &CncModel, v: &CncView, reason: &NonSatReason) -> Witness {
    let NonSatReason::MissingConnection { con: ac } = reason else {
        unreachable!("dispatched on reason kind");
    };
    let mut comps: IndexSet<String> = [ac.src_cmp.clone(), ac.tgt_cmp.clone()]
        .into_iter()
        .collect();
    let mut ports: IndexSet<(String, String)> = IndexSet::new();
    let mut cons: HashSet<usize> = HashSet::new();
    // Everything reachable by chains from the source (from the named port
    // when there is one) shows that no chain arrives at the target.
    let src = m
        .component(&ac.src_cmp)
        .expect("connection check skips absent endpoints");
    let seeds: Vec<(&str, &str)> = match ac.src_port.as_deref() {
        Some(name) => match src.port(name) {
            Some(p) => vec![(src.name(), p.name.as_str())],
            None => Vec::new(),
        },
        None => {
            let mut s: Vec<(&str, &str)> = src
                .ports()
                .iter()
                .map(|p| (src.name(), p.name.as_str()))
                .collect();
            s.sort_unstable();
            s
        }
    };
    // The chain origins belong in the demonstration even when nothing
    // leaves them: an absent port would be indistinguishable from a port
    // that does not exist.
    for &(c, p) in &seeds {
        ports.insert((c.to_string(), p.to_string()));
    }
    let adj = m.port_successors(None);
    let mut visited: HashSet<(&str, &str)> = seeds.iter().copied().collect();
    let mut queue: VecDeque<(&str, &str)> = seeds.into_iter().collect();
    while let Some(at) = queue.pop_front() {
        let Some(nexts) = adj.get(&at) else {
            continue;
        };
        for &(next, idx) in nexts {
            cons.insert(idx);
            let con = &m.connectors()[idx];
            for ep in [&con.src, &con.tgt] {
                comps.insert(ep.component.clone());
                ports.insert((ep.component.clone(), ep.port.clone()));
            }
            if visited.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let fragment = close_fragment(
        m,
        &format!("W_connection_{}_{}", ac.src_cmp, ac.tgt_cmp),
        &comps,
        &ports,
        &cons,
    );
    Witness {
        kind: WitnessKind::MissingConnection,
        fragment,
        annotations: vec![Annotation {
            text: render_text(m.name(), v.name(), reason),
            refers_to: vec![
                ElementRef::Component(ac.src_cmp.clone()),
                ElementRef::Component(ac.tgt_cmp.clone()),
            ],
        }],
    }
}

/// Builds the witness for one non-satisfaction reason.
pub fn build_for_reason(m: &CncModel, v: &CncView, reason: &NonSatReason) -> Witness {
    match reason {
        NonSatReason::MissingComponent { cmp } => build_missing_component_witness(m, v, cmp),
        NonSatReason::HierarchyMismatch { .. } => build_hierarchy_witness(m, v, reason),
        NonSatReason::InterfaceMismatch { .. } => build_interface_witness(m, v, reason),
        NonSatReason::MissingConnection { .. } => build_missing_connection_witness(m, v, reason),
    }
}

/// Reads a witness fragment back as a view: every component, every port
/// (fully specified), and every connector (as an abstract connector with
/// both endpoint ports named). The fragment's model satisfies this view.
pub fn witness_as_view(w: &Witness) -> CncView {
    let mut view = CncView::new(w.fragment.name());
    for c in w.fragment.components() {
        view.add_component(c.name(), c.parent())
            .expect("fragment names are unique and parents precede children");
        for p in c.ports() {
            view.add_port(
                c.name(),
                ViewPort {
                    name: Some(p.name.clone()),
                    direction: p.direction,
                    ty: Some(p.ty.clone()),
                },
            )
            .expect("component was just added");
        }
    }
    for con in w.fragment.connectors() {
        view.add_abs_connector(AbstractConnector {
            src_cmp: con.src.component.clone(),
            src_port: Some(con.src.port.clone()),
            tgt_cmp: con.tgt.component.clone(),
            tgt_port: Some(con.tgt.port.clone()),
        });
    }
    view
}
