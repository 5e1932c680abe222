//! Brute-force reference verifier and a randomized generator of model/view
//! pairs, shared by the integration suites.
//!
//! The reference recomputes every verdict from first principles with the
//! slowest, most obviously correct method available: containment closure by
//! boolean matrix powering, chain search by exhaustive depth-first
//! enumeration over connector sequences, port matching by direct
//! comparison. It shares no decision logic with the production verifier,
//! only the data accessors.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use ccview_core::generate::{
    derive_view, gen_model, ModelGenParams, MutationKind, ViewDeriveParams,
};
use ccview_core::rng::SplitMix64;
use ccview_core::{
    AbstractConnector, CncModel, CncView, Direction, HierarchyMismatchKind, InterfaceFailure,
    NonSatReason, TypeName, ViewPort,
};

/// A reason projected onto a comparable value carrying its full payload,
/// so reason lists from the verifier and the reference can be compared as
/// multisets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReasonKey {
    Missing(String),
    /// Tag 0 = contained in model only, 1 = independent in model only,
    /// 2 = reverse containment; then the pair as (container, contained).
    Hierarchy(u8, String, String),
    /// Component, port description, failure rendered as
    /// `none` / `type:<found>` / `dir:<found>`.
    Interface(String, String, String),
    Connection(String),
}

pub fn key_of(r: &NonSatReason) -> ReasonKey {
    match r {
        NonSatReason::MissingComponent { cmp } => ReasonKey::Missing(cmp.clone()),
        NonSatReason::HierarchyMismatch { kind, cmp, sub_cmp } => {
            let tag = match kind {
                HierarchyMismatchKind::ContainedInModelOnly => 0,
                HierarchyMismatchKind::IndependentInModelOnly => 1,
                HierarchyMismatchKind::ReverseContainment => 2,
            };
            ReasonKey::Hierarchy(tag, cmp.clone(), sub_cmp.clone())
        }
        NonSatReason::InterfaceMismatch {
            cmp,
            view_port,
            failure,
        } => {
            let tag = match failure {
                InterfaceFailure::NoMatchingPort => "none".to_string(),
                InterfaceFailure::TypeMismatch { found } => format!("type:{found}"),
                InterfaceFailure::DirectionMismatch { found } => format!("dir:{found}"),
            };
            ReasonKey::Interface(cmp.clone(), view_port.describe(), tag)
        }
        NonSatReason::MissingConnection { con } => ReasonKey::Connection(con.to_string()),
    }
}

/// Transitive (ancestor, descendant) pairs from direct parent-child edges,
/// closed by boolean matrix powering.
fn containment_pairs(names: &[String], edges: &[(String, String)]) -> HashSet<(String, String)> {
    let idx: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let n = names.len();
    let mut reach = vec![vec![false; n]; n];
    for (parent, child) in edges {
        reach[idx[parent.as_str()]][idx[child.as_str()]] = true;
    }
    for k in 0..n {
        let row_k = reach[k].clone();
        for row in &mut reach {
            if row[k] {
                for (j, &through_k) in row_k.iter().enumerate() {
                    if through_k {
                        row[j] = true;
                    }
                }
            }
        }
    }
    let mut out = HashSet::new();
    for i in 0..n {
        for j in 0..n {
            if reach[i][j] {
                out.insert((names[i].clone(), names[j].clone()));
            }
        }
    }
    out
}

fn model_closure(m: &CncModel) -> HashSet<(String, String)> {
    let names: Vec<String> = m.component_names().map(str::to_string).collect();
    let edges: Vec<(String, String)> = m
        .components()
        .filter_map(|c| c.parent().map(|p| (p.to_string(), c.name().to_string())))
        .collect();
    containment_pairs(&names, &edges)
}

fn view_closure(v: &CncView) -> HashSet<(String, String)> {
    let names: Vec<String> = v.component_names().map(str::to_string).collect();
    let edges: Vec<(String, String)> = v
        .components()
        .filter_map(|c| c.parent().map(|p| (p.to_string(), c.name().to_string())))
        .collect();
    containment_pairs(&names, &edges)
}

/// The view's declared type for a named port of a component: the first
/// port with that name decides, known type or not.
fn declared(v: &CncView, cmp: &str, name: &str) -> Option<TypeName> {
    v.component(cmp)?
        .ports()
        .iter()
        .find(|p| p.name.as_deref() == Some(name))
        .and_then(|p| p.ty.clone())
}

/// Exhaustive chain search: every sequence of distinct connectors linked on
/// shared ports, starting at an admissible port of the source component, is
/// tried until one ends on an admissible port of the target component.
pub fn oracle_chain_exists(m: &CncModel, v: &CncView, ac: &AbstractConnector) -> bool {
    let ok_tgt = |cmp: &str, port: &str| -> bool {
        if cmp != ac.tgt_cmp {
            return false;
        }
        match ac.tgt_port.as_deref() {
            None => true,
            Some(want) => {
                port == want
                    && match declared(v, &ac.tgt_cmp, want) {
                        Some(ty) => m.port(cmp, port).map(|p| p.ty.clone()) == Some(ty),
                        None => true,
                    }
            }
        }
    };
    fn dfs(
        m: &CncModel,
        at: (&str, &str),
        used: &mut Vec<bool>,
        ok_tgt: &impl Fn(&str, &str) -> bool,
    ) -> bool {
        let cons = m.connectors();
        for i in 0..cons.len() {
            if used[i] {
                continue;
            }
            let c = &cons[i];
            if c.src.component != at.0 || c.src.port != at.1 {
                continue;
            }
            if ok_tgt(&c.tgt.component, &c.tgt.port) {
                return true;
            }
            used[i] = true;
            let hit = dfs(m, (&c.tgt.component, &c.tgt.port), used, ok_tgt);
            used[i] = false;
            if hit {
                return true;
            }
        }
        false
    }
    let Some(src) = m.component(&ac.src_cmp) else {
        return false;
    };
    let seeds: Vec<String> = match ac.src_port.as_deref() {
        Some(name) => {
            let Some(p) = src.ports().iter().find(|p| p.name == name) else {
                return false;
            };
            if let Some(want) = declared(v, &ac.src_cmp, name) {
                if p.ty != want {
                    return false;
                }
            }
            vec![name.to_string()]
        }
        None => src.ports().iter().map(|p| p.name.clone()).collect(),
    };
    let mut used = vec![false; m.connectors().len()];
    seeds
        .iter()
        .any(|p| dfs(m, (&ac.src_cmp, p), &mut used, &ok_tgt))
}

/// Every reason the brute-force reference finds, sorted for multiset
/// comparison.
pub fn oracle_keys(m: &CncModel, v: &CncView) -> Vec<ReasonKey> {
    let mut keys = Vec::new();

    let present: Vec<&str> = v.component_names().filter(|c| m.has_component(c)).collect();
    for c in v.component_names() {
        if !m.has_component(c) {
            keys.push(ReasonKey::Missing(c.to_string()));
        }
    }

    let mcl = model_closure(m);
    let vcl = view_closure(v);
    let rel = |a: &str, b: &str, cl: &HashSet<(String, String)>| -> u8 {
        if cl.contains(&(a.to_string(), b.to_string())) {
            0 // first contains second
        } else if cl.contains(&(b.to_string(), a.to_string())) {
            1 // second contains first
        } else {
            2 // independent
        }
    };
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            let rv = rel(a, b, &vcl);
            let rm = rel(a, b, &mcl);
            if rv == rm {
                continue;
            }
            let (tag, cmp, sub) = match (rv, rm) {
                (0, 2) => (1, a, b),
                (1, 2) => (1, b, a),
                (0, 1) => (2, a, b),
                (1, 0) => (2, b, a),
                (2, 0) => (0, a, b),
                (2, 1) => (0, b, a),
                _ => unreachable!("equal relations were skipped"),
            };
            keys.push(ReasonKey::Hierarchy(tag, cmp.to_string(), sub.to_string()));
        }
    }

    for vc in v.components() {
        let Some(mc) = m.component(vc.name()) else {
            continue;
        };
        for vp in vc.ports() {
            let matched = mc.ports().iter().any(|p| {
                vp.direction == p.direction
                    && vp.name.as_deref().is_none_or(|n| n == p.name)
                    && vp.ty.as_ref().is_none_or(|t| *t == p.ty)
            });
            if matched {
                continue;
            }
            let found = vp
                .name
                .as_deref()
                .and_then(|n| mc.ports().iter().find(|p| p.name == n));
            let tag = match found {
                Some(p) if p.direction == vp.direction => format!("type:{}", p.ty),
                Some(p) => format!("dir:{}", p.direction),
                None => "none".to_string(),
            };
            keys.push(ReasonKey::Interface(
                vc.name().to_string(),
                vp.describe(),
                tag,
            ));
        }
    }

    for ac in v.abs_connectors() {
        if !m.has_component(&ac.src_cmp) || !m.has_component(&ac.tgt_cmp) {
            continue;
        }
        if !oracle_chain_exists(m, v, ac) {
            keys.push(ReasonKey::Connection(ac.to_string()));
        }
    }

    keys.sort();
    keys
}

pub fn oracle_satisfied(m: &CncModel, v: &CncView) -> bool {
    oracle_keys(m, v).is_empty()
}

/// A random model of at most 12 components with a derived view that has
/// been mutated and then wildly edited, so that over many draws every
/// verdict and reason kind occurs.
pub fn random_pair(rng: &mut SplitMix64) -> (CncModel, CncView) {
    let params = ModelGenParams {
        components: rng.range(2, 12),
        max_subs: 3,
        port_types: rng.range(1, 4),
        ports: rng.range(0, 24),
        max_connectors: rng.range(0, 16),
    };
    let m = gen_model(&params, rng.next_u64()).expect("feasible parameters");
    let mut mutations = Vec::new();
    for _ in 0..rng.below(4) {
        mutations.push(*rng.pick(&MutationKind::ALL).expect("non-empty"));
    }
    let dparams = ViewDeriveParams {
        keep_components: rng.range(1, m.len()),
        max_keep_ports: rng.range(0, 8),
        max_keep_connectors: rng.range(0, 5),
        mutations,
    };
    let (mut v, _) = derive_view(&m, &dparams, rng.next_u64());
    wild_edits(&m, &mut v, rng);
    (m, v)
}

/// A random satisfied pair: a derived view without mutations or edits.
pub fn satisfied_pair(rng: &mut SplitMix64) -> (CncModel, CncView) {
    let params = ModelGenParams {
        components: rng.range(2, 12),
        max_subs: 3,
        port_types: rng.range(1, 4),
        ports: rng.range(0, 24),
        max_connectors: rng.range(0, 16),
    };
    let m = gen_model(&params, rng.next_u64()).expect("feasible parameters");
    let dparams = ViewDeriveParams {
        keep_components: rng.range(1, m.len()),
        max_keep_ports: rng.range(0, 8),
        max_keep_connectors: rng.range(0, 5),
        mutations: Vec::new(),
    };
    let (v, _) = derive_view(&m, &dparams, rng.next_u64());
    (m, v)
}

/// Random edits beyond the structured mutations: extra abstract connectors
/// and ports (sometimes borrowing real model names, sometimes corrupted),
/// reparenting, and renames to absent components. These push the view
/// outside everything the derivation guarantees.
fn wild_edits(m: &CncModel, v: &mut CncView, rng: &mut SplitMix64) {
    const TYPE_POOL: [&str; 4] = ["T0", "T1", "T2", "Bogus"];
    const PORT_POOL: [&str; 5] = ["p0", "p1", "p2", "p3", "zz"];
    for _ in 0..rng.below(4) {
        let names: Vec<String> = v.component_names().map(str::to_string).collect();
        if names.is_empty() {
            return;
        }
        match rng.below(4) {
            0 => {
                let src_cmp = rng.pick(&names).expect("non-empty").clone();
                let tgt_cmp = rng.pick(&names).expect("non-empty").clone();
                let src_port = random_port_name(m, rng, &src_cmp, &PORT_POOL);
                let tgt_port = random_port_name(m, rng, &tgt_cmp, &PORT_POOL);
                v.add_abs_connector(AbstractConnector {
                    src_cmp,
                    src_port,
                    tgt_cmp,
                    tgt_port,
                });
            }
            1 => {
                let cmp = rng.pick(&names).expect("non-empty").clone();
                let taken: Vec<String> = v
                    .component(&cmp)
                    .expect("picked from the view")
                    .ports()
                    .iter()
                    .filter_map(|p| p.name.clone())
                    .collect();
                let model_ports: Vec<_> = m
                    .component(&cmp)
                    .map(|c| c.ports().to_vec())
                    .unwrap_or_default();
                let vp = if !model_ports.is_empty() && rng.chance(1, 2) {
                    // Start from a real port, then possibly corrupt one
                    // attribute so name-based mismatches occur.
                    let p = rng.pick(&model_ports).expect("non-empty").clone();
                    let mut vp = ViewPort {
                        name: Some(p.name.clone()),
                        direction: p.direction,
                        ty: Some(p.ty.clone()),
                    };
                    match rng.below(4) {
                        0 => vp.ty = Some(TypeName::new("Bogus")),
                        1 => {
                            vp.direction = match vp.direction {
                                Direction::In => Direction::Out,
                                Direction::Out => Direction::In,
                            }
                        }
                        2 => vp.ty = None,
                        _ => {}
                    }
                    vp
                } else {
                    ViewPort {
                        name: rng
                            .chance(1, 2)
                            .then(|| rng.pick(&PORT_POOL).expect("non-empty").to_string()),
                        direction: if rng.chance(1, 2) {
                            Direction::In
                        } else {
                            Direction::Out
                        },
                        ty: rng
                            .chance(1, 2)
                            .then(|| TypeName::new(*rng.pick(&TYPE_POOL).expect("non-empty"))),
                    }
                };
                // Views reject duplicate known port names.
                if vp.name.as_ref().is_some_and(|n| taken.contains(n)) {
                    continue;
                }
                v.add_port(&cmp, vp).expect("component exists");
            }
            2 => {
                let child = rng.pick(&names).expect("non-empty").clone();
                let parent = rng
                    .chance(1, 4)
                    .then(|| rng.pick(&names).expect("non-empty").clone())
                    .filter(|p| *p != child && !v.contains_transitive(&child, p));
                v.set_parent(&child, parent.as_deref())
                    .expect("no cycle by construction");
            }
            _ => {
                let old = rng.pick(&names).expect("non-empty").clone();
                let new = if rng.chance(1, 2) {
                    format!("Ghost{}", rng.below(100))
                } else {
                    let absent: Vec<String> = m
                        .component_names()
                        .filter(|n| !v.has_component(n))
                        .map(str::to_string)
                        .collect();
                    match rng.pick(&absent) {
                        Some(n) => n.clone(),
                        None => continue,
                    }
                };
                if !v.has_component(&new) {
                    v.rename_component(&old, new).expect("new name is free");
                }
            }
        }
    }
}

fn random_port_name(
    m: &CncModel,
    rng: &mut SplitMix64,
    cmp: &str,
    pool: &[&str],
) -> Option<String> {
    if !rng.chance(1, 2) {
        return None;
    }
    let real: Vec<String> = m
        .component(cmp)
        .map(|c| c.ports().iter().map(|p| p.name.clone()).collect())
        .unwrap_or_default();
    if !real.is_empty() && rng.chance(2, 3) {
        Some(rng.pick(&real).expect("non-empty").clone())
    } else {
        Some(rng.pick(pool).expect("non-empty").to_string())
    }
}
