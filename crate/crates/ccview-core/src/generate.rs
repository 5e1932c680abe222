//! Random model generation and view derivation.
//!
//! `gen_model` produces a valid model of a requested size; `derive_view`
//! projects a random fraction of a model into a view that the model
//! satisfies by construction, then optionally applies mutations. Mutation
//! kinds split into two families: the benign ones erase information (a
//! port's name or type, a connector's endpoint ports) and can never turn a
//! satisfied view unsatisfied; the others change or rename things and, on a
//! satisfied view, each guarantees a violation. Everything is driven by a
//! seed and fully deterministic.

use std::collections::HashSet;
use std::str::FromStr;

use crate::model::{AbstractConnector, CncModel, CncView, Direction, TypeName, ViewPort};
use crate::rng::SplitMix64;
use crate::verify::{find_chain, satisfies};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ModelGenParams {
    /// Total number of components (at least 1; the first is the top).
    pub components: usize,
    /// Maximum direct subcomponents per component (at least 1).
    pub max_subs: usize,
    /// Size of the port type vocabulary.
    pub port_types: usize,
    /// Exact number of ports, distributed uniformly over components.
    pub ports: usize,
    /// Connector attempts; each adds at most one connector, so this bounds
    /// the connector count. Attempts fail only when the drawn target port
    /// has no legally reachable source of the same type.
    pub max_connectors: usize,
}

impl Default for ModelGenParams {
    fn default() -> Self {
        ModelGenParams {
            components: 20,
            max_subs: 4,
            port_types: 5,
            ports: 60,
            max_connectors: 40,
        }
    }
}

/// Generates a valid model named `Gen<seed>`: components `C0..`, types
/// `T0..`, per-component port names `p0..`. Components attach to a random
/// earlier component with spare child capacity, so `C0` is the single top.
pub fn gen_model(params: &ModelGenParams, seed: u64) -> Result<CncModel> {
    if params.components == 0 {
        return Err(Error::InfeasibleParams(
            "a model needs at least one component".to_string(),
        ));
    }
    if params.max_subs == 0 && params.components > 1 {
        return Err(Error::InfeasibleParams(
            "max_subs 0 cannot place more than one component".to_string(),
        ));
    }
    if params.port_types == 0 && params.ports > 0 {
        return Err(Error::InfeasibleParams(
            "ports need at least one port type".to_string(),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let mut m = CncModel::new(format!("Gen{seed}"));
    let names: Vec<String> = (0..params.components).map(|i| format!("C{i}")).collect();
    let mut child_count = vec![0usize; params.components];
    m.add_component(&names[0], None).expect("fresh name");
    for i in 1..params.components {
        let open: Vec<usize> = (0..i)
            .filter(|&j| child_count[j] < params.max_subs)
            .collect();
        let j = *rng
            .pick(&open)
            .expect("the newest component always has room");
        m.add_component(&names[i], Some(&names[j]))
            .expect("fresh name");
        child_count[j] += 1;
    }
    let mut ports_on = vec![0usize; params.components];
    for _ in 0..params.ports {
        let owner = rng.below(params.components);
        let direction = if rng.chance(1, 2) {
            Direction::In
        } else {
            Direction::Out
        };
        let ty = format!("T{}", rng.below(params.port_types));
        let port = format!("p{}", ports_on[owner]);
        ports_on[owner] += 1;
        m.add_port(&names[owner], &port, direction, ty.as_str())
            .expect("per-component port names count up");
    }
    // Each attempt draws a target port without an incoming connector, then
    // a random legal source: same type and either an out port of a sibling,
    // an in port of the parent (toward an in port), or an out port of a
    // child (toward an out port).
    let all_ports: Vec<(String, String)> = m
        .components()
        .flat_map(|c| {
            c.ports()
                .iter()
                .map(|p| (c.name().to_string(), p.name.clone()))
        })
        .collect();
    let mut has_incoming: HashSet<(String, String)> = HashSet::new();
    for _ in 0..params.max_connectors {
        let free: Vec<&(String, String)> = all_ports
            .iter()
            .filter(|pair| !has_incoming.contains(*pair))
            .collect();
        let Some((tgt_cmp, tgt_port)) = rng.pick(&free).copied() else {
            break;
        };
        let tgt = m.port(tgt_cmp, tgt_port).expect("enumerated above");
        let tgt_ty = tgt.ty.clone();
        let tgt_dir = tgt.direction;
        let tgt_parent = m.component(tgt_cmp).and_then(|c| c.parent());
        let mut sources: Vec<(String, String)> = Vec::new();
        for c in m.components() {
            for p in c.ports() {
                if p.ty != tgt_ty {
                    continue;
                }
                let legal = match (tgt_dir, p.direction) {
                    (Direction::In, Direction::Out) => {
                        c.name() != tgt_cmp && c.parent() == tgt_parent
                    }
                    (Direction::In, Direction::In) => Some(c.name()) == tgt_parent,
                    (Direction::Out, Direction::Out) => c.parent() == Some(tgt_cmp.as_str()),
                    (Direction::Out, Direction::In) => false,
                };
                if legal {
                    sources.push((c.name().to_string(), p.name.clone()));
                }
            }
        }
        let Some((src_cmp, src_port)) = rng.pick(&sources).cloned() else {
            continue;
        };
        m.add_connector(&src_cmp, &src_port, tgt_cmp, tgt_port);
        has_incoming.insert((tgt_cmp.clone(), tgt_port.clone()));
    }
    debug_assert!(m.validate().is_empty(), "generated models are valid");
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct ViewDeriveParams {
    /// How many of the model's components the view keeps.
    pub keep_components: usize,
    /// Upper bound on fully specified ports copied into the view.
    pub max_keep_ports: usize,
    /// Upper bound on abstract connectors, each backed by an actual chain.
    pub max_keep_connectors: usize,
    /// Mutations to apply afterwards, in order.
    pub mutations: Vec<MutationKind>,
}

impl Default for ViewDeriveParams {
    fn default() -> Self {
        ViewDeriveParams {
            keep_components: 5,
            max_keep_ports: 6,
            max_keep_connectors: 3,
            mutations: Vec::new(),
        }
    }
}

/// Derives a view named `V<seed>` that `m` satisfies by construction:
/// a random component subset with containment projected to the nearest kept
/// ancestor, fully specified ports copied from the model, and abstract
/// connectors read off actual connector chains. Mutations are then applied
/// in order; the returned records tell what each one did.
pub fn derive_view(
    m: &CncModel,
    params: &ViewDeriveParams,
    seed: u64,
) -> (CncView, Vec<MutationRecord>) {
    let mut rng = SplitMix64::new(seed);
    let mut view = CncView::new(format!("V{seed}"));
    let keep = params.keep_components.min(m.len());
    let mut kept_idx = rng.sample_indices(m.len(), keep);
    // Model order lists parents before children, so inserting in that
    // order lets each component find its projected parent already there.
    kept_idx.sort_unstable();
    let all_names: Vec<&str> = m.component_names().collect();
    let kept: HashSet<&str> = kept_idx.iter().map(|&i| all_names[i]).collect();
    for &i in &kept_idx {
        let name = all_names[i];
        let mut parent = m.component(name).and_then(|c| c.parent());
        while let Some(p) = parent {
            if kept.contains(p) {
                break;
            }
            parent = m.component(p).and_then(|c| c.parent());
        }
        view.add_component(name, parent)
            .expect("parents inserted first");
    }

    let port_pool: Vec<(String, ViewPort)> = kept_idx
        .iter()
        .flat_map(|&i| {
            let c = m.component(all_names[i]).expect("kept name");
            c.ports().iter().map(|p| {
                (
                    c.name().to_string(),
                    ViewPort {
                        name: Some(p.name.clone()),
                        direction: p.direction,
                        ty: Some(p.ty.clone()),
                    },
                )
            })
        })
        .collect();
    let keep_ports = params.max_keep_ports.min(port_pool.len());
    let mut port_idx = rng.sample_indices(port_pool.len(), keep_ports);
    port_idx.sort_unstable();
    for i in port_idx {
        let (cmp, port) = port_pool[i].clone();
        view.add_port(&cmp, port).expect("kept component");
    }

    let kept_sorted: Vec<&str> = kept_idx.iter().map(|&i| all_names[i]).collect();
    let mut added = 0;
    if kept_sorted.len() >= 2 {
        for _ in 0..4 * params.max_keep_connectors {
            if added == params.max_keep_connectors {
                break;
            }
            let s = kept_sorted[rng.below(kept_sorted.len())];
            let t = kept_sorted[rng.below(kept_sorted.len())];
            if s == t {
                continue;
            }
            let mut ac = AbstractConnector {
                src_cmp: s.to_string(),
                src_port: None,
                tgt_cmp: t.to_string(),
                tgt_port: None,
            };
            let Some(chain) = find_chain(m, &view, &ac, None) else {
                continue;
            };
            // Optionally pin the endpoints to the chain's actual ports.
            let first = &m.connectors()[chain[0]];
            let last = &m.connectors()[chain[chain.len() - 1]];
            if rng.chance(1, 2) {
                ac.src_port = Some(first.src.port.clone());
            }
            if rng.chance(1, 2) {
                ac.tgt_port = Some(last.tgt.port.clone());
            }
            view.add_abs_connector(ac);
            added += 1;
        }
    }
    debug_assert!(satisfies(m, &view), "derived views are satisfied");

    let mut records = Vec::new();
    let mut fresh = 0u32;
    for kind in &params.mutations {
        records.push(apply_mutation(m, &mut view, *kind, &mut rng, &mut fresh));
    }
    (view, records)
}

/// A way to damage or blur a view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationKind {
    /// Give a fully known port a different type. Breaking.
    ChangePortType,
    /// Rename a component to a name the model does not have. Breaking.
    RenameComponent,
    /// Rename a known port to a name its component does not have. Breaking.
    RenamePort,
    /// Swap the names of two components when that changes the verdict.
    /// Breaking.
    SwapComponentNames,
    /// Forget a port's name. Benign: never un-satisfies a view.
    ErasePortName,
    /// Forget a port's type. Benign.
    ErasePortType,
    /// Forget both endpoint ports of an abstract connector. Benign.
    EraseConnectorEndpointPorts,
}

impl MutationKind {
    pub const ALL: [MutationKind; 7] = [
        MutationKind::ChangePortType,
        MutationKind::RenameComponent,
        MutationKind::RenamePort,
        MutationKind::SwapComponentNames,
        MutationKind::ErasePortName,
        MutationKind::ErasePortType,
        MutationKind::EraseConnectorEndpointPorts,
    ];

    /// Benign mutations only remove information from the view; a model
    /// satisfying the view before still satisfies it after.
    pub fn is_benign(&self) -> bool {
        matches!(
            self,
            MutationKind::ErasePortName
                | MutationKind::ErasePortType
                | MutationKind::EraseConnectorEndpointPorts
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            MutationKind::ChangePortType => "change-port-type",
            MutationKind::RenameComponent => "rename-component",
            MutationKind::RenamePort => "rename-port",
            MutationKind::SwapComponentNames => "swap-component-names",
            MutationKind::ErasePortName => "erase-port-name",
            MutationKind::ErasePortType => "erase-port-type",
            MutationKind::EraseConnectorEndpointPorts => "erase-connector-endpoint-ports",
        }
    }
}

impl FromStr for MutationKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        MutationKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| {
                let all: Vec<&str> = MutationKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown mutation `{s}` (expected one of {})",
                    all.join(", ")
                )
            })
    }
}

/// What one mutation did.
#[derive(Debug, Clone)]
pub struct MutationRecord {
    pub kind: MutationKind,
    pub applied: bool,
    pub detail: String,
}

fn skip(kind: MutationKind, why: &str) -> MutationRecord {
    MutationRecord {
        kind,
        applied: false,
        detail: format!("skipped: {why}"),
    }
}

fn done(kind: MutationKind, detail: String) -> MutationRecord {
    MutationRecord {
        kind,
        applied: true,
        detail,
    }
}

/// Ports of the view as `(component, index)` pairs passing `pred`.
fn port_candidates(view: &CncView, pred: impl Fn(&ViewPort) -> bool) -> Vec<(String, usize)> {
    view.components()
        .flat_map(|c| {
            c.ports()
                .iter()
                .enumerate()
                .filter(|(_, p)| pred(p))
                .map(|(i, _)| (c.name().to_string(), i))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn fresh_name(prefix: &str, fresh: &mut u32, taken: impl Fn(&str) -> bool) -> String {
    loop {
        let name = format!("{prefix}{fresh}");
        *fresh += 1;
        if !taken(&name) {
            return name;
        }
    }
}

/// Applies one mutation to the view, drawing choices from `rng` and fresh
/// names from the `fresh` counter. Returns what happened; mutations without
/// an applicable target are skipped, never silently replaced.
pub fn apply_mutation(
    m: &CncModel,
    view: &mut CncView,
    kind: MutationKind,
    rng: &mut SplitMix64,
    fresh: &mut u32,
) -> MutationRecord {
    match kind {
        MutationKind::ChangePortType => {
            let cands = port_candidates(view, |p| p.name.is_some() && p.ty.is_some());
            let Some((cmp, idx)) = rng.pick(&cands).cloned() else {
                return skip(kind, "no port with a known name and type");
            };
            let old = view.component(&cmp).expect("candidate").ports()[idx]
                .ty
                .clone()
                .expect("candidate has a type");
            let others: Vec<TypeName> = view
                .types()
                .into_iter()
                .filter(|t| **t != old)
                .cloned()
                .collect();
            let new = match rng.pick(&others) {
                Some(t) => t.clone(),
                None => TypeName::from(fresh_name("mut_type", fresh, |n| old.as_str() == n)),
            };
            let port = view.port_mut(&cmp, idx).expect("candidate");
            let name = port.name.clone().unwrap_or_default();
            port.ty = Some(new.clone());
            done(kind, format!("port {cmp}.{name}: type {old} -> {new}"))
        }
        MutationKind::RenameComponent => {
            let names: Vec<String> = view.component_names().map(str::to_string).collect();
            let Some(old) = rng.pick(&names).cloned() else {
                return skip(kind, "the view has no components");
            };
            let new = fresh_name("mut_cmp", fresh, |n| {
                m.has_component(n) || view.has_component(n)
            });
            view.rename_component(&old, &new).expect("candidate exists");
            done(kind, format!("component {old} -> {new}"))
        }
        MutationKind::RenamePort => {
            let cands = port_candidates(view, |p| p.name.is_some());
            let Some((cmp, idx)) = rng.pick(&cands).cloned() else {
                return skip(kind, "no port with a known name");
            };
            let old = view.component(&cmp).expect("candidate").ports()[idx]
                .name
                .clone()
                .expect("candidate has a name");
            let new = fresh_name("mut_port", fresh, |n| {
                m.port(&cmp, n).is_some()
                    || view
                        .component(&cmp)
                        .is_some_and(|c| c.ports().iter().any(|p| p.name.as_deref() == Some(n)))
            });
            view.port_mut(&cmp, idx).expect("candidate").name = Some(new.clone());
            for i in 0..view.abs_connectors().len() {
                let ac = view.abs_connector_mut(i).expect("index in range");
                if ac.src_cmp == cmp && ac.src_port.as_deref() == Some(&old) {
                    ac.src_port = Some(new.clone());
                }
                if ac.tgt_cmp == cmp && ac.tgt_port.as_deref() == Some(&old) {
                    ac.tgt_port = Some(new.clone());
                }
            }
            done(kind, format!("port {cmp}.{old} -> {cmp}.{new}"))
        }
        MutationKind::SwapComponentNames => {
            let names: Vec<String> = view.component_names().map(str::to_string).collect();
            if names.len() < 2 {
                return skip(kind, "fewer than two components");
            }
            let swap = |view: &mut CncView, a: &str, b: &str, fresh: &mut u32| {
                let tmp = fresh_name("mut_swap", fresh, |n| {
                    view.has_component(n) || m.has_component(n)
                });
                view.rename_component(a, &tmp).expect("exists");
                view.rename_component(b, a).expect("exists");
                view.rename_component(&tmp, b).expect("exists");
            };
            for _ in 0..16 {
                let a = rng.pick(&names).expect("nonempty").clone();
                let b = rng.pick(&names).expect("nonempty").clone();
                if a == b {
                    continue;
                }
                swap(view, &a, &b, fresh);
                if !satisfies(m, view) {
                    return done(kind, format!("components {a} <-> {b}"));
                }
                swap(view, &a, &b, fresh);
            }
            skip(kind, "no name swap changes the verdict")
        }
        MutationKind::ErasePortName => {
            let cands = port_candidates(view, |p| p.name.is_some());
            let Some((cmp, idx)) = rng.pick(&cands).cloned() else {
                return skip(kind, "no port with a known name");
            };
            let port = view.port_mut(&cmp, idx).expect("candidate");
            let old = port.name.take().expect("candidate has a name");
            done(kind, format!("port {cmp}.{old}: name erased"))
        }
        MutationKind::ErasePortType => {
            let cands = port_candidates(view, |p| p.ty.is_some());
            let Some((cmp, idx)) = rng.pick(&cands).cloned() else {
                return skip(kind, "no port with a known type");
            };
            let port = view.port_mut(&cmp, idx).expect("candidate");
            let old = port.ty.take().expect("candidate has a type");
            let label = port.name.clone().unwrap_or_else(|| "*".to_string());
            done(kind, format!("port {cmp}.{label}: type {old} erased"))
        }
        MutationKind::EraseConnectorEndpointPorts => {
            let cands: Vec<usize> = (0..view.abs_connectors().len())
                .filter(|&i| {
                    let ac = &view.abs_connectors()[i];
                    ac.src_port.is_some() || ac.tgt_port.is_some()
                })
                .collect();
            let Some(i) = rng.pick(&cands).copied() else {
                return skip(kind, "no abstract connector with endpoint ports");
            };
            let ac = view.abs_connector_mut(i).expect("candidate");
            let old = ac.to_string();
            ac.src_port = None;
            ac.tgt_port = None;
            done(kind, format!("connector {old}: endpoint ports erased"))
        }
    }
}
