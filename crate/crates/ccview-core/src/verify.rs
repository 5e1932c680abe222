//! Decides whether a C&C model satisfies a view.
//!
//! Satisfaction requires, clause by clause: every view component exists in
//! the model; any two view components are related by containment in the
//! view (transitively) exactly when they are related in the model; every
//! view port has a matching model port on its component; and every abstract
//! connector is realized by a chain of connectors in the model. The checks
//! are independent and each produces one reason per offending element, in
//! view declaration order, so a verdict lists every defect rather than the
//! first one found.
//!
//! Checks after the missing-component check silently skip view components
//! that do not exist in the model; their absence is already reported and
//! nothing else meaningful can be said about them.

use indexmap::IndexMap;
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::model::{AbstractConnector, CncModel, CncView, Direction, Port, TypeName, ViewPort};
use crate::witness::{self, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HierarchyMismatchKind {
    /// Independent in the view, related in the model.
    ContainedInModelOnly,
    /// Related in the view, independent in the model.
    IndependentInModelOnly,
    /// Contained in both, in opposite directions.
    ReverseContainment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterfaceFailure {
    NoMatchingPort,
    TypeMismatch { found: TypeName },
    DirectionMismatch { found: Direction },
}

/// One independent reason why a model does not satisfy a view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonSatReason {
    MissingComponent {
        cmp: String,
    },
    HierarchyMismatch {
        kind: HierarchyMismatchKind,
        /// The containing side as the view sees it, or the model-side
        /// container when the pair is independent in the view.
        cmp: String,
        sub_cmp: String,
    },
    InterfaceMismatch {
        cmp: String,
        view_port: ViewPort,
        failure: InterfaceFailure,
    },
    MissingConnection {
        con: AbstractConnector,
    },
}

/// Verdict plus per-reason witnesses. `satisfied` holds exactly when
/// `reasons` is empty; a satisfied result carries one satisfaction witness,
/// an unsatisfied one carries one witness per reason, in reason order.
#[derive(Debug, Clone)]
pub struct VerificationResult {
    pub model_name: String,
    pub view_name: String,
    pub satisfied: bool,
    pub reasons: Vec<NonSatReason>,
    pub witnesses: Vec<Witness>,
}

/// True when the model port satisfies everything the view port specifies.
/// Unknown name or type matches any port; direction always has to agree.
pub(crate) fn view_port_matches(vp: &ViewPort, p: &Port) -> bool {
    vp.direction == p.direction
        && vp.name.as_deref().is_none_or(|n| n == p.name)
        && vp.ty.as_ref().is_none_or(|t| *t == p.ty)
}

/// View components that do not exist in the model, in declaration order.
pub fn check_missing_components(m: &CncModel, v: &CncView) -> Vec<NonSatReason> {
    v.component_names()
        .filter(|c| !m.has_component(c))
        .map(|c| NonSatReason::MissingComponent { cmp: c.to_string() })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Relation {
    FirstContainsSecond,
    SecondContainsFirst,
    Independent,
}

/// Compares containment between every pair of view components (transitively
/// on both sides) against the model and reports each disagreeing pair once.
pub fn check_hierarchy(m: &CncModel, v: &CncView) -> Vec<NonSatReason> {
    let present: Vec<&str> = v.component_names().filter(|c| m.has_component(c)).collect();
    let relation = |a: &str, b: &str, contains: &dyn Fn(&str, &str) -> bool| {
        if contains(a, b) {
            Relation::FirstContainsSecond
        } else if contains(b, a) {
            Relation::SecondContainsFirst
        } else {
            Relation::Independent
        }
    };
    let mut out = Vec::new();
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            let in_view = relation(a, b, &|x, y| v.contains_transitive(x, y));
            let in_model = relation(a, b, &|x, y| m.contains_transitive(x, y));
            if in_view == in_model {
                continue;
            }
            let reason = match (in_view, in_model) {
                (Relation::FirstContainsSecond, Relation::Independent) => {
                    (HierarchyMismatchKind::IndependentInModelOnly, a, b)
                }
                (Relation::SecondContainsFirst, Relation::Independent) => {
                    (HierarchyMismatchKind::IndependentInModelOnly, b, a)
                }
                (Relation::FirstContainsSecond, Relation::SecondContainsFirst) => {
                    (HierarchyMismatchKind::ReverseContainment, a, b)
                }
                (Relation::SecondContainsFirst, Relation::FirstContainsSecond) => {
                    (HierarchyMismatchKind::ReverseContainment, b, a)
                }
                (Relation::Independent, Relation::FirstContainsSecond) => {
                    (HierarchyMismatchKind::ContainedInModelOnly, a, b)
                }
                (Relation::Independent, Relation::SecondContainsFirst) => {
                    (HierarchyMismatchKind::ContainedInModelOnly, b, a)
                }
                _ => unreachable!("equal relations are skipped"),
            };
            out.push(NonSatReason::HierarchyMismatch {
                kind: reason.0,
                cmp: reason.1.to_string(),
                sub_cmp: reason.2.to_string(),
            });
        }
    }
    out
}

/// Matches every view port against the interface of its component and
/// classifies each failure. A known port name that exists with the right
/// direction but the wrong type is a type mismatch; a known name with the
/// wrong direction is a direction mismatch; everything else has no matching
/// port at all.
pub fn check_interfaces(m: &CncModel, v: &CncView) -> Vec<NonSatReason> {
    let mut out = Vec::new();
    for vc in v.components() {
        let Some(mc) = m.component(vc.name()) else {
            continue;
        };
        for vp in vc.ports() {
            if mc.ports().iter().any(|p| view_port_matches(vp, p)) {
                continue;
            }
            let failure = match vp.name.as_deref().and_then(|n| mc.port(n)) {
                Some(p) if p.direction == vp.direction => InterfaceFailure::TypeMismatch {
                    found: p.ty.clone(),
                },
                Some(p) => InterfaceFailure::DirectionMismatch { found: p.direction },
                None => InterfaceFailure::NoMatchingPort,
            };
            out.push(NonSatReason::InterfaceMismatch {
                cmp: vc.name().to_string(),
                view_port: vp.clone(),
                failure,
            });
        }
    }
    out
}

/// Searches a connector chain for every abstract connector whose endpoints
/// exist in the model and reports the ones that cannot be realized.
pub fn check_connections(m: &CncModel, v: &CncView) -> Vec<NonSatReason> {
    v.abs_connectors()
        .iter()
        .filter(|ac| m.has_component(&ac.src_cmp) && m.has_component(&ac.tgt_cmp))
        .filter(|ac| find_chain(m, v, ac, None).is_none())
        .map(|ac| NonSatReason::MissingConnection { con: ac.clone() })
        .collect()
}

/// Shortest connector chain realizing `ac`, as connector indices into the
/// model, or None. Chains link on shared ports. A named endpoint port pins
/// the chain's first or last port; if the view also declares that port with
/// a known type, the model port must carry that type. `allowed` restricts
/// the search to a connector subset (used when reusing witness fragments).
///
/// Breadth-first over ports seeded in name order with sorted successor
/// lists, so the result is the same shortest chain on every run.
pub(crate) fn find_chain(
    m: &CncModel,
    v: &CncView,
    ac: &AbstractConnector,
    allowed: Option<&HashSet<usize>>,
) -> Option<Vec<usize>> {
    let src = m.component(&ac.src_cmp)?;
    let seeds: Vec<(&str, &str)> = match ac.src_port.as_deref() {
        Some(name) => {
            let p = src.port(name)?;
            if let Some(want) = v.declared_port_type(&ac.src_cmp, name) {
                if *want != p.ty {
                    return None;
                }
            }
            vec![(src.name(), name)]
        }
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
    let hits_target = |cmp: &str, port: &str| -> bool {
        if cmp != ac.tgt_cmp {
            return false;
        }
        if let Some(want) = ac.tgt_port.as_deref() {
            if want != port {
                return false;
            }
            if let Some(want_ty) = v.declared_port_type(&ac.tgt_cmp, want) {
                // Reached ports always resolve; connectors were validated.
                if m.port(cmp, port).is_none_or(|p| p.ty != *want_ty) {
                    return false;
                }
            }
        }
        true
    };
    // Breadth-first predecessor map: seeds carry None, every other visited
    // port remembers the port and connector it was reached through.
    type CameFrom<'a> = IndexMap<(&'a str, &'a str), Option<((&'a str, &'a str), usize)>>;
    let adj = m.port_successors(allowed);
    let mut queue: VecDeque<(&str, &str)> = seeds.iter().copied().collect();
    let mut came_from: CameFrom<'_> = seeds.iter().map(|&s| (s, None)).collect();
    while let Some(at) = queue.pop_front() {
        let Some(nexts) = adj.get(&at) else {
            continue;
        };
        for &(next, idx) in nexts {
            if came_from.contains_key(&next) {
                continue;
            }
            came_from.insert(next, Some((at, idx)));
            if hits_target(next.0, next.1) {
                let mut chain = Vec::new();
                let mut cur = next;
                while let Some(&Some((prev, via))) = came_from.get(&cur) {
                    chain.push(via);
                    cur = prev;
                }
                chain.reverse();
                return Some(chain);
            }
            queue.push_back(next);
        }
    }
    None
}

/// Satisfaction verdict alone, without witness construction.
pub fn satisfies(m: &CncModel, v: &CncView) -> bool {
    check_missing_components(m, v).is_empty()
        && check_hierarchy(m, v).is_empty()
        && check_interfaces(m, v).is_empty()
        && check_connections(m, v).is_empty()
}

/// Runs all four checks in a fixed order (missing components, hierarchy,
/// interfaces, connections) and builds one witness per reason, or a single
/// satisfaction witness. Deterministic: same inputs, same result.
pub fn verify(m: &CncModel, v: &CncView) -> VerificationResult {
    let mut reasons = check_missing_components(m, v);
    reasons.extend(check_hierarchy(m, v));
    reasons.extend(check_interfaces(m, v));
    reasons.extend(check_connections(m, v));
    let witnesses = if reasons.is_empty() {
        vec![witness::build_satisfaction_witness(m, v)
            .expect("all checks passed, satisfaction witness must build")]
    } else {
        reasons
            .iter()
            .map(|r| witness::build_for_reason(m, v, r))
            .collect()
    };
    VerificationResult {
        model_name: m.name().to_string(),
        view_name: v.name().to_string(),
        satisfied: reasons.is_empty(),
        reasons,
        witnesses,
    }
}

/// How one view participates in a specification.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Passes iff the model satisfies the view.
    Mandatory,
    /// Passes iff the model does not satisfy the view.
    Negative,
    /// The named group passes iff at least one of its views is satisfied.
    Alternative(String),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Mandatory => f.write_str("mandatory"),
            Mode::Negative => f.write_str("negative"),
            Mode::Alternative(g) => write!(f, "alt:{g}"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mandatory" => Ok(Mode::Mandatory),
            "negative" => Ok(Mode::Negative),
            _ => match s.strip_prefix("alt:") {
                Some(g) if !g.is_empty() => Ok(Mode::Alternative(g.to_string())),
                _ => Err(format!(
                    "unknown mode `{s}` (expected mandatory, negative, or alt:<group>)"
                )),
            },
        }
    }
}

/// A set of views with modes, verified together against one model.
#[derive(Debug, Clone, Default)]
pub struct Specification {
    pub entries: Vec<(CncView, Mode)>,
}

#[derive(Debug, Clone)]
pub struct SpecEntryResult {
    pub view_name: String,
    pub mode: Mode,
    pub satisfied: bool,
    /// For alternative entries this is the verdict of the whole group.
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SpecificationResult {
    pub entries: Vec<SpecEntryResult>,
    /// Full results, one per distinct view name, in first-appearance order.
    pub results: Vec<VerificationResult>,
    /// Alternative group verdicts in first-appearance order.
    pub groups: Vec<(String, bool)>,
    pub pass: bool,
}

/// Verifies each distinct view once (distinct by view name) and folds the
/// verdicts through the entry modes.
pub fn verify_specification(m: &CncModel, spec: &Specification) -> SpecificationResult {
    let mut results: IndexMap<String, VerificationResult> = IndexMap::new();
    for (view, _) in &spec.entries {
        if !results.contains_key(view.name()) {
            results.insert(view.name().to_string(), verify(m, view));
        }
    }
    let mut groups: IndexMap<String, bool> = IndexMap::new();
    for (view, mode) in &spec.entries {
        if let Mode::Alternative(g) = mode {
            let sat = results[view.name()].satisfied;
            let slot = groups.entry(g.clone()).or_insert(false);
            *slot = *slot || sat;
        }
    }
    let entries: Vec<SpecEntryResult> = spec
        .entries
        .iter()
        .map(|(view, mode)| {
            let satisfied = results[view.name()].satisfied;
            let pass = match mode {
                Mode::Mandatory => satisfied,
                Mode::Negative => !satisfied,
                Mode::Alternative(g) => groups[g],
            };
            SpecEntryResult {
                view_name: view.name().to_string(),
                mode: mode.clone(),
                satisfied,
                pass,
            }
        })
        .collect();
    let pass = entries.iter().all(|e| e.pass);
    SpecificationResult {
        entries,
        results: results.into_values().collect(),
        groups: groups.into_iter().collect(),
        pass,
    }
}
