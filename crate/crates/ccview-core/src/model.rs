//! Core structures for C&C models and views.
//!
//! A model is a complete architecture: a single containment tree of
//! components, each with named, typed, directed ports, plus concrete
//! connectors. A view is partial: a containment *forest*, ports whose name
//! or type may be unknown, and abstract connectors that assert the existence
//! of a connector chain rather than a single connector.
//!
//! Structures are buildable in any (even ill-formed) shape; [`validate_model`]
//! and [`validate_view`] report every violated well-formedness rule. Queries
//! assume a validated structure.

use indexmap::{IndexMap, IndexSet};
use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::{Error, Result};

/// Outgoing edges per port: `(component, port)` to the ports its
/// connectors lead to, each tagged with the connector's index.
pub(crate) type PortSuccessors<'a> = HashMap<(&'a str, &'a str), Vec<((&'a str, &'a str), usize)>>;

/// Port type identifier. Two types are the same type exactly when their
/// names are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeName(String);

impl TypeName {
    pub fn new(name: impl Into<String>) -> Self {
        TypeName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TypeName {
    fn from(s: &str) -> Self {
        TypeName(s.to_string())
    }
}

impl From<String> for TypeName {
    fn from(s: String) -> Self {
        TypeName(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    In,
    Out,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::In => f.write_str("in"),
            Direction::Out => f.write_str("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub direction: Direction,
    pub ty: TypeName,
}

/// One end of a concrete connector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub component: String,
    pub port: String,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.component, self.port)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Connector {
    pub src: Endpoint,
    pub tgt: Endpoint,
}

#[derive(Debug, Clone)]
pub struct Component {
    name: String,
    parent: Option<String>,
    children: Vec<String>,
    ports: Vec<Port>,
}

impl Component {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parent(&self) -> Option<&str> {
        self.parent.as_deref()
    }

    pub fn children(&self) -> &[String] {
        &self.children
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }
}

/// Complete C&C model. Component names are globally unique and double as
/// identifiers in connectors, queries, and witnesses.
#[derive(Debug, Clone)]
pub struct CncModel {
    name: String,
    components: IndexMap<String, Component>,
    connectors: Vec<Connector>,
}

impl CncModel {
    pub fn new(name: impl Into<String>) -> Self {
        CncModel {
            name: name.into(),
            components: IndexMap::new(),
            connectors: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn add_component(&mut self, name: impl Into<String>, parent: Option<&str>) -> Result<()> {
        let name = name.into();
        if self.components.contains_key(&name) {
            return Err(Error::DuplicateComponent(name));
        }
        if let Some(p) = parent {
            let parent_cmp = self
                .components
                .get_mut(p)
                .ok_or_else(|| Error::UnknownComponent(p.to_string()))?;
            parent_cmp.children.push(name.clone());
        }
        self.components.insert(
            name.clone(),
            Component {
                name,
                parent: parent.map(str::to_string),
                children: Vec::new(),
                ports: Vec::new(),
            },
        );
        Ok(())
    }

    /// Reattaches `name` below `parent` (or makes it a root). May create a
    /// containment cycle; validation reports those.
    pub fn set_parent(&mut self, name: &str, parent: Option<&str>) -> Result<()> {
        if !self.components.contains_key(name) {
            return Err(Error::UnknownComponent(name.to_string()));
        }
        if let Some(p) = parent {
            if !self.components.contains_key(p) {
                return Err(Error::UnknownComponent(p.to_string()));
            }
        }
        let old = self.components[name].parent.clone();
        if let Some(old_parent) = old {
            if let Some(c) = self.components.get_mut(&old_parent) {
                c.children.retain(|c| c != name);
            }
        }
        if let Some(p) = parent {
            self.components
                .get_mut(p)
                .unwrap()
                .children
                .push(name.to_string());
        }
        self.components.get_mut(name).unwrap().parent = parent.map(str::to_string);
        Ok(())
    }

    pub fn add_port(
        &mut self,
        component: &str,
        name: impl Into<String>,
        direction: Direction,
        ty: impl Into<TypeName>,
    ) -> Result<()> {
        let cmp = self
            .components
            .get_mut(component)
            .ok_or_else(|| Error::UnknownComponent(component.to_string()))?;
        cmp.ports.push(Port {
            name: name.into(),
            direction,
            ty: ty.into(),
        });
        Ok(())
    }

    /// Records a connector without resolving its endpoints; validation
    /// reports dangling or illegal ones.
    pub fn add_connector(
        &mut self,
        src_cmp: impl Into<String>,
        src_port: impl Into<String>,
        tgt_cmp: impl Into<String>,
        tgt_port: impl Into<String>,
    ) {
        self.connectors.push(Connector {
            src: Endpoint {
                component: src_cmp.into(),
                port: src_port.into(),
            },
            tgt: Endpoint {
                component: tgt_cmp.into(),
                port: tgt_port.into(),
            },
        });
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.components.values()
    }

    pub fn component_names(&self) -> impl Iterator<Item = &str> {
        self.components.keys().map(String::as_str)
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.get(name)
    }

    pub fn has_component(&self, name: &str) -> bool {
        self.components.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn connectors(&self) -> &[Connector] {
        &self.connectors
    }

    pub fn port(&self, component: &str, port: &str) -> Option<&Port> {
        self.components.get(component)?.port(port)
    }

    /// Port types in order of first appearance.
    pub fn types(&self) -> IndexSet<&TypeName> {
        let mut out = IndexSet::new();
        for cmp in self.components.values() {
            for p in &cmp.ports {
                out.insert(&p.ty);
            }
        }
        out
    }

    /// Components without a parent.
    pub fn tops(&self) -> Vec<&str> {
        self.components
            .values()
            .filter(|c| c.parent.is_none())
            .map(|c| c.name.as_str())
            .collect()
    }

    /// The unique top component, if there is exactly one.
    pub fn root(&self) -> Option<&str> {
        let tops = self.tops();
        match tops.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }

    /// True when `ancestor` strictly contains `descendant` (transitively).
    pub fn contains_transitive(&self, ancestor: &str, descendant: &str) -> bool {
        let mut cur = self.components.get(descendant).and_then(|c| c.parent());
        let mut steps = self.components.len();
        while let Some(p) = cur {
            if p == ancestor {
                return true;
            }
            if steps == 0 {
                return false;
            }
            steps -= 1;
            cur = self.components.get(p).and_then(|c| c.parent());
        }
        false
    }

    /// All strict descendants of `component`, in depth-first declaration
    /// order.
    pub fn subs_transitive(&self, component: &str) -> Result<IndexSet<String>> {
        let cmp = self
            .components
            .get(component)
            .ok_or_else(|| Error::UnknownComponent(component.to_string()))?;
        let mut out = IndexSet::new();
        let mut stack: Vec<&str> = cmp.children.iter().rev().map(String::as_str).collect();
        while let Some(c) = stack.pop() {
            if !out.insert(c.to_string()) {
                continue;
            }
            if let Some(cc) = self.components.get(c) {
                stack.extend(cc.children.iter().rev().map(String::as_str));
            }
        }
        Ok(out)
    }

    fn depth(&self, component: &str) -> usize {
        let mut d = 0;
        let mut cur = self.components.get(component).and_then(|c| c.parent());
        let mut steps = self.components.len();
        while let Some(p) = cur {
            d += 1;
            if steps == 0 {
                break;
            }
            steps -= 1;
            cur = self.components.get(p).and_then(|c| c.parent());
        }
        d
    }

    fn lca2<'a>(&'a self, a: &'a str, b: &'a str) -> &'a str {
        let mut a = a;
        let mut b = b;
        let mut da = self.depth(a);
        let mut db = self.depth(b);
        while da > db {
            a = self.components[a].parent().unwrap();
            da -= 1;
        }
        while db > da {
            b = self.components[b].parent().unwrap();
            db -= 1;
        }
        while a != b {
            a = self.components[a].parent().unwrap();
            b = self.components[b].parent().unwrap();
        }
        a
    }

    /// Lowest component whose descendant-or-self set covers all of
    /// `components`. The result may be one of the inputs.
    pub fn least_common_parent<'a, I>(&self, components: I) -> Result<String>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut iter = components.into_iter();
        let first = iter.next().ok_or(Error::EmptyComponentSet)?;
        if !self.components.contains_key(first) {
            return Err(Error::UnknownComponent(first.to_string()));
        }
        let mut acc = first;
        for c in iter {
            if !self.components.contains_key(c) {
                return Err(Error::UnknownComponent(c.to_string()));
            }
            acc = self.lca2(acc, c);
        }
        Ok(acc.to_string())
    }

    /// Every `(component, port)` pair reachable from `start` by a chain of
    /// one or more connectors. Consecutive connectors in a chain share the
    /// exact intermediate port, so chains cross the membranes of composed
    /// components but never pass through an atomic component's behavior.
    ///
    /// With `start_port` given, only chains whose first connector leaves
    /// that port are followed; otherwise every port of `start` seeds the
    /// search. `start` itself appears in the result only if some chain
    /// loops back to it.
    pub fn reachable_from(
        &self,
        start: &str,
        start_port: Option<&str>,
    ) -> Result<IndexSet<(String, String)>> {
        let cmp = self
            .components
            .get(start)
            .ok_or_else(|| Error::UnknownComponent(start.to_string()))?;
        let seeds: Vec<(&str, &str)> = match start_port {
            Some(p) => {
                if cmp.port(p).is_none() {
                    return Err(Error::UnknownPort {
                        component: start.to_string(),
                        port: p.to_string(),
                    });
                }
                vec![(start, p)]
            }
            None => {
                let mut s: Vec<(&str, &str)> =
                    cmp.ports.iter().map(|p| (start, p.name.as_str())).collect();
                s.sort_unstable();
                s
            }
        };
        let adj = self.port_successors(None);
        let mut reached: IndexSet<(String, String)> = IndexSet::new();
        let mut queue: std::collections::VecDeque<(&str, &str)> = seeds.into_iter().collect();
        let mut expanded: HashSet<(&str, &str)> = queue.iter().copied().collect();
        while let Some(at) = queue.pop_front() {
            if let Some(nexts) = adj.get(&at) {
                for &(next, _idx) in nexts {
                    reached.insert((next.0.to_string(), next.1.to_string()));
                    if expanded.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(reached)
    }

    /// Successor map over ports: an entry maps a port to the targets of the
    /// connectors leaving it (with connector indices), sorted for
    /// deterministic traversal. `allowed` restricts to a connector subset.
    pub(crate) fn port_successors(&self, allowed: Option<&HashSet<usize>>) -> PortSuccessors<'_> {
        let mut adj: PortSuccessors<'_> = HashMap::new();
        for (idx, con) in self.connectors.iter().enumerate() {
            if let Some(allowed) = allowed {
                if !allowed.contains(&idx) {
                    continue;
                }
            }
            adj.entry((con.src.component.as_str(), con.src.port.as_str()))
                .or_default()
                .push(((con.tgt.component.as_str(), con.tgt.port.as_str()), idx));
        }
        for nexts in adj.values_mut() {
            nexts.sort_unstable();
        }
        adj
    }

    /// Checks every well-formedness rule and reports each offense.
    pub fn validate(&self) -> Vec<Violation> {
        validate_model(self)
    }
}

/// Order-insensitive structural equality: same name, same components with
/// the same parents and port multisets, and the same connector multiset.
/// Declaration order is presentation, not structure.
impl PartialEq for CncModel {
    fn eq(&self, other: &Self) -> bool {
        if self.name != other.name || self.components.len() != other.components.len() {
            return false;
        }
        for cmp in self.components.values() {
            let Some(o) = other.components.get(&cmp.name) else {
                return false;
            };
            if cmp.parent != o.parent {
                return false;
            }
            if sorted_ports(&cmp.ports) != sorted_ports(&o.ports) {
                return false;
            }
        }
        sorted_connectors(&self.connectors) == sorted_connectors(&other.connectors)
    }
}

impl Eq for CncModel {}

fn sorted_ports(ports: &[Port]) -> Vec<(&str, Direction, &TypeName)> {
    let mut v: Vec<_> = ports
        .iter()
        .map(|p| (p.name.as_str(), p.direction, &p.ty))
        .collect();
    v.sort_unstable();
    v
}

fn sorted_connectors(cons: &[Connector]) -> Vec<(&str, &str, &str, &str)> {
    let mut v: Vec<_> = cons
        .iter()
        .map(|c| {
            (
                c.src.component.as_str(),
                c.src.port.as_str(),
                c.tgt.component.as_str(),
                c.tgt.port.as_str(),
            )
        })
        .collect();
    v.sort_unstable();
    v
}

/// View port; direction is always known, name and type may not be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewPort {
    pub name: Option<String>,
    pub direction: Direction,
    pub ty: Option<TypeName>,
}

impl ViewPort {
    /// `in Boolean userPumpState` / `out * *` style rendering.
    pub fn describe(&self) -> String {
        format!(
            "{} {} {}",
            self.direction,
            self.ty.as_ref().map_or("*", |t| t.as_str()),
            self.name.as_deref().unwrap_or("*"),
        )
    }
}

/// Asserts a connector chain between two view components. Endpoint ports
/// are optional; a named endpoint constrains the chain's end port.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbstractConnector {
    pub src_cmp: String,
    pub src_port: Option<String>,
    pub tgt_cmp: String,
    pub tgt_port: Option<String>,
}

impl fmt::Display for AbstractConnector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.src_port {
            Some(p) => write!(f, "{}.{}", self.src_cmp, p)?,
            None => f.write_str(&self.src_cmp)?,
        }
        f.write_str(" -> ")?;
        match &self.tgt_port {
            Some(p) => write!(f, "{}.{}", self.tgt_cmp, p),
            None => f.write_str(&self.tgt_cmp),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ViewComponent {
    name: String,
    parent: Option<String>,
    children: Vec<String>,
    ports: Vec<ViewPort>,
}

impl ViewComponent {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parent(&self) -> Option<&str> {
        self.parent.as_deref()
    }

    pub fn children(&self) -> &[String] {
        &self.children
    }

    pub fn ports(&self) -> &[ViewPort] {
        &self.ports
    }
}

/// Partial architectural view: a component forest, partially specified
/// ports, and abstract connectors.
#[derive(Debug, Clone)]
pub struct CncView {
    name: String,
    components: IndexMap<String, ViewComponent>,
    abs_connectors: Vec<AbstractConnector>,
}

impl CncView {
    pub fn new(name: impl Into<String>) -> Self {
        CncView {
            name: name.into(),
            components: IndexMap::new(),
            abs_connectors: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn add_component(&mut self, name: impl Into<String>, parent: Option<&str>) -> Result<()> {
        let name = name.into();
        if self.components.contains_key(&name) {
            return Err(Error::DuplicateComponent(name));
        }
        if let Some(p) = parent {
            let parent_cmp = self
                .components
                .get_mut(p)
                .ok_or_else(|| Error::UnknownComponent(p.to_string()))?;
            parent_cmp.children.push(name.clone());
        }
        self.components.insert(
            name.clone(),
            ViewComponent {
                name,
                parent: parent.map(str::to_string),
                children: Vec::new(),
                ports: Vec::new(),
            },
        );
        Ok(())
    }

    pub fn set_parent(&mut self, name: &str, parent: Option<&str>) -> Result<()> {
        if !self.components.contains_key(name) {
            return Err(Error::UnknownComponent(name.to_string()));
        }
        if let Some(p) = parent {
            if !self.components.contains_key(p) {
                return Err(Error::UnknownComponent(p.to_string()));
            }
        }
        let old = self.components[name].parent.clone();
        if let Some(old_parent) = old {
            if let Some(c) = self.components.get_mut(&old_parent) {
                c.children.retain(|c| c != name);
            }
        }
        if let Some(p) = parent {
            self.components
                .get_mut(p)
                .unwrap()
                .children
                .push(name.to_string());
        }
        self.components.get_mut(name).unwrap().parent = parent.map(str::to_string);
        Ok(())
    }

    pub fn add_port(&mut self, component: &str, port: ViewPort) -> Result<()> {
        let cmp = self
            .components
            .get_mut(component)
            .ok_or_else(|| Error::UnknownComponent(component.to_string()))?;
        cmp.ports.push(port);
        Ok(())
    }

    pub fn add_abs_connector(&mut self, con: AbstractConnector) {
        self.abs_connectors.push(con);
    }

    pub fn components(&self) -> impl Iterator<Item = &ViewComponent> {
        self.components.values()
    }

    pub fn component_names(&self) -> impl Iterator<Item = &str> {
        self.components.keys().map(String::as_str)
    }

    pub fn component(&self, name: &str) -> Option<&ViewComponent> {
        self.components.get(name)
    }

    pub fn has_component(&self, name: &str) -> bool {
        self.components.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn abs_connectors(&self) -> &[AbstractConnector] {
        &self.abs_connectors
    }

    pub fn tops(&self) -> Vec<&str> {
        self.components
            .values()
            .filter(|c| c.parent.is_none())
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Known port types in order of first appearance.
    pub fn types(&self) -> IndexSet<&TypeName> {
        let mut out = IndexSet::new();
        for cmp in self.components.values() {
            for p in &cmp.ports {
                if let Some(t) = &p.ty {
                    out.insert(t);
                }
            }
        }
        out
    }

    /// True when `ancestor` strictly contains `descendant` in the view
    /// forest (transitively).
    pub fn contains_transitive(&self, ancestor: &str, descendant: &str) -> bool {
        let mut cur = self.components.get(descendant).and_then(|c| c.parent());
        let mut steps = self.components.len();
        while let Some(p) = cur {
            if p == ancestor {
                return true;
            }
            if steps == 0 {
                return false;
            }
            steps -= 1;
            cur = self.components.get(p).and_then(|c| c.parent());
        }
        false
    }

    /// The known type the view declares for port `port_name` on `component`,
    /// if any. Used to constrain abstract connector endpoints.
    pub fn declared_port_type(&self, component: &str, port_name: &str) -> Option<&TypeName> {
        self.components
            .get(component)?
            .ports
            .iter()
            .find(|p| p.name.as_deref() == Some(port_name))
            .and_then(|p| p.ty.as_ref())
    }

    /// Renames a component, rewriting containment references and abstract
    /// connector endpoints so the structure is preserved.
    pub fn rename_component(&mut self, old: &str, new: impl Into<String>) -> Result<()> {
        let new = new.into();
        if !self.components.contains_key(old) {
            return Err(Error::UnknownComponent(old.to_string()));
        }
        if new != old && self.components.contains_key(&new) {
            return Err(Error::DuplicateComponent(new));
        }
        let mut rebuilt = IndexMap::with_capacity(self.components.len());
        for (key, mut cmp) in std::mem::take(&mut self.components) {
            if cmp.name == old {
                cmp.name = new.clone();
            }
            if cmp.parent.as_deref() == Some(old) {
                cmp.parent = Some(new.clone());
            }
            for child in &mut cmp.children {
                if child == old {
                    *child = new.clone();
                }
            }
            let key = if key == old { new.clone() } else { key };
            rebuilt.insert(key, cmp);
        }
        self.components = rebuilt;
        for con in &mut self.abs_connectors {
            if con.src_cmp == old {
                con.src_cmp = new.clone();
            }
            if con.tgt_cmp == old {
                con.tgt_cmp = new.clone();
            }
        }
        Ok(())
    }

    /// Removes a component together with its ports and incident abstract
    /// connectors. Children are reattached to the removed component's
    /// parent, preserving their relative order.
    pub fn remove_component(&mut self, name: &str) -> Result<()> {
        let cmp = self
            .components
            .shift_remove(name)
            .ok_or_else(|| Error::UnknownComponent(name.to_string()))?;
        let parent = cmp.parent.clone();
        if let Some(p) = &parent {
            if let Some(pc) = self.components.get_mut(p) {
                let pos = pc.children.iter().position(|c| c == name);
                pc.children.retain(|c| c != name);
                if let Some(pos) = pos {
                    for (off, child) in cmp.children.iter().enumerate() {
                        pc.children.insert(pos + off, child.clone());
                    }
                } else {
                    pc.children.extend(cmp.children.iter().cloned());
                }
            }
        }
        for child in &cmp.children {
            if let Some(cc) = self.components.get_mut(child) {
                cc.parent = parent.clone();
            }
        }
        self.abs_connectors
            .retain(|c| c.src_cmp != name && c.tgt_cmp != name);
        Ok(())
    }

    pub fn remove_port(&mut self, component: &str, index: usize) -> Result<()> {
        let cmp = self
            .components
            .get_mut(component)
            .ok_or_else(|| Error::UnknownComponent(component.to_string()))?;
        if index >= cmp.ports.len() {
            return Err(Error::UnknownPort {
                component: component.to_string(),
                port: format!("#{index}"),
            });
        }
        cmp.ports.remove(index);
        Ok(())
    }

    pub fn remove_abs_connector(&mut self, index: usize) {
        if index < self.abs_connectors.len() {
            self.abs_connectors.remove(index);
        }
    }

    pub fn port_mut(&mut self, component: &str, index: usize) -> Option<&mut ViewPort> {
        self.components.get_mut(component)?.ports.get_mut(index)
    }

    pub fn abs_connector_mut(&mut self, index: usize) -> Option<&mut AbstractConnector> {
        self.abs_connectors.get_mut(index)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_view(self)
    }
}

/// Order-insensitive structural equality, mirroring [`CncModel`]'s.
impl PartialEq for CncView {
    fn eq(&self, other: &Self) -> bool {
        if self.name != other.name || self.components.len() != other.components.len() {
            return false;
        }
        for cmp in self.components.values() {
            let Some(o) = other.components.get(&cmp.name) else {
                return false;
            };
            if cmp.parent != o.parent {
                return false;
            }
            let mut a: Vec<_> = cmp
                .ports
                .iter()
                .map(|p| (&p.name, p.direction, &p.ty))
                .collect();
            let mut b: Vec<_> = o
                .ports
                .iter()
                .map(|p| (&p.name, p.direction, &p.ty))
                .collect();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
        }
        let mut a: Vec<_> = self.abs_connectors.iter().collect();
        let mut b: Vec<_> = other.abs_connectors.iter().collect();
        let key = |c: &&AbstractConnector| {
            (
                c.src_cmp.clone(),
                c.src_port.clone(),
                c.tgt_cmp.clone(),
                c.tgt_port.clone(),
            )
        };
        a.sort_by_key(key);
        b.sort_by_key(key);
        a == b
    }
}

impl Eq for CncView {}

/// Identifies the element a violation or annotation is about.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ElementRef {
    Document,
    Component(String),
    Port { component: String, port: String },
    ViewPort { component: String, index: usize },
    Connector(usize),
    AbsConnector(usize),
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementRef::Document => f.write_str("document"),
            ElementRef::Component(c) => write!(f, "component {c}"),
            ElementRef::Port { component, port } => write!(f, "port {component}.{port}"),
            ElementRef::ViewPort { component, index } => {
                write!(f, "port #{index} of component {component}")
            }
            ElementRef::Connector(i) => write!(f, "connector #{i}"),
            ElementRef::AbsConnector(i) => write!(f, "connector #{i}"),
        }
    }
}

/// One violated well-formedness rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub element: ElementRef,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

fn violation(element: ElementRef, message: impl Into<String>) -> Violation {
    Violation {
        element,
        message: message.into(),
    }
}

/// Reports every violated model rule: exactly one top component, acyclic
/// containment, port names unique per component, connector endpoints that
/// exist and share a type, legal connector orientation (siblings out-to-in,
/// parent-to-child in-to-in, child-to-parent out-to-out), and at most one
/// incoming connector per port.
pub fn validate_model(m: &CncModel) -> Vec<Violation> {
    let mut out = Vec::new();
    if !m.components.is_empty() {
        let tops = m.tops();
        if tops.len() != 1 {
            out.push(violation(
                ElementRef::Document,
                format!("exactly one top component required, found {}", tops.len()),
            ));
        }
    }
    out.extend(containment_cycles(
        m.components.values().map(|c| (c.name.as_str(), c.parent())),
    ));
    for cmp in m.components.values() {
        out.extend(duplicate_port_names(
            &cmp.name,
            cmp.ports.iter().map(|p| Some(p.name.as_str())),
        ));
    }
    let mut incoming: HashMap<&Endpoint, usize> = HashMap::new();
    for (idx, con) in m.connectors.iter().enumerate() {
        let eref = ElementRef::Connector(idx);
        let (Some(src_cmp), Some(tgt_cmp)) = (
            m.component(&con.src.component),
            m.component(&con.tgt.component),
        ) else {
            let missing = if m.component(&con.src.component).is_none() {
                &con.src.component
            } else {
                &con.tgt.component
            };
            out.push(violation(eref, format!("no such component: {missing}")));
            continue;
        };
        let (Some(src_port), Some(tgt_port)) =
            (src_cmp.port(&con.src.port), tgt_cmp.port(&con.tgt.port))
        else {
            let missing = if src_cmp.port(&con.src.port).is_none() {
                &con.src
            } else {
                &con.tgt
            };
            out.push(violation(eref.clone(), format!("no such port: {missing}")));
            continue;
        };
        if src_port.ty != tgt_port.ty {
            out.push(violation(
                eref.clone(),
                format!(
                    "connector endpoint types differ: {} is {}, {} is {}",
                    con.src, src_port.ty, con.tgt, tgt_port.ty
                ),
            ));
        }
        let legal = if src_cmp.name != tgt_cmp.name && src_cmp.parent == tgt_cmp.parent {
            // Siblings: data flows out of one and into the other.
            (src_port.direction, tgt_port.direction) == (Direction::Out, Direction::In)
        } else if tgt_cmp.parent() == Some(&src_cmp.name) {
            // Parent forwards an input to an immediate child.
            (src_port.direction, tgt_port.direction) == (Direction::In, Direction::In)
        } else if src_cmp.parent() == Some(&tgt_cmp.name) {
            // Child forwards an output to its parent.
            (src_port.direction, tgt_port.direction) == (Direction::Out, Direction::Out)
        } else {
            out.push(violation(
                eref.clone(),
                format!(
                    "connector {} -> {} must connect siblings or a parent and an immediate child",
                    con.src, con.tgt
                ),
            ));
            continue;
        };
        if !legal {
            out.push(violation(
                eref,
                format!(
                    "connector {} -> {} has illegal port directions ({} -> {})",
                    con.src, con.tgt, src_port.direction, tgt_port.direction
                ),
            ));
        }
        *incoming.entry(&con.tgt).or_insert(0) += 1;
    }
    let mut over: Vec<&Endpoint> = incoming
        .iter()
        .filter(|(_, n)| **n > 1)
        .map(|(ep, _)| *ep)
        .collect();
    over.sort_unstable_by_key(|ep| (&ep.component, &ep.port));
    for ep in over {
        out.push(violation(
            ElementRef::Port {
                component: ep.component.clone(),
                port: ep.port.clone(),
            },
            format!(
                "at most one incoming connector allowed, port {ep} has {}",
                incoming[ep]
            ),
        ));
    }
    out
}

/// Reports every violated view rule: acyclic containment (a forest is
/// allowed), known port names unique per component, and abstract connector
/// endpoints that are components of the view.
pub fn validate_view(v: &CncView) -> Vec<Violation> {
    let mut out = Vec::new();
    out.extend(containment_cycles(
        v.components.values().map(|c| (c.name.as_str(), c.parent())),
    ));
    for cmp in v.components.values() {
        out.extend(duplicate_port_names(
            &cmp.name,
            cmp.ports.iter().map(|p| p.name.as_deref()),
        ));
    }
    for (idx, con) in v.abs_connectors.iter().enumerate() {
        for end in [&con.src_cmp, &con.tgt_cmp] {
            if !v.components.contains_key(end) {
                out.push(violation(
                    ElementRef::AbsConnector(idx),
                    format!("no such component: {end}"),
                ));
            }
        }
    }
    out
}

fn containment_cycles<'a, I>(nodes: I) -> Vec<Violation>
where
    I: IntoIterator<Item = (&'a str, Option<&'a str>)>,
{
    let parents: HashMap<&str, Option<&str>> = nodes.into_iter().collect();
    let mut cyclic: IndexSet<&str> = IndexSet::new();
    for &start in parents.keys() {
        let mut cur = start;
        let mut steps = parents.len();
        loop {
            match parents.get(cur).copied().flatten() {
                None => break,
                Some(p) => {
                    if steps == 0 {
                        cyclic.insert(start);
                        break;
                    }
                    steps -= 1;
                    cur = p;
                }
            }
        }
    }
    let mut out: Vec<&str> = cyclic.into_iter().collect();
    out.sort_unstable();
    out.into_iter()
        .map(|c| {
            violation(
                ElementRef::Component(c.to_string()),
                "containment cycle".to_string(),
            )
        })
        .collect()
}

fn duplicate_port_names<'a, I>(component: &str, names: I) -> Vec<Violation>
where
    I: IntoIterator<Item = Option<&'a str>>,
{
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for name in names.into_iter().flatten() {
        if !seen.insert(name) {
            out.push(violation(
                ElementRef::Port {
                    component: component.to_string(),
                    port: name.to_string(),
                },
                format!("duplicate port name {name} on component {component}"),
            ));
        }
    }
    out
}
