//! Interface adapter graph data model.
//!
//! Interfaces are nodes, adapters are directed edges carrying a method
//! dependency matrix. The raw, unchecked form ([`GraphDef`]) is what
//! documents deserialize into; [`AdapterGraph`] is the validated, indexed
//! form every algorithm works on.
//!
//! An [`AdapterGraph`] is canonical: interfaces and adapters are sorted by
//! name, methods keep their declared order, provision rows follow the
//! target's method order and requirement lists follow the source's method
//! order. Every identifier ([`IfaceId`], [`MethodId`], [`AdapterId`]) is
//! therefore a rank in canonical order, and sorting by id is sorting by
//! name.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named interface with an ordered list of methods.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceDef {
    pub name: String,
    pub methods: Vec<String>,
}

impl InterfaceDef {
    pub fn new<S: Into<String>>(name: impl Into<String>, methods: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            methods: methods.into_iter().map(Into::into).collect(),
        }
    }
}

/// One row of a method dependency matrix: target `method` can be
/// implemented only if every method in `requires` is available at the
/// adapter's source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provision {
    pub method: String,
    pub requires: Vec<String>,
}

/// A named adapter from `source` to `target`.
///
/// Target methods without a provision row are never implementable through
/// this adapter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterDef {
    pub name: String,
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub provides: Vec<Provision>,
}

impl AdapterDef {
    pub fn new(name: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            source: source.into(),
            target: target.into(),
            provides: Vec::new(),
        }
    }

    /// Builder-style helper adding one provision row.
    pub fn provide<S: Into<String>>(
        mut self,
        method: impl Into<String>,
        requires: impl IntoIterator<Item = S>,
    ) -> Self {
        self.provides.push(Provision {
            method: method.into(),
            requires: requires.into_iter().map(Into::into).collect(),
        });
        self
    }

    /// Whether target method `j` depends on source method `i`.
    pub fn depends(&self, j: &str, i: &str) -> bool {
        self.provides
            .iter()
            .any(|p| p.method == j && p.requires.iter().any(|r| r == i))
    }
}

/// Unchecked graph definition, as read from a document.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDef {
    pub interfaces: Vec<InterfaceDef>,
    #[serde(default)]
    pub adapters: Vec<AdapterDef>,
}

/// A fully qualified method name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodRef {
    pub interface: String,
    pub method: String,
}

impl MethodRef {
    pub fn new(interface: impl Into<String>, method: impl Into<String>) -> Self {
        Self {
            interface: interface.into(),
            method: method.into(),
        }
    }
}

impl fmt::Display for MethodRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.interface, self.method)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    #[serde(rename = "EMPTY_NAME")]
    EmptyName,
    #[serde(rename = "DUP_INTERFACE")]
    DupInterface,
    #[serde(rename = "EMPTY_INTERFACE")]
    EmptyInterface,
    #[serde(rename = "DUP_METHOD")]
    DupMethod,
    #[serde(rename = "DUP_ADAPTER")]
    DupAdapter,
    #[serde(rename = "UNKNOWN_INTERFACE")]
    UnknownInterface,
    #[serde(rename = "SELF_LOOP")]
    SelfLoop,
    #[serde(rename = "UNKNOWN_METHOD")]
    UnknownMethod,
    #[serde(rename = "DUP_PROVISION")]
    DupProvision,
    #[serde(rename = "EMPTY_REQUIREMENT")]
    EmptyRequirement,
    #[serde(rename = "DUP_REQUIREMENT")]
    DupRequirement,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyName => "EMPTY_NAME",
            ViolationCode::DupInterface => "DUP_INTERFACE",
            ViolationCode::EmptyInterface => "EMPTY_INTERFACE",
            ViolationCode::DupMethod => "DUP_METHOD",
            ViolationCode::DupAdapter => "DUP_ADAPTER",
            ViolationCode::UnknownInterface => "UNKNOWN_INTERFACE",
            ViolationCode::SelfLoop => "SELF_LOOP",
            ViolationCode::UnknownMethod => "UNKNOWN_METHOD",
            ViolationCode::DupProvision => "DUP_PROVISION",
            ViolationCode::EmptyRequirement => "EMPTY_REQUIREMENT",
            ViolationCode::DupRequirement => "DUP_REQUIREMENT",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single invariant violation. `path` locates the offending element in the
/// document, e.g. `adapters[0].provides[1].requires[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path, self.message)
    }
}

/// Checks every model invariant of `def`. An empty list means the
/// definition can be turned into an [`AdapterGraph`].
pub fn validate_graph(def: &GraphDef) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, path: String, message: String| out.push(Violation { code, path, message });

    let mut ifaces: HashMap<&str, HashSet<&str>> = HashMap::new();
    for (k, iface) in def.interfaces.iter().enumerate() {
        let path = format!("interfaces[{k}]");
        if iface.name.is_empty() {
            push(
                ViolationCode::EmptyName,
                format!("{path}.name"),
                "interface name is empty".into(),
            );
        }
        if iface.methods.is_empty() {
            push(
                ViolationCode::EmptyInterface,
                format!("{path}.methods"),
                format!("interface '{}' declares no methods", iface.name),
            );
        }
        let mut seen = HashSet::new();
        for (q, m) in iface.methods.iter().enumerate() {
            if m.is_empty() {
                push(
                    ViolationCode::EmptyName,
                    format!("{path}.methods[{q}]"),
                    "method name is empty".into(),
                );
            }
            if !seen.insert(m.as_str()) {
                push(
                    ViolationCode::DupMethod,
                    format!("{path}.methods[{q}]"),
                    format!("method '{m}' declared twice in '{}'", iface.name),
                );
            }
        }
        if ifaces.contains_key(iface.name.as_str()) {
            push(
                ViolationCode::DupInterface,
                format!("{path}.name"),
                format!("interface '{}' declared twice", iface.name),
            );
        } else {
            ifaces.insert(&iface.name, seen);
        }
    }

    let mut adapter_names = HashSet::new();
    for (k, a) in def.adapters.iter().enumerate() {
        let path = format!("adapters[{k}]");
        if a.name.is_empty() {
            push(
                ViolationCode::EmptyName,
                format!("{path}.name"),
                "adapter name is empty".into(),
            );
        }
        if !adapter_names.insert(a.name.as_str()) {
            push(
                ViolationCode::DupAdapter,
                format!("{path}.name"),
                format!("adapter '{}' declared twice", a.name),
            );
        }
        let source = ifaces.get(a.source.as_str());
        let target = ifaces.get(a.target.as_str());
        if source.is_none() {
            push(
                ViolationCode::UnknownInterface,
                format!("{path}.source"),
                format!("adapter '{}' has unknown source '{}'", a.name, a.source),
            );
        }
        if target.is_none() {
            push(
                ViolationCode::UnknownInterface,
                format!("{path}.target"),
                format!("adapter '{}' has unknown target '{}'", a.name, a.target),
            );
        }
        if a.source == a.target {
            push(
                ViolationCode::SelfLoop,
                path.to_string(),
                format!("adapter '{}' adapts '{}' to itself", a.name, a.source),
            );
        }
        let mut provided = HashSet::new();
        for (q, p) in a.provides.iter().enumerate() {
            let ppath = format!("{path}.provides[{q}]");
            if let Some(t) = target {
                if !t.contains(p.method.as_str()) {
                    push(
                        ViolationCode::UnknownMethod,
                        format!("{ppath}.method"),
                        format!("'{}' is not a method of target '{}'", p.method, a.target),
                    );
                }
            }
            if !provided.insert(p.method.as_str()) {
                push(
                    ViolationCode::DupProvision,
                    format!("{ppath}.method"),
                    format!("adapter '{}' provides '{}' twice", a.name, p.method),
                );
            }
            if p.requires.is_empty() {
                push(
                    ViolationCode::EmptyRequirement,
                    format!("{ppath}.requires"),
                    format!("adapter '{}' provides '{}' with no requirements", a.name, p.method),
                );
            }
            let mut reqs = HashSet::new();
            for (r, req) in p.requires.iter().enumerate() {
                if let Some(s) = source {
                    if !s.contains(req.as_str()) {
                        push(
                            ViolationCode::UnknownMethod,
                            format!("{ppath}.requires[{r}]"),
                            format!("'{req}' is not a method of source '{}'", a.source),
                        );
                    }
                }
                if !reqs.insert(req.as_str()) {
                    push(
                        ViolationCode::DupRequirement,
                        format!("{ppath}.requires[{r}]"),
                        format!("'{req}' listed twice for '{}'", p.method),
                    );
                }
            }
        }
    }
    out
}

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// Rank of an interface in canonical (name) order.
    IfaceId
);
id_type!(
    /// Global method index: interfaces in canonical order, methods in declared order.
    MethodId
);
id_type!(
    /// Rank of an adapter in canonical (name) order.
    AdapterId
);

/// A provision row with resolved ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub method: MethodId,
    pub requires: Vec<MethodId>,
}

/// An adapter with resolved endpoints and dependency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: IfaceId,
    pub target: IfaceId,
    pub rows: Vec<Row>,
}

impl Edge {
    pub fn row_for(&self, method: MethodId) -> Option<&Row> {
        self.rows.iter().find(|r| r.method == method)
    }

    /// Number of true entries in the dependency matrix.
    pub fn entry_count(&self) -> usize {
        self.rows.iter().map(|r| r.requires.len()).sum()
    }
}

/// A validated, canonical interface adapter graph.
///
/// Immutable after construction. Parallel edges are permitted and
/// distinguished by adapter name; directed cycles between distinct
/// interfaces are permitted.
#[derive(Clone, Debug)]
pub struct AdapterGraph {
    interfaces: Vec<InterfaceDef>,
    adapters: Vec<AdapterDef>,
    edges: Vec<Edge>,
    method_offset: Vec<usize>,
    method_owner: Vec<IfaceId>,
    iface_index: HashMap<String, IfaceId>,
    adapter_index: HashMap<String, AdapterId>,
}

impl PartialEq for AdapterGraph {
    fn eq(&self, other: &Self) -> bool {
        self.interfaces == other.interfaces && self.adapters == other.adapters
    }
}

impl Eq for AdapterGraph {}

impl TryFrom<GraphDef> for AdapterGraph {
    type Error = Error;

    fn try_from(def: GraphDef) -> Result<Self> {
        AdapterGraph::new(def)
    }
}

impl AdapterGraph {
    /// Validates and indexes `def`.
    pub fn new(def: GraphDef) -> Result<Self> {
        let violations = validate_graph(&def);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        Ok(Self::build(def))
    }

    pub fn from_parts(interfaces: Vec<InterfaceDef>, adapters: Vec<AdapterDef>) -> Result<Self> {
        Self::new(GraphDef { interfaces, adapters })
    }

    fn build(def: GraphDef) -> Self {
        let GraphDef {
            mut interfaces,
            mut adapters,
        } = def;
        interfaces.sort_by(|a, b| a.name.cmp(&b.name));
        adapters.sort_by(|a, b| a.name.cmp(&b.name));

        let iface_index: HashMap<String, IfaceId> = interfaces
            .iter()
            .enumerate()
            .map(|(k, i)| (i.name.clone(), IfaceId(k as u32)))
            .collect();
        let mut method_offset = Vec::with_capacity(interfaces.len() + 1);
        let mut method_owner = Vec::new();
        let mut local: Vec<HashMap<&str, usize>> = Vec::with_capacity(interfaces.len());
        for (k, iface) in interfaces.iter().enumerate() {
            method_offset.push(method_owner.len());
            method_owner.extend(std::iter::repeat_n(IfaceId(k as u32), iface.methods.len()));
            local.push(iface.methods.iter().enumerate().map(|(q, m)| (m.as_str(), q)).collect());
        }
        method_offset.push(method_owner.len());

        let mut edges = Vec::with_capacity(adapters.len());
        for a in adapters.iter_mut() {
            let source = iface_index[&a.source];
            let target = iface_index[&a.target];
            let src_local = &local[source.index()];
            let tgt_local = &local[target.index()];
            for p in a.provides.iter_mut() {
                p.requires.sort_by_key(|r| src_local[r.as_str()]);
            }
            a.provides.sort_by_key(|p| tgt_local[p.method.as_str()]);
            let rows = a
                .provides
                .iter()
                .map(|p| Row {
                    method: MethodId((method_offset[target.index()] + tgt_local[p.method.as_str()]) as u32),
                    requires: p
                        .requires
                        .iter()
                        .map(|r| MethodId((method_offset[source.index()] + src_local[r.as_str()]) as u32))
                        .collect(),
                })
                .collect();
            edges.push(Edge { source, target, rows });
        }
        drop(local);

        let adapter_index = adapters
            .iter()
            .enumerate()
            .map(|(k, a)| (a.name.clone(), AdapterId(k as u32)))
            .collect();

        Self {
            interfaces,
            adapters,
            edges,
            method_offset,
            method_owner,
            iface_index,
            adapter_index,
        }
    }

    /// Back to the unchecked (but canonical) definition.
    pub fn to_def(&self) -> GraphDef {
        GraphDef {
            interfaces: self.interfaces.clone(),
            adapters: self.adapters.clone(),
        }
    }

    pub fn interfaces(&self) -> &[InterfaceDef] {
        &self.interfaces
    }

    pub fn adapters(&self) -> &[AdapterDef] {
        &self.adapters
    }

    pub fn interface_count(&self) -> usize {
        self.interfaces.len()
    }

    pub fn adapter_count(&self) -> usize {
        self.adapters.len()
    }

    /// Total number of methods over all interfaces.
    pub fn total_method_count(&self) -> usize {
        self.method_owner.len()
    }

    pub fn interface(&self, id: IfaceId) -> &InterfaceDef {
        &self.interfaces[id.index()]
    }

    pub fn adapter(&self, id: AdapterId) -> &AdapterDef {
        &self.adapters[id.index()]
    }

    pub fn edge(&self, id: AdapterId) -> &Edge {
        &self.edges[id.index()]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (AdapterId, &Edge)> {
        self.edges.iter().enumerate().map(|(k, e)| (AdapterId(k as u32), e))
    }

    pub fn adapter_ids(&self) -> impl ExactSizeIterator<Item = AdapterId> {
        (0..self.adapters.len() as u32).map(AdapterId)
    }

    pub fn interface_ids(&self) -> impl ExactSizeIterator<Item = IfaceId> {
        (0..self.interfaces.len() as u32).map(IfaceId)
    }

    pub fn iface_id(&self, name: &str) -> Result<IfaceId> {
        self.iface_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownInterface(name.to_string()))
    }

    pub fn adapter_id(&self, name: &str) -> Option<AdapterId> {
        self.adapter_index.get(name).copied()
    }

    pub fn method_id(&self, iface: &str, method: &str) -> Result<MethodId> {
        let id = self.iface_id(iface)?;
        self.methods_of(id)
            .find(|&m| self.method_name(m) == method)
            .ok_or_else(|| Error::UnknownMethod(MethodRef::new(iface, method)))
    }

    /// Methods of `iface` in declared order.
    pub fn methods_of(&self, iface: IfaceId) -> impl ExactSizeIterator<Item = MethodId> + Clone {
        let k = iface.index();
        (self.method_offset[k] as u32..self.method_offset[k + 1] as u32).map(MethodId)
    }

    pub fn method_owner(&self, method: MethodId) -> IfaceId {
        self.method_owner[method.index()]
    }

    pub fn method_name(&self, method: MethodId) -> &str {
        let owner = self.method_owner(method);
        &self.interfaces[owner.index()].methods[method.index() - self.method_offset[owner.index()]]
    }

    pub fn method_ref(&self, method: MethodId) -> MethodRef {
        MethodRef::new(
            &self.interface(self.method_owner(method)).name,
            self.method_name(method),
        )
    }

    /// Sub-multigraph induced by `adapters`, keeping `interfaces` plus every
    /// endpoint of a kept adapter.
    pub fn subgraph(&self, interfaces: &[IfaceId], adapters: &[AdapterId]) -> AdapterGraph {
        let mut keep: BTreeSet<IfaceId> = interfaces.iter().copied().collect();
        for &a in adapters {
            keep.insert(self.edges[a.index()].source);
            keep.insert(self.edges[a.index()].target);
        }
        let def = GraphDef {
            interfaces: keep.iter().map(|&i| self.interfaces[i.index()].clone()).collect(),
            adapters: adapters.iter().map(|&a| self.adapters[a.index()].clone()).collect(),
        };
        Self::build(def)
    }

    /// Copy of the graph in which interface `iface` only declares `keep`.
    ///
    /// Provision rows for dropped methods are removed from adapters into
    /// `iface`; rows requiring a dropped method are removed from adapters out
    /// of it.
    pub fn restrict_interface(&self, iface: &str, keep: &[&str]) -> Result<AdapterGraph> {
        let id = self.iface_id(iface)?;
        for m in keep {
            self.method_id(iface, m)?;
        }
        let mut def = self.to_def();
        let target = &mut def.interfaces[id.index()];
        target.methods.retain(|m| keep.contains(&m.as_str()));
        for a in def.adapters.iter_mut() {
            if a.target == iface {
                a.provides.retain(|p| keep.contains(&p.method.as_str()));
            }
            if a.source == iface {
                a.provides
                    .retain(|p| p.requires.iter().all(|r| keep.contains(&r.as_str())));
            }
        }
        AdapterGraph::new(def)
    }
}

/// Satisfiability of every method of a graph, indexed by [`MethodId`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatMap(pub Vec<bool>);

impl SatMap {
    pub fn get(&self, method: MethodId) -> bool {
        self.0[method.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Pointwise implication: every method satisfiable here is satisfiable in `other`.
    pub fn is_subset_of(&self, other: &SatMap) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| !a || b)
    }
}

/// Target methods split by satisfiability, each in declared order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub covered: Vec<String>,
    pub lost: Vec<String>,
}

pub fn total_method_count(g: &AdapterGraph) -> usize {
    g.total_method_count()
}

/// Partitions the methods of `target` into covered and lost under `sat`.
pub fn coverage_loss(g: &AdapterGraph, sat: &SatMap, target: &str) -> Result<Coverage> {
    let t = g.iface_id(target)?;
    let mut cov = Coverage::default();
    for m in g.methods_of(t) {
        let name = g.method_name(m).to_string();
        if sat.get(m) {
            cov.covered.push(name);
        } else {
            cov.lost.push(name);
        }
    }
    Ok(cov)
}
