//! Maximally covering webs.
//!
//! Satisfiability propagates from a fully functional source interface in
//! the manner of unit propagation over Horn clauses: every provision row
//! `(A, j)` keeps a count of source methods it still waits for, and the
//! row fires once that count hits zero. The web for a target interface is
//! then the backward closure of its methods over the viable adapters.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{AdapterGraph, AdapterId, IfaceId, MethodId, SatMap};

/// A provision row waiting on a method: adapter `adapter`, row index `row`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dependent {
    pub adapter: AdapterId,
    pub row: usize,
}

/// Working state of the propagation: the queue, viable adapters per
/// method, satisfiability, dependents per method and unsatisfied
/// dependency counts per provision row.
#[derive(Clone, Debug)]
pub struct PropagationState<'g> {
    graph: &'g AdapterGraph,
    source: IfaceId,
    queue: VecDeque<MethodId>,
    viable: Vec<Vec<AdapterId>>,
    sat: Vec<bool>,
    dependents: Vec<Vec<Dependent>>,
    pending: Vec<Vec<usize>>,
    first_viable: Vec<Option<AdapterId>>,
    decrements: usize,
}

impl<'g> PropagationState<'g> {
    fn setup(graph: &'g AdapterGraph, source: IfaceId, shuffle: Option<u64>) -> Self {
        let m = graph.total_method_count();
        let mut dependents = vec![Vec::new(); m];
        let mut pending = Vec::with_capacity(graph.adapter_count());
        for (a, edge) in graph.edges() {
            let mut counts = Vec::with_capacity(edge.rows.len());
            for (row, r) in edge.rows.iter().enumerate() {
                for &i in &r.requires {
                    dependents[i.index()].push(Dependent { adapter: a, row });
                }
                counts.push(r.requires.len());
            }
            pending.push(counts);
        }
        let mut sat = vec![false; m];
        let mut queue: VecDeque<MethodId> = graph.methods_of(source).collect();
        for &i in &queue {
            sat[i.index()] = true;
        }
        if let Some(seed) = shuffle {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            queue.make_contiguous().shuffle(&mut rng);
            for deps in dependents.iter_mut() {
                deps.shuffle(&mut rng);
            }
        }
        Self {
            graph,
            source,
            queue,
            viable: vec![Vec::new(); m],
            sat,
            dependents,
            pending,
            first_viable: vec![None; m],
            decrements: 0,
        }
    }

    /// Drains the queue to the least fixed point.
    pub fn run(&mut self) {
        while let Some(i) = self.queue.pop_front() {
            for k in 0..self.dependents[i.index()].len() {
                let Dependent { adapter, row } = self.dependents[i.index()][k];
                let count = &mut self.pending[adapter.index()][row];
                if *count == 0 {
                    continue;
                }
                *count -= 1;
                self.decrements += 1;
                if *count > 0 {
                    continue;
                }
                let edge = self.graph.edge(adapter);
                let j = edge.rows[row].method;
                self.viable[j.index()].push(adapter);
                if !self.sat[j.index()] {
                    self.sat[j.index()] = true;
                    if edge.target != self.source {
                        self.first_viable[j.index()] = Some(adapter);
                    }
                    self.queue.push_back(j);
                }
            }
        }
    }

    pub fn source(&self) -> IfaceId {
        self.source
    }

    pub fn queue(&self) -> impl Iterator<Item = MethodId> + '_ {
        self.queue.iter().copied()
    }

    pub fn is_sat(&self, m: MethodId) -> bool {
        self.sat[m.index()]
    }

    pub fn viable(&self, m: MethodId) -> &[AdapterId] {
        &self.viable[m.index()]
    }

    /// `(adapter, target method)` pairs whose rows depend on `m`.
    pub fn dependents_of(&self, m: MethodId) -> Vec<(AdapterId, MethodId)> {
        self.dependents[m.index()]
            .iter()
            .map(|d| (d.adapter, self.graph.edge(d.adapter).rows[d.row].method))
            .collect()
    }

    /// Unsatisfied dependency count of `(adapter, j)`, if `adapter` provides `j`.
    pub fn pending(&self, adapter: AdapterId, j: MethodId) -> Option<usize> {
        let edge = self.graph.edge(adapter);
        let row = edge.rows.iter().position(|r| r.method == j)?;
        Some(self.pending[adapter.index()][row])
    }

    /// Number of counter decrements performed so far.
    pub fn decrements(&self) -> usize {
        self.decrements
    }
}

/// Initial propagation state for source interface `source`.
pub fn cover_setup<'g>(g: &'g AdapterGraph, source: &str) -> Result<PropagationState<'g>> {
    Ok(PropagationState::setup(g, g.iface_id(source)?, None))
}

/// Which adapters the extracted web keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SubgraphMode {
    /// Every viable adapter of every needed method.
    #[default]
    Verbatim,
    /// Only the first-viable adapter of each needed method.
    FirstViable,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CoverOptions {
    pub mode: SubgraphMode,
    /// Shuffles the initial queue and every dependents list.
    pub shuffle_seed: Option<u64>,
}

/// A sub-multigraph given by interface and adapter ids, both sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Web {
    pub interfaces: Vec<IfaceId>,
    pub adapters: Vec<AdapterId>,
}

impl Web {
    pub fn to_graph(&self, g: &AdapterGraph) -> AdapterGraph {
        g.subgraph(&self.interfaces, &self.adapters)
    }

    pub fn adapter_names<'a>(&self, g: &'a AdapterGraph) -> Vec<&'a str> {
        self.adapters.iter().map(|&a| g.adapter(a).name.as_str()).collect()
    }

    pub fn interface_names<'a>(&self, g: &'a AdapterGraph) -> Vec<&'a str> {
        self.interfaces.iter().map(|&i| g.interface(i).name.as_str()).collect()
    }

    pub fn contains(&self, a: AdapterId) -> bool {
        self.adapters.binary_search(&a).is_ok()
    }
}

#[derive(Clone, Debug)]
pub struct CoverResult {
    pub source: IfaceId,
    pub target: IfaceId,
    pub sat: SatMap,
    /// Viable adapters per method, sorted by id.
    pub viable: Vec<Vec<AdapterId>>,
    pub first_viable: Vec<Option<AdapterId>>,
    pub web: Web,
    pub decrements: usize,
}

impl CoverResult {
    pub fn viable(&self, m: MethodId) -> &[AdapterId] {
        &self.viable[m.index()]
    }

    pub fn first_viable(&self, m: MethodId) -> Option<AdapterId> {
        self.first_viable[m.index()]
    }

    /// Target methods reached from the source, in declared order.
    pub fn covered<'a>(&'a self, g: &'a AdapterGraph) -> impl Iterator<Item = MethodId> + 'a {
        g.methods_of(self.target).filter(|&m| self.sat.get(m))
    }
}

pub fn maximal_cover(g: &AdapterGraph, source: &str, target: &str) -> Result<CoverResult> {
    maximal_cover_with(g, source, target, &CoverOptions::default())
}

pub fn maximal_cover_with(g: &AdapterGraph, source: &str, target: &str, opts: &CoverOptions) -> Result<CoverResult> {
    let s = g.iface_id(source)?;
    let t = g.iface_id(target)?;
    Ok(cover_ids(g, s, t, opts))
}

pub(crate) fn cover_ids(g: &AdapterGraph, s: IfaceId, t: IfaceId, opts: &CoverOptions) -> CoverResult {
    let mut state = PropagationState::setup(g, s, opts.shuffle_seed);
    state.run();
    let PropagationState {
        mut viable,
        sat,
        first_viable,
        decrements,
        ..
    } = state;
    for d in viable.iter_mut() {
        d.sort_unstable();
    }
    let web = match opts.mode {
        SubgraphMode::Verbatim => subgraph_ids(g, &viable, t),
        SubgraphMode::FirstViable => first_viable_subgraph(g, &first_viable, t),
    };
    CoverResult {
        source: s,
        target: t,
        sat: SatMap(sat),
        viable,
        first_viable,
        web,
        decrements,
    }
}

/// Backward closure of the methods of `target` over `viable`.
pub fn cover_subgraph(viable: &[Vec<AdapterId>], g: &AdapterGraph, target: &str) -> Result<Web> {
    Ok(subgraph_ids(g, viable, g.iface_id(target)?))
}

fn subgraph_ids(g: &AdapterGraph, viable: &[Vec<AdapterId>], t: IfaceId) -> Web {
    closure(g, t, |m| viable[m.index()].iter().copied())
}

fn first_viable_subgraph(g: &AdapterGraph, first: &[Option<AdapterId>], t: IfaceId) -> Web {
    closure(g, t, |m| first[m.index()].into_iter())
}

fn closure<I, F>(g: &AdapterGraph, t: IfaceId, mut adapters_for: F) -> Web
where
    F: FnMut(MethodId) -> I,
    I: Iterator<Item = AdapterId>,
{
    let mut in_ifaces = vec![false; g.interface_count()];
    let mut in_adapters = vec![false; g.adapter_count()];
    let mut seen = vec![false; g.total_method_count()];
    let mut queue = VecDeque::new();
    for m in g.methods_of(t) {
        seen[m.index()] = true;
        queue.push_back(m);
    }
    while let Some(j) = queue.pop_front() {
        in_ifaces[g.method_owner(j).index()] = true;
        for a in adapters_for(j) {
            in_adapters[a.index()] = true;
            let row = g.edge(a).row_for(j).expect("viable adapter provides the method");
            for &i in &row.requires {
                if !seen[i.index()] {
                    seen[i.index()] = true;
                    queue.push_back(i);
                }
            }
        }
    }
    Web {
        interfaces: g.interface_ids().filter(|i| in_ifaces[i.index()]).collect(),
        adapters: g.adapter_ids().filter(|a| in_adapters[a.index()]).collect(),
    }
}

/// Naive fixed point: sweeps every provision row until nothing changes.
pub fn saturate_oracle(g: &AdapterGraph, source: &str) -> Result<SatMap> {
    let s = g.iface_id(source)?;
    let mut sat = vec![false; g.total_method_count()];
    for m in g.methods_of(s) {
        sat[m.index()] = true;
    }
    loop {
        let mut changed = false;
        for (_, edge) in g.edges() {
            for row in &edge.rows {
                if !sat[row.method.index()] && row.requires.iter().all(|i| sat[i.index()]) {
                    sat[row.method.index()] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(SatMap(sat));
        }
    }
}

/// Lean propagation engine for repeated runs over adapter subsets.
///
/// Dependents and row offsets are computed once; each run only resets the
/// counters.
#[derive(Clone, Debug)]
pub struct Propagator<'g> {
    graph: &'g AdapterGraph,
    source: IfaceId,
    dependents: Vec<Vec<(u32, u32)>>,
    row_offset: Vec<usize>,
    counts: Vec<u32>,
    row_method: Vec<MethodId>,
}

impl<'g> Propagator<'g> {
    pub fn new(graph: &'g AdapterGraph, source: IfaceId) -> Self {
        let mut dependents = vec![Vec::new(); graph.total_method_count()];
        let mut row_offset = Vec::with_capacity(graph.adapter_count() + 1);
        let mut counts = Vec::new();
        let mut row_method = Vec::new();
        for (a, edge) in graph.edges() {
            row_offset.push(counts.len());
            for r in &edge.rows {
                let flat = counts.len() as u32;
                for &i in &r.requires {
                    dependents[i.index()].push((a.0, flat));
                }
                counts.push(r.requires.len() as u32);
                row_method.push(r.method);
            }
        }
        row_offset.push(counts.len());
        Self {
            graph,
            source,
            dependents,
            row_offset,
            counts,
            row_method,
        }
    }

    pub fn graph(&self) -> &'g AdapterGraph {
        self.graph
    }

    /// Satisfiability using only adapters with `active[a]` set.
    pub fn sat(&self, active: &[bool]) -> Vec<bool> {
        self.run(active, &[])
    }

    /// Whether every method in `needed` is satisfiable using only active adapters.
    pub fn covers(&self, active: &[bool], needed: &[MethodId]) -> bool {
        if needed.is_empty() {
            return true;
        }
        let sat = self.run(active, needed);
        needed.iter().all(|m| sat[m.index()])
    }

    fn run(&self, active: &[bool], stop_after: &[MethodId]) -> Vec<bool> {
        let mut counts = self.counts.clone();
        let mut sat = vec![false; self.graph.total_method_count()];
        let mut queue: VecDeque<MethodId> = self.graph.methods_of(self.source).collect();
        for &i in &queue {
            sat[i.index()] = true;
        }
        let mut remaining = stop_after.iter().filter(|m| !sat[m.index()]).count();
        if !stop_after.is_empty() && remaining == 0 {
            return sat;
        }
        while let Some(i) = queue.pop_front() {
            for &(a, flat) in &self.dependents[i.index()] {
                if !active[a as usize] {
                    continue;
                }
                let c = &mut counts[flat as usize];
                *c -= 1;
                if *c == 0 {
                    let j = self.row_method[flat as usize];
                    if !sat[j.index()] {
                        sat[j.index()] = true;
                        queue.push_back(j);
                        if !stop_after.is_empty() && stop_after.contains(&j) {
                            remaining -= 1;
                            if remaining == 0 {
                                return sat;
                            }
                        }
                    }
                }
            }
        }
        sat
    }

    /// Number of provision rows of adapter `a`.
    pub fn rows_of(&self, a: AdapterId) -> usize {
        self.row_offset[a.index() + 1] - self.row_offset[a.index()]
    }
}

/// Target methods covered when only `adapters` are available.
pub fn coverage_through(g: &AdapterGraph, s: IfaceId, t: IfaceId, adapters: &[AdapterId]) -> Vec<MethodId> {
    let mut active = vec![false; g.adapter_count()];
    for &a in adapters {
        active[a.index()] = true;
    }
    let sat = Propagator::new(g, s).sat(&active);
    g.methods_of(t).filter(|m| sat[m.index()]).collect()
}

/// Whether the interfaces and `adapters` form a directed acyclic graph.
pub fn is_acyclic(g: &AdapterGraph, adapters: &[AdapterId]) -> bool {
    let n = g.interface_count();
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &a in adapters {
        let e = g.edge(a);
        out[e.source.index()].push(e.target.index());
        indeg[e.target.index()] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&k| indeg[k] == 0).collect();
    let mut visited = 0;
    while let Some(k) = stack.pop() {
        visited += 1;
        for &j in &out[k] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                stack.push(j);
            }
        }
    }
    visited == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{chain, diamond};
    use crate::model::{AdapterDef, InterfaceDef};

    #[test]
    fn setup_counts_and_dependents() {
        let g = AdapterGraph::from_parts(
            vec![InterfaceDef::new("s", ["a", "b"]), InterfaceDef::new("t", ["x"])],
            vec![AdapterDef::new("A", "s", "t").provide("x", ["a", "b"])],
        )
        .unwrap();
        let st = cover_setup(&g, "s").unwrap();
        let a = g.adapter_id("A").unwrap();
        let x = g.method_id("t", "x").unwrap();
        assert_eq!(st.pending(a, x), Some(2));
        assert_eq!(st.dependents_of(g.method_id("s", "a").unwrap()), vec![(a, x)]);
        assert_eq!(st.dependents_of(g.method_id("s", "b").unwrap()), vec![(a, x)]);
        assert!(st.viable(x).is_empty());
        assert_eq!(st.queue().count(), 2);
    }

    #[test]
    fn setup_without_adapters() {
        let g = AdapterGraph::from_parts(vec![InterfaceDef::new("s", ["a", "b", "c"])], vec![]).unwrap();
        let st = cover_setup(&g, "s").unwrap();
        let q: Vec<_> = st.queue().map(|m| g.method_name(m).to_string()).collect();
        assert_eq!(q, vec!["a", "b", "c"]);
        assert!(cover_setup(&g, "nope").is_err());
    }

    #[test]
    fn unreachable_target() {
        let g = AdapterGraph::from_parts(
            vec![InterfaceDef::new("s", ["a"]), InterfaceDef::new("t", ["x", "y"])],
            vec![AdapterDef::new("B", "t", "s").provide("a", ["x"])],
        )
        .unwrap();
        let r = maximal_cover(&g, "s", "t").unwrap();
        assert_eq!(r.web.interface_names(&g), vec!["t"]);
        assert!(r.web.adapters.is_empty());
        assert_eq!(r.covered(&g).count(), 0);
    }

    #[test]
    fn identity_chain() {
        let g = chain();
        let r = maximal_cover(&g, "s", "t").unwrap();
        assert!(r.sat.0.iter().all(|&b| b));
        assert_eq!(r.web.adapter_names(&g), vec!["C1", "C2"]);
        assert_eq!(r.web.interface_names(&g), vec!["i1", "s", "t"]);
    }

    #[test]
    fn diamond_web() {
        let g = diamond();
        let r = maximal_cover(&g, "s", "t").unwrap();
        assert_eq!(r.sat, saturate_oracle(&g, "s").unwrap());
        assert!(r.sat.0.iter().all(|&b| b));
        assert_eq!(r.web.adapter_names(&g), vec!["A1", "A2", "A3", "A4"]);
        assert_eq!(r.web.interfaces.len(), 4);
        let cov = crate::model::coverage_loss(&g, &r.sat, "t").unwrap();
        assert_eq!(cov.covered, vec!["x", "y"]);
        assert!(cov.lost.is_empty());
        // Neither chain alone covers both target methods.
        let s = g.iface_id("s").unwrap();
        let t = g.iface_id("t").unwrap();
        let a = |n: &str| g.adapter_id(n).unwrap();
        assert_eq!(coverage_through(&g, s, t, &[a("A1"), a("A3")]).len(), 1);
        assert_eq!(coverage_through(&g, s, t, &[a("A2"), a("A4")]).len(), 1);
    }

    #[test]
    fn cover_subgraph_of_empty_viable() {
        let g = diamond();
        let empty = vec![Vec::new(); g.total_method_count()];
        let w = cover_subgraph(&empty, &g, "t").unwrap();
        assert_eq!(w.interface_names(&g), vec!["t"]);
        assert!(w.adapters.is_empty());
    }

    #[test]
    fn least_fixed_point_on_cycles() {
        let g = AdapterGraph::from_parts(
            vec![
                InterfaceDef::new("s", ["a"]),
                InterfaceDef::new("p", ["u"]),
                InterfaceDef::new("q", ["v"]),
            ],
            vec![
                AdapterDef::new("PQ", "p", "q").provide("v", ["u"]),
                AdapterDef::new("QP", "q", "p").provide("u", ["v"]),
            ],
        )
        .unwrap();
        let oracle = saturate_oracle(&g, "s").unwrap();
        assert_eq!(oracle.count(), 1);
        assert_eq!(maximal_cover(&g, "s", "q").unwrap().sat, oracle);
    }

    #[test]
    fn oracle_without_adapters() {
        let g = AdapterGraph::from_parts(
            vec![InterfaceDef::new("s", ["a"]), InterfaceDef::new("t", ["x"])],
            vec![],
        )
        .unwrap();
        assert_eq!(saturate_oracle(&g, "s").unwrap().0, vec![true, false]);
    }

    #[test]
    fn verbatim_web_may_contain_cycles() {
        // s feeds both p and q, and p and q feed each other; the closure
        // from t picks up both directions of the 2-cycle.
        let g = AdapterGraph::from_parts(
            vec![
                InterfaceDef::new("s", ["a"]),
                InterfaceDef::new("p", ["u"]),
                InterfaceDef::new("q", ["v"]),
                InterfaceDef::new("t", ["x"]),
            ],
            vec![
                AdapterDef::new("SP", "s", "p").provide("u", ["a"]),
                AdapterDef::new("SQ", "s", "q").provide("v", ["a"]),
                AdapterDef::new("PQ", "p", "q").provide("v", ["u"]),
                AdapterDef::new("QP", "q", "p").provide("u", ["v"]),
                AdapterDef::new("QT", "q", "t").provide("x", ["v"]),
            ],
        )
        .unwrap();
        let full = maximal_cover(&g, "s", "t").unwrap();
        assert!(full.web.contains(g.adapter_id("PQ").unwrap()));
        assert!(full.web.contains(g.adapter_id("QP").unwrap()));
        assert!(!is_acyclic(&g, &full.web.adapters));

        let pruned = maximal_cover_with(
            &g,
            "s",
            "t",
            &CoverOptions {
                mode: SubgraphMode::FirstViable,
                shuffle_seed: None,
            },
        )
        .unwrap();
        assert_eq!(pruned.web.adapter_names(&g), vec!["QT", "SQ"]);
        assert!(is_acyclic(&g, &pruned.web.adapters));
    }

    #[test]
    fn first_viable_defined_off_source() {
        let g = diamond();
        let r = maximal_cover(&g, "s", "t").unwrap();
        for m in 0..g.total_method_count() {
            let m = MethodId(m as u32);
            let off_source = g.method_owner(m) != r.source;
            assert_eq!(r.first_viable(m).is_some(), r.sat.get(m) && off_source);
        }
    }

    #[test]
    fn propagator_matches_full_cover() {
        let g = diamond();
        let s = g.iface_id("s").unwrap();
        let p = Propagator::new(&g, s);
        let all = vec![true; g.adapter_count()];
        assert_eq!(p.sat(&all), maximal_cover(&g, "s", "t").unwrap().sat.0);
        let mut some = all.clone();
        some[g.adapter_id("A3").unwrap().index()] = false;
        let x = g.method_id("t", "x").unwrap();
        let y = g.method_id("t", "y").unwrap();
        assert!(!p.covers(&some, &[x, y]));
        assert!(p.covers(&some, &[y]));
        assert_eq!(p.rows_of(g.adapter_id("A3").unwrap()), 1);
    }
}
