//! Adaptation plans for single target methods.
//!
//! A plan is found by recursive descent from the requested method: pick a
//! viable adapter whose source interface has not been visited on the
//! current path, derive each method it requires from that source, then
//! emit the adapter. The source interface terminates every branch.
//!
//! The visited set is per path: siblings each receive the same set.
//! Structurally identical sub-derivations are emitted once, so a plan is a
//! DAG of steps whose root-to-leaf paths are exactly those of the descent
//! tree.

use std::collections::HashMap;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cover::CoverResult;
use crate::error::{Error, Result};
use crate::model::{AdapterGraph, AdapterId, IfaceId, MethodId};

/// One adapter invocation realizing `method` (a method of the adapter's
/// target). `uses` lists the earlier steps supplying its non-source
/// requirements, in requirement order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStep {
    pub adapter: AdapterId,
    pub method: MethodId,
    pub uses: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptationPlan {
    pub root: MethodId,
    pub steps: Vec<PlanStep>,
}

impl AdaptationPlan {
    /// Length of the longest dependency chain, counted in steps.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.steps.len()];
        for (k, s) in self.steps.iter().enumerate() {
            depth[k] = 1 + s.uses.iter().filter(|&&u| u < k).map(|&u| depth[u]).max().unwrap_or(0);
        }
        depth.last().copied().unwrap_or(0)
    }

    pub fn distinct_adapters(&self) -> Vec<AdapterId> {
        let mut a: Vec<_> = self.steps.iter().map(|s| s.adapter).collect();
        a.sort_unstable();
        a.dedup();
        a
    }
}

/// What a selection policy sees when choosing an adapter for `method`.
pub struct Selection<'a> {
    pub graph: &'a AdapterGraph,
    pub cover: &'a CoverResult,
    pub method: MethodId,
    /// Viable adapters for `method` whose source is unvisited, sorted by id.
    pub candidates: &'a [AdapterId],
    pub visited: &'a [IfaceId],
    pub depth: usize,
}

/// Orders the candidate adapters for one selection.
///
/// Implementations must be pure: the same selection must produce the same
/// ranking, since sub-derivations are memoized.
pub trait SelectionPolicy: Sync {
    fn rank(&self, sel: &Selection<'_>) -> Vec<AdapterId>;
}

/// The adapter that first made the method viable during propagation, then
/// the rest by name.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstViable;

impl SelectionPolicy for FirstViable {
    fn rank(&self, sel: &Selection<'_>) -> Vec<AdapterId> {
        let mut out = sel.candidates.to_vec();
        if let Some(first) = sel.cover.first_viable(sel.method) {
            if let Some(pos) = out.iter().position(|&a| a == first) {
                out[..=pos].rotate_right(1);
            }
        }
        out
    }
}

/// Fewest required source methods first, ties by name.
#[derive(Clone, Copy, Debug, Default)]
pub struct FewestDependencies;

impl SelectionPolicy for FewestDependencies {
    fn rank(&self, sel: &Selection<'_>) -> Vec<AdapterId> {
        let mut out = sel.candidates.to_vec();
        out.sort_by_key(|&a| {
            let n = sel
                .graph
                .edge(a)
                .row_for(sel.method)
                .map_or(usize::MAX, |r| r.requires.len());
            (n, a)
        });
        out
    }
}

/// Lexicographic adapter name.
#[derive(Clone, Copy, Debug, Default)]
pub struct ByName;

impl SelectionPolicy for ByName {
    fn rank(&self, sel: &Selection<'_>) -> Vec<AdapterId> {
        sel.candidates.to_vec()
    }
}

/// A seeded shuffle, derived from the seed, method, depth and visited set.
#[derive(Clone, Copy, Debug)]
pub struct Seeded(pub u64);

impl SelectionPolicy for Seeded {
    fn rank(&self, sel: &Selection<'_>) -> Vec<AdapterId> {
        let mut h = self.0 ^ 0x9e37_79b9_7f4a_7c15;
        let mut mix = |v: u64| {
            h = (h ^ v).wrapping_mul(0x1000_0000_01b3).rotate_left(29);
        };
        mix(sel.method.0 as u64);
        mix(sel.depth as u64);
        for v in sel.visited {
            mix(v.0 as u64 + 1);
        }
        let mut out = sel.candidates.to_vec();
        out.shuffle(&mut ChaCha8Rng::seed_from_u64(h));
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AdaptOptions {
    /// Try further candidates when one leads to a dead end.
    pub backtrack: bool,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        Self { backtrack: true }
    }
}

#[derive(Debug)]
struct Node {
    adapter: AdapterId,
    method: MethodId,
    children: Vec<Rc<Node>>,
}

type Derivation = std::result::Result<Rc<Node>, MethodId>;

struct Descent<'a, P: ?Sized> {
    graph: &'a AdapterGraph,
    cover: &'a CoverResult,
    policy: &'a P,
    backtrack: bool,
    memo: HashMap<(MethodId, Vec<u64>), Derivation>,
}

impl<P: SelectionPolicy + ?Sized> Descent<'_, P> {
    fn derive(&mut self, method: MethodId, visited: &mut Vec<u64>, depth: usize) -> Derivation {
        let key = (method, visited.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.derive_uncached(method, visited, depth);
        self.memo.insert(key, result.clone());
        result
    }

    fn derive_uncached(&mut self, method: MethodId, visited: &mut Vec<u64>, depth: usize) -> Derivation {
        let g = self.graph;
        let candidates: Vec<AdapterId> = self
            .cover
            .viable(method)
            .iter()
            .copied()
            .filter(|&a| !bit(visited, g.edge(a).source))
            .collect();
        if candidates.is_empty() {
            return Err(method);
        }
        let visited_ids: Vec<IfaceId> = g.interface_ids().filter(|&i| bit(visited, i)).collect();
        let ranked = self.policy.rank(&Selection {
            graph: g,
            cover: self.cover,
            method,
            candidates: &candidates,
            visited: &visited_ids,
            depth,
        });
        let tries = if self.backtrack {
            ranked.len()
        } else {
            ranked.len().min(1)
        };
        let mut failure = method;
        'candidates: for &a in &ranked[..tries] {
            debug_assert!(candidates.contains(&a), "policy returned a non-candidate");
            let edge = g.edge(a);
            let row = edge.row_for(method).expect("viable adapter provides the method");
            let mut children = Vec::new();
            if edge.source != self.cover.source {
                set_bit(visited, edge.source, true);
                for &i in &row.requires {
                    match self.derive(i, visited, depth + 1) {
                        Ok(child) => children.push(child),
                        Err(at) => {
                            failure = at;
                            set_bit(visited, edge.source, false);
                            continue 'candidates;
                        }
                    }
                }
                set_bit(visited, edge.source, false);
            }
            return Ok(Rc::new(Node {
                adapter: a,
                method,
                children,
            }));
        }
        Err(failure)
    }
}

fn bit(set: &[u64], i: IfaceId) -> bool {
    set[i.index() / 64] >> (i.index() % 64) & 1 == 1
}

fn set_bit(set: &mut [u64], i: IfaceId, on: bool) {
    let (w, b) = (i.index() / 64, i.index() % 64);
    if on {
        set[w] |= 1 << b;
    } else {
        set[w] &= !(1 << b);
    }
}

fn flatten(
    node: &Rc<Node>,
    steps: &mut Vec<PlanStep>,
    by_ptr: &mut HashMap<*const Node, usize>,
    by_shape: &mut HashMap<(AdapterId, MethodId, Vec<usize>), usize>,
) -> usize {
    let ptr = Rc::as_ptr(node);
    if let Some(&k) = by_ptr.get(&ptr) {
        return k;
    }
    let uses: Vec<usize> = node
        .children
        .iter()
        .map(|c| flatten(c, steps, by_ptr, by_shape))
        .collect();
    let key = (node.adapter, node.method, uses);
    let k = match by_shape.get(&key) {
        Some(&k) => k,
        None => {
            let k = steps.len();
            steps.push(PlanStep {
                adapter: node.adapter,
                method: node.method,
                uses: key.2.clone(),
            });
            by_shape.insert(key, k);
            k
        }
    };
    by_ptr.insert(ptr, k);
    k
}

/// Plans the adaptation of `method` of the cover's target interface with
/// the default policy: [`FirstViable`] with backtracking.
///
/// First-viable adapters form a derivation that never revisits a method,
/// but it may revisit an interface on cyclic graphs, so backtracking stays
/// on. When every derivation has to pass through some interface twice the
/// result is [`Error::DeadEnd`].
pub fn adapt_method(cover: &CoverResult, g: &AdapterGraph, method: &str) -> Result<AdaptationPlan> {
    adapt_method_with(cover, g, method, &FirstViable, AdaptOptions::default())
}

pub fn adapt_method_with<P: SelectionPolicy + ?Sized>(
    cover: &CoverResult,
    g: &AdapterGraph,
    method: &str,
    policy: &P,
    opts: AdaptOptions,
) -> Result<AdaptationPlan> {
    let target_name = &g.interface(cover.target).name;
    let root = g.method_id(target_name, method)?;
    adapt_ids(cover, g, root, policy, opts)
}

pub(crate) fn adapt_ids<P: SelectionPolicy + ?Sized>(
    cover: &CoverResult,
    g: &AdapterGraph,
    root: MethodId,
    policy: &P,
    opts: AdaptOptions,
) -> Result<AdaptationPlan> {
    let owner = g.method_owner(root);
    if owner == cover.source {
        return Ok(AdaptationPlan {
            root,
            steps: Vec::new(),
        });
    }
    if cover.viable(root).is_empty() {
        return Err(Error::NotAdaptable(g.method_ref(root)));
    }
    let mut descent = Descent {
        graph: g,
        cover,
        policy,
        backtrack: opts.backtrack,
        memo: HashMap::new(),
    };
    let mut visited = vec![0u64; g.interface_count().div_ceil(64)];
    set_bit(&mut visited, owner, true);
    let tree = descent
        .derive(root, &mut visited, 0)
        .map_err(|at| Error::DeadEnd(g.method_ref(at)))?;
    let mut steps = Vec::new();
    flatten(&tree, &mut steps, &mut HashMap::new(), &mut HashMap::new());
    Ok(AdaptationPlan { root, steps })
}

/// Checks a plan against the graph: every step's adapter targets the step's
/// interface and provides its method; every requirement is a source method
/// or supplied by an earlier step; no interface repeats as a step target
/// along any derivation path; the source is never a step target; the final
/// step realizes the root. Returns the list of problems found.
pub fn verify_plan(plan: &AdaptationPlan, g: &AdapterGraph, source: IfaceId) -> Vec<String> {
    let mut problems = Vec::new();
    let n_methods = g.total_method_count();
    if plan.root.index() >= n_methods {
        return vec![format!("root method id {} is out of range", plan.root.0)];
    }
    if plan.steps.is_empty() {
        if g.method_owner(plan.root) != source {
            problems.push(format!("empty plan for non-source method {}", g.method_ref(plan.root)));
        }
        return problems;
    }
    // Interfaces targeted along some path ending at each step, per step.
    let mut reach: Vec<Vec<IfaceId>> = Vec::with_capacity(plan.steps.len());
    for (k, step) in plan.steps.iter().enumerate() {
        if step.adapter.index() >= g.adapter_count() || step.method.index() >= n_methods {
            problems.push(format!("step {k}: id out of range"));
            reach.push(Vec::new());
            continue;
        }
        let edge = g.edge(step.adapter);
        let name = &g.adapter(step.adapter).name;
        let here = g.method_owner(step.method);
        if edge.target != here {
            problems.push(format!(
                "step {k}: adapter {name} does not target {}",
                g.method_ref(step.method)
            ));
        }
        if here == source {
            problems.push(format!(
                "step {k}: source method {} realized by an adapter",
                g.method_ref(step.method)
            ));
        }
        let Some(row) = edge.row_for(step.method) else {
            problems.push(format!(
                "step {k}: adapter {name} does not provide {}",
                g.method_ref(step.method)
            ));
            reach.push(vec![here]);
            continue;
        };
        let mut used = vec![false; step.uses.len()];
        for &i in &row.requires {
            if edge.source == source {
                continue;
            }
            let supplier = step
                .uses
                .iter()
                .enumerate()
                .find(|&(q, &u)| !used[q] && u < k && plan.steps[u].method == i);
            match supplier {
                Some((q, _)) => used[q] = true,
                None => problems.push(format!(
                    "step {k}: requirement {} of {name} is not supplied by an earlier step",
                    g.method_ref(i)
                )),
            }
        }
        if used.iter().any(|&u| !u) {
            problems.push(format!("step {k}: supplies steps that are not required"));
        }
        let mut below: Vec<IfaceId> = Vec::new();
        for &u in step.uses.iter().filter(|&&u| u < k) {
            for &i in &reach[u] {
                if !below.contains(&i) {
                    below.push(i);
                }
            }
        }
        if below.contains(&here) {
            problems.push(format!(
                "step {k}: interface {} repeats along a derivation path",
                g.interface(here).name
            ));
        }
        below.push(here);
        reach.push(below);
    }
    let last = plan.steps.last().expect("non-empty");
    if last.method != plan.root {
        problems.push(format!("final step does not realize {}", g.method_ref(plan.root)));
    }
    problems
}
