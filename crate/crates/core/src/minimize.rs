//! Minimum maximally covering webs.
//!
//! Deciding whether a maximally covering web with at most `K` adapters
//! exists is NP-complete, so the exact search here is a budgeted
//! branch-and-bound over adapter subsets. Only adapters of the full web
//! are candidates: an adapter outside the backward closure of the target
//! can never contribute to its coverage.
//!
//! The exact minimizer runs in two phases. The first finds the optimum
//! count, splitting the include/exclude tree into independent subtrees
//! that may run in parallel; each subtree starts from the greedy bound and
//! never shares state, so node counts (and therefore budget failures) do
//! not depend on scheduling. The second phase searches in adapter-name
//! order with include-first branching, whose first hit is the
//! lexicographically least optimal adapter set.

use std::cmp::Reverse;

use crate::cover::{cover_ids, is_acyclic, CoverOptions, Propagator, Web};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{AdapterGraph, AdapterId, IfaceId, MethodId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Search-tree nodes, summed over both phases.
    pub max_nodes: u64,
    /// Candidate adapters (members of the full web).
    pub max_adapters: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_nodes: 1 << 20,
            max_adapters: 25,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MinimizeOptions {
    pub budget: SearchBudget,
    pub parallel: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            budget: SearchBudget::default(),
            parallel: exec::PARALLEL_AVAILABLE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizeResult {
    pub web: Web,
    pub adapter_count: usize,
    pub exact: bool,
    /// Target methods covered, in declared order.
    pub target_coverage: Vec<MethodId>,
    /// Whether the web is acyclic at the interface level.
    pub acyclic: bool,
    /// Search-tree nodes visited (zero for the greedy minimizer).
    pub nodes: u64,
}

/// Levels of the include/exclude tree expanded before handing subtrees out.
const SPLIT_DEPTH: usize = 4;

struct Problem<'g> {
    graph: &'g AdapterGraph,
    source: IfaceId,
    target: IfaceId,
    prop: Propagator<'g>,
    needed: Vec<MethodId>,
    candidates: Vec<AdapterId>,
    /// Candidate adapters providing each needed method directly.
    last_hop: Vec<Vec<AdapterId>>,
    /// Number of needed-closure methods each candidate is viable for.
    fanout: Vec<usize>,
}

impl<'g> Problem<'g> {
    fn new(g: &'g AdapterGraph, s: IfaceId, t: IfaceId) -> Self {
        let cover = cover_ids(g, s, t, &CoverOptions::default());
        let needed: Vec<MethodId> = cover.covered(g).collect();
        let candidates = cover.web.adapters.clone();
        let last_hop = needed.iter().map(|&m| cover.viable(m).to_vec()).collect();
        let mut fanout = vec![0; g.adapter_count()];
        for d in &cover.viable {
            for &a in d {
                if cover.web.contains(a) {
                    fanout[a.index()] += 1;
                }
            }
        }
        Self {
            graph: g,
            source: s,
            target: t,
            prop: Propagator::new(g, s),
            needed,
            candidates,
            last_hop,
            fanout,
        }
    }

    fn covers(&self, active: &[bool]) -> bool {
        self.prop.covers(active, &self.needed)
    }

    fn check_size(&self, budget: &SearchBudget) -> Result<()> {
        if self.candidates.len() > budget.max_adapters {
            return Err(Error::BudgetExceeded(format!(
                "{} candidate adapters exceed the limit of {}",
                self.candidates.len(),
                budget.max_adapters
            )));
        }
        Ok(())
    }

    fn mask(&self, adapters: &[AdapterId]) -> Vec<bool> {
        let mut m = vec![false; self.graph.adapter_count()];
        for &a in adapters {
            m[a.index()] = true;
        }
        m
    }

    fn greedy(&self) -> Vec<AdapterId> {
        let mut order = self.candidates.clone();
        order.sort_by_key(|&a| (Reverse(self.graph.edge(a).entry_count()), a));
        let mut active = self.mask(&self.candidates);
        for a in order {
            active[a.index()] = false;
            if !self.covers(&active) {
                active[a.index()] = true;
            }
        }
        self.candidates.iter().copied().filter(|a| active[a.index()]).collect()
    }

    fn result(&self, mut adapters: Vec<AdapterId>, exact: bool, nodes: u64) -> MinimizeResult {
        adapters.sort_unstable();
        let mut ifaces = vec![self.source, self.target];
        for &a in &adapters {
            ifaces.push(self.graph.edge(a).source);
            ifaces.push(self.graph.edge(a).target);
        }
        ifaces.sort_unstable();
        ifaces.dedup();
        let coverage = crate::cover::coverage_through(self.graph, self.source, self.target, &adapters);
        debug_assert_eq!(coverage, self.needed);
        MinimizeResult {
            acyclic: is_acyclic(self.graph, &adapters),
            adapter_count: adapters.len(),
            web: Web {
                interfaces: ifaces,
                adapters,
            },
            exact,
            target_coverage: coverage,
            nodes,
        }
    }
}

struct Exceeded;

/// One depth-first include/exclude search.
struct Search<'p, 'g> {
    problem: &'p Problem<'g>,
    order: &'p [AdapterId],
    included: Vec<bool>,
    active: Vec<bool>,
    /// Looking for a set strictly smaller than this.
    bound: usize,
    best: Option<Vec<AdapterId>>,
    stop_on_first: bool,
    nodes: u64,
    limit: u64,
}

impl<'p, 'g> Search<'p, 'g> {
    fn new(problem: &'p Problem<'g>, order: &'p [AdapterId], bound: usize, stop_on_first: bool, limit: u64) -> Self {
        Self {
            problem,
            order,
            included: vec![false; problem.graph.adapter_count()],
            active: problem.mask(&problem.candidates),
            bound,
            best: None,
            stop_on_first,
            nodes: 0,
            limit,
        }
    }

    fn lower_bound(&self, n_included: usize) -> usize {
        let mut taken: Vec<AdapterId> = Vec::new();
        let mut k = 0;
        for hop in &self.problem.last_hop {
            if hop.iter().any(|a| self.included[a.index()]) {
                continue;
            }
            let open: Vec<AdapterId> = hop.iter().copied().filter(|a| self.active[a.index()]).collect();
            if open.is_empty() {
                return usize::MAX;
            }
            if open.iter().all(|a| !taken.contains(a)) {
                k += 1;
                taken.extend(open);
            }
        }
        n_included + k
    }

    fn run(
        &mut self,
        depth: usize,
        n_included: usize,
        active_known: bool,
        included_grew: bool,
    ) -> Result<(), Exceeded> {
        if self.stop_on_first && self.best.is_some() {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Exceeded);
        }
        if self.lower_bound(n_included) >= self.bound {
            return Ok(());
        }
        if !active_known && !self.problem.covers(&self.active) {
            return Ok(());
        }
        if included_grew && self.problem.covers(&self.included) {
            self.bound = n_included;
            self.best = Some(
                self.order
                    .iter()
                    .copied()
                    .filter(|a| self.included[a.index()])
                    .collect(),
            );
            return Ok(());
        }
        let Some(&a) = self.order.get(depth) else {
            return Ok(());
        };
        self.included[a.index()] = true;
        let r = self.run(depth + 1, n_included + 1, true, true);
        self.included[a.index()] = false;
        r?;
        self.active[a.index()] = false;
        let r = self.run(depth + 1, n_included, false, false);
        self.active[a.index()] = true;
        r
    }
}

fn exceeded(nodes: u64, budget: &SearchBudget) -> Error {
    Error::BudgetExceeded(format!("more than {} search nodes (reached {nodes})", budget.max_nodes))
}

/// Optimum adapter count, given a known solution of size `upper`.
fn optimum_count(p: &Problem<'_>, upper: usize, opts: &MinimizeOptions) -> Result<(usize, u64)> {
    let mut order = p.candidates.clone();
    order.sort_by_key(|&a| (Reverse(p.fanout[a.index()]), a));
    let split = order.len().min(SPLIT_DEPTH);
    let prefixes: Vec<u32> = (0..1u32 << split).collect();
    let limit = opts.budget.max_nodes;
    let outcomes = exec::map(&prefixes, opts.parallel, |&bits| {
        let mut search = Search::new(p, &order, upper, false, limit);
        let mut n_included = 0;
        // Bit k set = include order[k]; low bit first matches include-first order.
        for (k, &a) in order[..split].iter().enumerate() {
            if bits >> (split - 1 - k) & 1 == 0 {
                search.included[a.index()] = true;
                n_included += 1;
            } else {
                search.active[a.index()] = false;
            }
        }
        let r = search.run(split, n_included, false, true);
        (r.is_ok(), search.nodes, search.best.map(|b| b.len()))
    });
    let nodes: u64 = outcomes.iter().map(|o| o.1).sum();
    if outcomes.iter().any(|o| !o.0) || nodes > limit {
        return Err(exceeded(nodes, &opts.budget));
    }
    let best = outcomes
        .iter()
        .filter_map(|o| o.2)
        .min()
        .map_or(upper, |b| b.min(upper));
    Ok((best, nodes))
}

/// Lexicographically least adapter set of size at most `k`, if any.
fn least_witness(p: &Problem<'_>, k: usize, limit: u64) -> std::result::Result<(Option<Vec<AdapterId>>, u64), u64> {
    let order = p.candidates.clone();
    let mut search = Search::new(p, &order, k + 1, true, limit);
    match search.run(0, 0, false, true) {
        Ok(()) => Ok((search.best, search.nodes)),
        Err(Exceeded) => Err(search.nodes),
    }
}

fn ids(g: &AdapterGraph, s: &str, t: &str) -> Result<(IfaceId, IfaceId)> {
    Ok((g.iface_id(s)?, g.iface_id(t)?))
}

/// Whether some sub-multigraph with at most `k` adapters covers every
/// target method the full graph covers.
pub fn minweb_decision(g: &AdapterGraph, source: &str, target: &str, k: usize) -> Result<bool> {
    minweb_decision_with(g, source, target, k, &MinimizeOptions::default()).map(|w| w.is_some())
}

/// Like [`minweb_decision`], returning the lexicographically least witness
/// found in name order.
pub fn minweb_decision_with(
    g: &AdapterGraph,
    source: &str,
    target: &str,
    k: usize,
    opts: &MinimizeOptions,
) -> Result<Option<Web>> {
    let (s, t) = ids(g, source, target)?;
    let p = Problem::new(g, s, t);
    p.check_size(&opts.budget)?;
    match least_witness(&p, k, opts.budget.max_nodes) {
        Ok((w, _)) => Ok(w.map(|a| p.result(a, true, 0).web)),
        Err(nodes) => Err(exceeded(nodes, &opts.budget)),
    }
}

pub fn min_web_exact(g: &AdapterGraph, source: &str, target: &str) -> Result<MinimizeResult> {
    min_web_exact_with(g, source, target, &MinimizeOptions::default())
}

pub fn min_web_exact_with(
    g: &AdapterGraph,
    source: &str,
    target: &str,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    let (s, t) = ids(g, source, target)?;
    exact_ids(g, s, t, opts)
}

fn exact_ids(g: &AdapterGraph, s: IfaceId, t: IfaceId, opts: &MinimizeOptions) -> Result<MinimizeResult> {
    let p = Problem::new(g, s, t);
    p.check_size(&opts.budget)?;
    let greedy = p.greedy();
    let (k, nodes) = optimum_count(&p, greedy.len(), opts)?;
    let remaining = opts.budget.max_nodes - nodes;
    match least_witness(&p, k, remaining) {
        Ok((Some(w), more)) => Ok(p.result(w, true, nodes + more)),
        Ok((None, _)) => unreachable!("a web of {k} adapters was found in the first phase"),
        Err(more) => Err(exceeded(nodes + more, &opts.budget)),
    }
}

/// Reverse-delete from the full web: heaviest adapters (most dependency
/// entries) first, ties by name. The result is irredundant.
pub fn min_web_greedy(g: &AdapterGraph, source: &str, target: &str) -> Result<MinimizeResult> {
    let (s, t) = ids(g, source, target)?;
    let p = Problem::new(g, s, t);
    let w = p.greedy();
    Ok(p.result(w, false, 0))
}

/// Adapters of `adapters` whose removal keeps the target coverage of the
/// full graph.
pub fn redundant_adapters(
    g: &AdapterGraph,
    source: &str,
    target: &str,
    adapters: &[AdapterId],
    parallel: bool,
) -> Result<Vec<AdapterId>> {
    let (s, t) = ids(g, source, target)?;
    let p = Problem::new(g, s, t);
    let base = p.mask(adapters);
    let removable = exec::map(adapters, parallel, |&a| {
        let mut m = base.clone();
        m[a.index()] = false;
        p.covers(&m)
    });
    Ok(adapters
        .iter()
        .zip(removable)
        .filter(|(_, r)| *r)
        .map(|(&a, _)| a)
        .collect())
}

/// Minimum web adapting the single method `method` of `target`, found by
/// restricting `target` to that method and minimizing.
pub fn min_adapters_single_method(
    g: &AdapterGraph,
    source: &str,
    target: &str,
    method: &str,
) -> Result<MinimizeResult> {
    min_adapters_single_method_with(g, source, target, method, &MinimizeOptions::default())
}

pub fn min_adapters_single_method_with(
    g: &AdapterGraph,
    source: &str,
    target: &str,
    method: &str,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    let (s, t) = ids(g, source, target)?;
    let m = g.method_id(target, method)?;
    if s == t {
        return Ok(MinimizeResult {
            web: Web {
                interfaces: vec![s],
                adapters: Vec::new(),
            },
            adapter_count: 0,
            exact: true,
            target_coverage: vec![m],
            acyclic: true,
            nodes: 0,
        });
    }
    let cover = cover_ids(g, s, t, &CoverOptions::default());
    if !cover.sat.get(m) {
        return Err(Error::NotAdaptable(g.method_ref(m)));
    }
    let restricted = g.restrict_interface(target, &[method])?;
    let r = exact_ids(
        &restricted,
        restricted.iface_id(source)?,
        restricted.iface_id(target)?,
        opts,
    )?;
    let back = |a: AdapterId| g.adapter_id(&restricted.adapter(a).name).expect("same adapter names");
    let backi = |i: IfaceId| g.iface_id(&restricted.interface(i).name).expect("same interface names");
    let mut adapters: Vec<_> = r.web.adapters.iter().map(|&a| back(a)).collect();
    adapters.sort_unstable();
    let mut interfaces: Vec<_> = r.web.interfaces.iter().map(|&i| backi(i)).collect();
    interfaces.sort_unstable();
    Ok(MinimizeResult {
        web: Web { interfaces, adapters },
        target_coverage: vec![m],
        ..r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{chain, diamond, diamond_with_shortcut};

    fn names(g: &AdapterGraph, r: &MinimizeResult) -> Vec<String> {
        r.web.adapter_names(g).into_iter().map(String::from).collect()
    }

    #[test]
    fn diamond_decision() {
        let g = diamond();
        assert!(minweb_decision(&g, "s", "t", 4).unwrap());
        assert!(!minweb_decision(&g, "s", "t", 3).unwrap());
        assert!(minweb_decision(&g, "s", "t", 9).unwrap());
    }

    #[test]
    fn chain_is_its_own_minimum() {
        let g = chain();
        let e = min_web_exact(&g, "s", "t").unwrap();
        assert_eq!((e.adapter_count, e.exact), (2, true));
        let gr = min_web_greedy(&g, "s", "t").unwrap();
        assert_eq!((gr.adapter_count, gr.exact), (2, false));
        assert_eq!(names(&g, &e), names(&g, &gr));
    }

    #[test]
    fn shortcut_is_used() {
        let g = diamond_with_shortcut();
        let e = min_web_exact(&g, "s", "t").unwrap();
        assert_eq!(names(&g, &e), vec!["A2", "A4", "A5"]);
        assert!(e.acyclic);
        let gr = min_web_greedy(&g, "s", "t").unwrap();
        assert!(gr.adapter_count >= e.adapter_count);
        assert!(redundant_adapters(&g, "s", "t", &gr.web.adapters, false)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn single_method() {
        let g = diamond();
        let r = min_adapters_single_method(&g, "s", "t", "x").unwrap();
        assert_eq!(names(&g, &r), vec!["A1", "A3"]);
        let r = min_adapters_single_method(&g, "s", "s", "a").unwrap();
        assert_eq!(r.adapter_count, 0);
        let g = diamond_with_shortcut();
        let r = min_adapters_single_method(&g, "s", "t", "x").unwrap();
        assert_eq!(names(&g, &r), vec!["A5"]);
    }

    #[test]
    fn single_method_not_adaptable() {
        let g = diamond();
        assert!(matches!(
            min_adapters_single_method(&g, "I1", "t", "y"),
            Err(Error::NotAdaptable(_))
        ));
    }

    #[test]
    fn budget_limits() {
        let g = diamond();
        let tight = MinimizeOptions {
            budget: SearchBudget {
                max_nodes: 1 << 20,
                max_adapters: 3,
            },
            parallel: false,
        };
        assert!(matches!(
            min_web_exact_with(&g, "s", "t", &tight),
            Err(Error::BudgetExceeded(_))
        ));
        let few_nodes = MinimizeOptions {
            budget: SearchBudget {
                max_nodes: 2,
                max_adapters: 25,
            },
            parallel: false,
        };
        assert!(matches!(
            minweb_decision_with(&g, "s", "t", 3, &few_nodes),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let g = diamond_with_shortcut();
        let seq = MinimizeOptions {
            parallel: false,
            ..Default::default()
        };
        let par = MinimizeOptions {
            parallel: true,
            ..Default::default()
        };
        assert_eq!(
            min_web_exact_with(&g, "s", "t", &seq).unwrap(),
            min_web_exact_with(&g, "s", "t", &par).unwrap()
        );
    }
}
