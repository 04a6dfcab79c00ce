//! Reference oracles for the acceptance suite.
//!
//! Each one answers a question the library also answers, by a separate and
//! deliberately naive route.

use std::collections::{BTreeMap, HashMap};

use adapter_web::model::Edge;
use adapter_web::{AdapterGraph, IfaceId, MethodId, OneInThreeInstance};

/// Methods of `e.target` available after one hop, given the methods
/// `avail` of `e.source` in declared order.
fn hop(g: &AdapterGraph, e: &Edge, avail: &[bool]) -> Vec<bool> {
    let src_methods: Vec<MethodId> = g.methods_of(e.source).collect();
    g.methods_of(e.target)
        .map(|m| {
            e.row_for(m).is_some_and(|row| {
                row.requires
                    .iter()
                    .all(|r| avail[src_methods.iter().position(|x| x == r).unwrap()])
            })
        })
        .collect()
}

/// Coverage at `t` of every directed adapter chain from `s` with at most
/// `max_len` hops, mapped to the number of chains producing it.
///
/// Chains reaching the same interface with the same available methods
/// behave identically from there on, so they are grouped per length rather
/// than walked one by one.
pub fn chain_coverages(g: &AdapterGraph, s: IfaceId, t: IfaceId, max_len: usize) -> BTreeMap<Vec<bool>, u64> {
    let mut layer: BTreeMap<(IfaceId, Vec<bool>), u64> = BTreeMap::new();
    layer.insert((s, vec![true; g.interface(s).methods.len()]), 1);
    let mut out = BTreeMap::new();
    for _ in 0..max_len {
        let mut next: BTreeMap<(IfaceId, Vec<bool>), u64> = BTreeMap::new();
        for ((at, avail), n) in &layer {
            for (_, e) in g.edges().filter(|(_, e)| e.source == *at) {
                *next.entry((e.target, hop(g, e, avail))).or_default() += n;
            }
        }
        for ((at, avail), n) in &next {
            if *at == t {
                *out.entry(avail.clone()).or_default() += n;
            }
        }
        layer = next;
    }
    out
}

/// Whether `method` has a derivation from `source` in which no interface
/// repeats along any root-to-leaf path, trying every adapter at every level.
pub fn simple_derivation_exists(g: &AdapterGraph, source: IfaceId, method: MethodId) -> bool {
    fn go(
        g: &AdapterGraph,
        source: IfaceId,
        m: MethodId,
        visited: u64,
        memo: &mut HashMap<(MethodId, u64), bool>,
    ) -> bool {
        if let Some(&v) = memo.get(&(m, visited)) {
            return v;
        }
        let owner = g.method_owner(m);
        let ok = g.edges().any(|(_, e)| {
            e.target == owner
                && e.row_for(m).is_some_and(|row| {
                    let bit = 1u64 << e.source.0;
                    e.source == source
                        || (visited & bit == 0 && row.requires.iter().all(|&r| go(g, source, r, visited | bit, memo)))
                })
        });
        memo.insert((m, visited), ok);
        ok
    }
    assert!(g.interface_count() <= 64, "visited sets are 64-bit masks");
    let owner = g.method_owner(method);
    owner == source || go(g, source, method, 1 << owner.0, &mut HashMap::new())
}

/// Ordinary satisfiability: some assignment makes at least one literal
/// true in every clause.
pub fn at_least_one_sat(inst: &OneInThreeInstance) -> bool {
    adapter_web::reduce3sat::assignments(inst.vars).any(|a| satisfies_every_clause(inst, &a))
}

pub fn satisfies_every_clause(inst: &OneInThreeInstance, assignment: &[bool]) -> bool {
    inst.clauses.iter().all(|c| c.iter().any(|l| l.holds(assignment)))
}
