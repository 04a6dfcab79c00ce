//! Seeded generators for random adapter graphs and one-in-three instances.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::model::{AdapterDef, AdapterGraph, InterfaceDef};
use crate::reduce3sat::{Literal, OneInThreeInstance};

#[derive(Clone, Copy, Debug)]
pub struct GraphParams {
    pub max_interfaces: usize,
    pub max_methods: usize,
    pub max_adapters: usize,
    /// Upper limit on the size of one requirement set.
    pub max_requires: usize,
    /// Chance that an adapter provides any given target method.
    pub provide_prob: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            max_interfaces: 15,
            max_methods: 6,
            max_adapters: 40,
            max_requires: 3,
            provide_prob: 0.5,
        }
    }
}

/// A random valid graph plus a source and a target interface (distinct).
#[derive(Clone, Debug)]
pub struct RandomGraph {
    pub graph: AdapterGraph,
    pub source: String,
    pub target: String,
}

pub fn iface_name(k: usize) -> String {
    format!("i{k:02}")
}

pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, p: &GraphParams) -> RandomGraph {
    let n = rng.random_range(2..=p.max_interfaces.max(2));
    let sizes: Vec<usize> = (0..n).map(|_| rng.random_range(1..=p.max_methods.max(1))).collect();
    let n_adapters = rng.random_range(0..=p.max_adapters);
    graph_with(rng, &sizes, n_adapters, p)
}

/// Random graph with exactly `total_methods` methods spread over interfaces
/// of `methods_per_interface` methods, and `adapters_per_interface`
/// adapters per interface.
pub fn random_graph_sized<R: Rng + ?Sized>(
    rng: &mut R,
    total_methods: usize,
    methods_per_interface: usize,
    adapters_per_interface: usize,
) -> RandomGraph {
    let mut sizes = Vec::new();
    let mut left = total_methods;
    while left > 0 {
        let k = methods_per_interface.min(left);
        sizes.push(k);
        left -= k;
    }
    if sizes.len() < 2 {
        sizes.push(1);
    }
    let p = GraphParams {
        max_methods: methods_per_interface,
        ..GraphParams::default()
    };
    let n_adapters = sizes.len() * adapters_per_interface;
    graph_with(rng, &sizes, n_adapters, &p)
}

fn graph_with<R: Rng + ?Sized>(rng: &mut R, sizes: &[usize], n_adapters: usize, p: &GraphParams) -> RandomGraph {
    let n = sizes.len();
    let interfaces: Vec<InterfaceDef> = sizes
        .iter()
        .enumerate()
        .map(|(k, &m)| InterfaceDef::new(iface_name(k), (0..m).map(|q| format!("m{q}"))))
        .collect();
    let mut adapters = Vec::with_capacity(n_adapters);
    for a in 0..n_adapters {
        let src = rng.random_range(0..n);
        let mut dst = rng.random_range(0..n - 1);
        if dst >= src {
            dst += 1;
        }
        let mut def = AdapterDef::new(format!("a{a:03}"), iface_name(src), iface_name(dst));
        let src_methods = &interfaces[src].methods;
        for j in &interfaces[dst].methods {
            if !rng.random_bool(p.provide_prob) {
                continue;
            }
            let k = rng.random_range(1..=p.max_requires.min(src_methods.len()).max(1));
            let reqs: Vec<&String> = src_methods.choose_multiple(rng, k).collect();
            def = def.provide(j.clone(), reqs.into_iter().cloned());
        }
        adapters.push(def);
    }
    let s = rng.random_range(0..n);
    let mut t = rng.random_range(0..n - 1);
    if t >= s {
        t += 1;
    }
    RandomGraph {
        graph: AdapterGraph::from_parts(interfaces, adapters).expect("generator emits valid graphs"),
        source: iface_name(s),
        target: iface_name(t),
    }
}

pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, vars: usize, clauses: usize) -> OneInThreeInstance {
    let clauses = (0..clauses)
        .map(|_| {
            [(); 3].map(|_| Literal {
                var: rng.random_range(1..=vars),
                positive: rng.random_bool(0.5),
            })
        })
        .collect();
    OneInThreeInstance::new(vars, clauses).expect("generator emits valid instances")
}
