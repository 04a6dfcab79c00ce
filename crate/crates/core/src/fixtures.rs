//! Small named graphs used throughout tests, benches and documentation.

use crate::model::{AdapterDef, AdapterGraph, InterfaceDef};

/// `s=[a,b] -> I1=[a] -> t=[x]` and `s -> I2=[b] -> t=[y]`; neither chain
/// alone covers both target methods.
pub fn diamond() -> AdapterGraph {
    AdapterGraph::from_parts(
        vec![
            InterfaceDef::new("s", ["a", "b"]),
            InterfaceDef::new("I1", ["a"]),
            InterfaceDef::new("I2", ["b"]),
            InterfaceDef::new("t", ["x", "y"]),
        ],
        vec![
            AdapterDef::new("A1", "s", "I1").provide("a", ["a"]),
            AdapterDef::new("A2", "s", "I2").provide("b", ["b"]),
            AdapterDef::new("A3", "I1", "t").provide("x", ["a"]),
            AdapterDef::new("A4", "I2", "t").provide("y", ["b"]),
        ],
    )
    .expect("diamond is well formed")
}

/// [`diamond`] plus a redundant direct adapter `A5: s -> t` providing `x`.
pub fn diamond_with_shortcut() -> AdapterGraph {
    let mut def = diamond().to_def();
    def.adapters.push(AdapterDef::new("A5", "s", "t").provide("x", ["a"]));
    AdapterGraph::new(def).expect("diamond with shortcut is well formed")
}

/// Identity chain `s -> i1 -> t` over methods `[a, b]`.
pub fn chain() -> AdapterGraph {
    AdapterGraph::from_parts(
        vec![
            InterfaceDef::new("s", ["a", "b"]),
            InterfaceDef::new("i1", ["a", "b"]),
            InterfaceDef::new("t", ["a", "b"]),
        ],
        vec![
            AdapterDef::new("C1", "s", "i1").provide("a", ["a"]).provide("b", ["b"]),
            AdapterDef::new("C2", "i1", "t").provide("a", ["a"]).provide("b", ["b"]),
        ],
    )
    .expect("chain is well formed")
}
