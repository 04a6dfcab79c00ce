//! Maximally covering webs of lossy interface adapters.
//!
//! An interface adapter graph has interfaces as nodes and adapters as
//! directed edges. Each adapter carries a method dependency matrix saying
//! which source methods every target method needs. Using different
//! adapters for different methods of the same interface, a web of adapters
//! can cover every target method that is adaptable at all.
//!
//! - [`model`]: graph data model, validation and loss accounting.
//! - [`cover`]: satisfiability propagation and web extraction.
//! - [`adapt`]: per-method adaptation plans.
//! - [`minimize`]: exact and greedy minimization of the web.
//! - [`reduce3sat`]: one-in-three 3SAT instances and their graph encoding.
//! - [`document`], [`dot`], [`cli`]: file formats and the command line tool.

pub mod adapt;
pub mod cli;
pub mod cover;
pub mod document;
pub mod dot;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod minimize;
pub mod model;
pub mod random;
pub mod reduce3sat;

pub use adapt::{adapt_method, adapt_method_with, verify_plan, AdaptOptions, AdaptationPlan, SelectionPolicy};
pub use cover::{cover_setup, cover_subgraph, maximal_cover, maximal_cover_with, saturate_oracle, CoverResult, Web};
pub use error::{Error, Result};
pub use minimize::{
    min_adapters_single_method, min_adapters_single_method_with, min_web_exact, min_web_exact_with, min_web_greedy,
    minweb_decision, minweb_decision_with, MinimizeOptions, MinimizeResult, SearchBudget,
};
pub use model::{
    coverage_loss, total_method_count, validate_graph, AdapterDef, AdapterGraph, AdapterId, GraphDef, IfaceId,
    InterfaceDef, MethodId, MethodRef, SatMap,
};
pub use reduce3sat::{extract_assignment, generate_reduction, one_in_three_brute_force, OneInThreeInstance};
