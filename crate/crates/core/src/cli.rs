//! Command line front end.
//!
//! Every subcommand writes one machine-readable document to stdout and
//! human diagnostics to stderr. Exit status: 0 success, 1 domain negative
//! (method not adaptable, decision false, instance unsatisfiable), 2 bad
//! input, 3 exact-search budget exceeded.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adapt::{self, AdaptOptions, ByName, FewestDependencies, FirstViable, Seeded, SelectionPolicy};
use crate::cover::{self, is_acyclic, CoverOptions, SubgraphMode};
use crate::document::{parse_graph, serialize_graph};
use crate::dot::{export_dot, Overlay};
use crate::error::{Error, Result};
use crate::minimize::{self, MinimizeOptions, MinimizeResult, SearchBudget};
use crate::model::{validate_graph, AdapterGraph, GraphDef, MethodId, Violation};
use crate::reduce3sat::{self, OneInThreeInstance};

#[derive(Debug, Parser)]
#[command(name = "adapter-web", version, about = "Webs of lossy interface adapters")]
pub struct Cli {
    /// Seed for randomized selection policies.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    FirstViable,
    FewestDeps,
    Name,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OverlayArg {
    Cover,
    Exact,
    Greedy,
}

#[derive(Debug, clap::Args)]
pub struct Endpoints {
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub target: String,
}

#[derive(Debug, clap::Args)]
pub struct BudgetArgs {
    /// Maximum search-tree nodes for exact search.
    #[arg(long, default_value_t = SearchBudget::default().max_nodes)]
    pub budget: u64,
    /// Maximum candidate adapters for exact search.
    #[arg(long, default_value_t = SearchBudget::default().max_adapters)]
    pub max_adapters: usize,
    /// Run the exact search on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl BudgetArgs {
    fn options(&self) -> MinimizeOptions {
        MinimizeOptions {
            budget: SearchBudget {
                max_nodes: self.budget,
                max_adapters: self.max_adapters,
            },
            parallel: !self.sequential && crate::exec::PARALLEL_AVAILABLE,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a graph document against every model invariant.
    Validate { graph: PathBuf },
    /// Propagate satisfiability and extract the maximally covering web.
    Cover {
        graph: PathBuf,
        #[command(flatten)]
        ends: Endpoints,
        /// Keep only first-viable adapters in the web.
        #[arg(long)]
        pruned: bool,
    },
    /// Plan the adaptation of one target method.
    Adapt {
        graph: PathBuf,
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long)]
        method: String,
        #[arg(long, value_enum, default_value = "first-viable")]
        policy: PolicyArg,
        /// Commit to the policy's first choice instead of backtracking on dead ends.
        #[arg(long)]
        no_backtrack: bool,
    },
    /// Minimize the number of adapters in a maximally covering web.
    Minimize {
        graph: PathBuf,
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long, conflicts_with = "greedy")]
        exact: bool,
        #[arg(long)]
        greedy: bool,
        /// Minimize for this single target method only.
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Decide whether a maximally covering web with at most K adapters exists.
    Decide {
        graph: PathBuf,
        #[command(flatten)]
        ends: Endpoints,
        #[arg(short = 'K', long = "bound")]
        k: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Encode a one-in-three 3SAT instance as an adapter graph.
    Reduce {
        cnf: PathBuf,
        /// Emit only the graph document.
        #[arg(long)]
        graph_only: bool,
    },
    /// Brute-force one-in-three satisfiability.
    Oracle { cnf: PathBuf },
    /// Render the graph as Graphviz DOT.
    Dot {
        graph: PathBuf,
        #[arg(long, value_enum, requires = "source", requires = "target")]
        overlay: Option<OverlayArg>,
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        target: Option<String>,
    },
}

enum Output {
    Json(serde_json::Value),
    Text(String),
}

/// Result of one command: payload plus exit status.
struct Outcome {
    out: Output,
    status: i32,
}

impl Outcome {
    fn ok(value: impl Serialize) -> Self {
        Self::with_status(value, 0)
    }

    fn with_status(value: impl Serialize, status: i32) -> Self {
        Outcome {
            out: Output::Json(serde_json::to_value(value).expect("outputs serialize")),
            status,
        }
    }
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<Violation>,
}

/// Parses `argv` (including the program name) and runs the command. A
/// path of `-` reads from `stdin`.
pub fn run_command<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if status == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return status;
        }
    };
    match execute(&cli, stdin) {
        Ok(Outcome { out, status }) => {
            write_output(stdout, &out);
            status
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let violations = match &e {
                Error::Validation(v) => {
                    for v in v {
                        let _ = writeln!(stderr, "  {v}");
                    }
                    v.clone()
                }
                _ => Vec::new(),
            };
            let payload = ErrorOut {
                error: e.code(),
                message: e.to_string(),
                violations,
            };
            write_output(
                stdout,
                &Output::Json(serde_json::to_value(payload).expect("serializes")),
            );
            e.exit_code()
        }
    }
}

fn write_output(w: &mut dyn Write, out: &Output) {
    let text = match out {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
            s.push('\n');
            s
        }
        Output::Text(s) => s.clone(),
    };
    let _ = w.write_all(text.as_bytes());
}

fn read_input(path: &Path, stdin: &mut dyn Read) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_graph(path: &Path, stdin: &mut dyn Read) -> Result<AdapterGraph> {
    parse_graph(&read_input(path, stdin)?)
}

fn load_instance(path: &Path, stdin: &mut dyn Read) -> Result<OneInThreeInstance> {
    OneInThreeInstance::parse(&read_input(path, stdin)?)
}

#[derive(Serialize)]
struct InterfaceSat {
    interface: String,
    satisfiable: Vec<String>,
    unsatisfiable: Vec<String>,
}

#[derive(Serialize)]
struct ViableOut {
    interface: String,
    method: String,
    adapters: Vec<String>,
    first_viable: Option<String>,
}

#[derive(Serialize)]
struct WebOut {
    interfaces: Vec<String>,
    adapters: Vec<String>,
    acyclic: bool,
}

#[derive(Serialize)]
struct CoverOut {
    source: String,
    target: String,
    covered: Vec<String>,
    lost: Vec<String>,
    web: WebOut,
    satisfiability: Vec<InterfaceSat>,
    viable: Vec<ViableOut>,
}

#[derive(Serialize)]
struct StepOut {
    adapter: String,
    interface: String,
    method: String,
    uses: Vec<usize>,
}

#[derive(Serialize)]
struct PlanOut {
    interface: String,
    method: String,
    depth: usize,
    adapters: Vec<String>,
    steps: Vec<StepOut>,
}

#[derive(Serialize)]
struct MinimizeOut {
    exact: bool,
    adapter_count: usize,
    adapters: Vec<String>,
    interfaces: Vec<String>,
    target_coverage: Vec<String>,
    acyclic: bool,
    search_nodes: u64,
}

#[derive(Serialize)]
struct AssignmentOut {
    variable: usize,
    value: bool,
}

#[derive(Serialize)]
struct OracleOut {
    satisfiable: bool,
    assignment: Option<Vec<AssignmentOut>>,
}

#[derive(Serialize)]
struct LiteralOut {
    literal: i64,
    method: String,
}

#[derive(Serialize)]
struct TruthOut {
    variable: usize,
    value: bool,
    adapter: String,
}

#[derive(Serialize)]
struct ClauseAdapterOut {
    clause: usize,
    position: usize,
    literal: i64,
    adapter: String,
}

#[derive(Serialize)]
struct ReduceMeta {
    source: String,
    target: String,
    variables: usize,
    clauses: usize,
    bound: usize,
    literal_methods: Vec<LiteralOut>,
    truth_adapters: Vec<TruthOut>,
    clause_adapters: Vec<ClauseAdapterOut>,
    output_adapters: Vec<String>,
}

#[derive(Serialize)]
struct ReduceOut {
    metadata: ReduceMeta,
    graph: GraphDef,
}

#[derive(Serialize)]
struct ValidateOut {
    valid: bool,
    violations: Vec<Violation>,
}

fn method_names(g: &AdapterGraph, ms: impl IntoIterator<Item = MethodId>) -> Vec<String> {
    ms.into_iter().map(|m| g.method_name(m).to_string()).collect()
}

fn minimize_out(g: &AdapterGraph, r: &MinimizeResult) -> MinimizeOut {
    MinimizeOut {
        exact: r.exact,
        adapter_count: r.adapter_count,
        adapters: r.web.adapter_names(g).into_iter().map(String::from).collect(),
        interfaces: r.web.interface_names(g).into_iter().map(String::from).collect(),
        target_coverage: method_names(g, r.target_coverage.iter().copied()),
        acyclic: r.acyclic,
        search_nodes: r.nodes,
    }
}

fn policy(arg: PolicyArg, seed: u64) -> Box<dyn SelectionPolicy> {
    match arg {
        PolicyArg::FirstViable => Box::new(FirstViable),
        PolicyArg::FewestDeps => Box::new(FewestDependencies),
        PolicyArg::Name => Box::new(ByName),
        PolicyArg::Random => Box::new(Seeded(seed)),
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome> {
    match &cli.command {
        Command::Validate { graph } => {
            let text = read_input(graph, stdin)?;
            let def: GraphDef = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
            let violations = validate_graph(&def);
            if violations.is_empty() {
                Ok(Outcome::ok(ValidateOut {
                    valid: true,
                    violations,
                }))
            } else {
                Err(Error::Validation(violations))
            }
        }
        Command::Cover { graph, ends, pruned } => {
            let g = load_graph(graph, stdin)?;
            let opts = CoverOptions {
                mode: if *pruned {
                    SubgraphMode::FirstViable
                } else {
                    SubgraphMode::Verbatim
                },
                shuffle_seed: None,
            };
            let r = cover::maximal_cover_with(&g, &ends.source, &ends.target, &opts)?;
            let cov = crate::model::coverage_loss(&g, &r.sat, &ends.target)?;
            let satisfiability = g
                .interface_ids()
                .map(|i| {
                    let (yes, no): (Vec<_>, Vec<_>) = g.methods_of(i).partition(|&m| r.sat.get(m));
                    InterfaceSat {
                        interface: g.interface(i).name.clone(),
                        satisfiable: method_names(&g, yes),
                        unsatisfiable: method_names(&g, no),
                    }
                })
                .collect();
            let viable = (0..g.total_method_count())
                .map(|k| MethodId(k as u32))
                .filter(|&m| !r.viable(m).is_empty())
                .map(|m| ViableOut {
                    interface: g.interface(g.method_owner(m)).name.clone(),
                    method: g.method_name(m).to_string(),
                    adapters: r.viable(m).iter().map(|&a| g.adapter(a).name.clone()).collect(),
                    first_viable: r.first_viable(m).map(|a| g.adapter(a).name.clone()),
                })
                .collect();
            Ok(Outcome::ok(CoverOut {
                source: ends.source.clone(),
                target: ends.target.clone(),
                covered: cov.covered,
                lost: cov.lost,
                web: WebOut {
                    interfaces: r.web.interface_names(&g).into_iter().map(String::from).collect(),
                    adapters: r.web.adapter_names(&g).into_iter().map(String::from).collect(),
                    acyclic: is_acyclic(&g, &r.web.adapters),
                },
                satisfiability,
                viable,
            }))
        }
        Command::Adapt {
            graph,
            ends,
            method,
            policy: p,
            no_backtrack,
        } => {
            let g = load_graph(graph, stdin)?;
            let r = cover::maximal_cover(&g, &ends.source, &ends.target)?;
            let pol = policy(*p, cli.seed);
            let plan = adapt::adapt_method_with(
                &r,
                &g,
                method,
                pol.as_ref(),
                AdaptOptions {
                    backtrack: !*no_backtrack,
                },
            )?;
            let steps = plan
                .steps
                .iter()
                .map(|s| StepOut {
                    adapter: g.adapter(s.adapter).name.clone(),
                    interface: g.interface(g.method_owner(s.method)).name.clone(),
                    method: g.method_name(s.method).to_string(),
                    uses: s.uses.clone(),
                })
                .collect();
            Ok(Outcome::ok(PlanOut {
                interface: ends.target.clone(),
                method: method.clone(),
                depth: plan.depth(),
                adapters: plan
                    .distinct_adapters()
                    .iter()
                    .map(|&a| g.adapter(a).name.clone())
                    .collect(),
                steps,
            }))
        }
        Command::Minimize {
            graph,
            ends,
            exact: _,
            greedy,
            method,
            budget,
        } => {
            let g = load_graph(graph, stdin)?;
            let opts = budget.options();
            let r = match (method, greedy) {
                (Some(m), _) => minimize::min_adapters_single_method_with(&g, &ends.source, &ends.target, m, &opts)?,
                (None, true) => minimize::min_web_greedy(&g, &ends.source, &ends.target)?,
                (None, false) => minimize::min_web_exact_with(&g, &ends.source, &ends.target, &opts)?,
            };
            Ok(Outcome::ok(minimize_out(&g, &r)))
        }
        Command::Decide { graph, ends, k, budget } => {
            let g = load_graph(graph, stdin)?;
            let w = minimize::minweb_decision_with(&g, &ends.source, &ends.target, *k, &budget.options())?;
            Ok(Outcome::with_status(w.is_some(), if w.is_some() { 0 } else { 1 }))
        }
        Command::Reduce { cnf, graph_only } => {
            let inst = load_instance(cnf, stdin)?;
            let art = reduce3sat::generate_reduction(&inst)?;
            if *graph_only {
                return Ok(Outcome {
                    out: Output::Text(serialize_graph(&art.graph)),
                    status: 0,
                });
            }
            let metadata = ReduceMeta {
                source: art.source.clone(),
                target: art.target.clone(),
                variables: inst.vars,
                clauses: inst.clauses.len(),
                bound: art.bound(),
                literal_methods: art
                    .literal_methods
                    .iter()
                    .map(|(l, m)| LiteralOut {
                        literal: l.to_dimacs(),
                        method: m.clone(),
                    })
                    .collect(),
                truth_adapters: art
                    .truth_adapters
                    .iter()
                    .map(|(&(variable, value), a)| TruthOut {
                        variable,
                        value,
                        adapter: a.clone(),
                    })
                    .collect(),
                clause_adapters: art
                    .clause_adapters
                    .iter()
                    .map(|(&(clause, position), a)| ClauseAdapterOut {
                        clause,
                        position,
                        literal: inst.clauses[clause - 1][position - 1].to_dimacs(),
                        adapter: a.clone(),
                    })
                    .collect(),
                output_adapters: art.output_adapters.values().cloned().collect(),
            };
            Ok(Outcome::ok(ReduceOut {
                metadata,
                graph: art.graph.to_def(),
            }))
        }
        Command::Oracle { cnf } => {
            let inst = load_instance(cnf, stdin)?;
            let model = reduce3sat::one_in_three_brute_force(&inst)?;
            let status = if model.is_some() { 0 } else { 1 };
            Ok(Outcome::with_status(
                OracleOut {
                    satisfiable: model.is_some(),
                    assignment: model.map(|a| {
                        a.into_iter()
                            .enumerate()
                            .map(|(k, value)| AssignmentOut { variable: k + 1, value })
                            .collect()
                    }),
                },
                status,
            ))
        }
        Command::Dot {
            graph,
            overlay,
            source,
            target,
        } => {
            let g = load_graph(graph, stdin)?;
            let ov = match (overlay, source, target) {
                (Some(kind), Some(s), Some(t)) => Some(match kind {
                    OverlayArg::Cover => Overlay::from_cover(&g, &cover::maximal_cover(&g, s, t)?),
                    OverlayArg::Exact => {
                        Overlay::from_minimize(&g, g.iface_id(s)?, g.iface_id(t)?, &minimize::min_web_exact(&g, s, t)?)
                    }
                    OverlayArg::Greedy => {
                        Overlay::from_minimize(&g, g.iface_id(s)?, g.iface_id(t)?, &minimize::min_web_greedy(&g, s, t)?)
                    }
                }),
                _ => None,
            };
            Ok(Outcome {
                out: Output::Text(export_dot(&g, ov.as_ref())),
                status: 0,
            })
        }
    }
}
