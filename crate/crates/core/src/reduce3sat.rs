//! One-in-three 3SAT instances and their adapter-graph encoding.
//!
//! The encoding chains one interface per variable off a source interface.
//! Every interface in the chain carries a method for each of the `2v`
//! literals. Each link has a true adapter and a false adapter: the true
//! adapter into variable `k` passes `xk` through and omits `not_xk`, the
//! false adapter does the opposite, and both pass every other literal
//! through unchanged. From the last variable interface, each clause gets
//! one interface with a single method `sat`, reachable through three
//! adapters (one per literal position), and one adapter from there to the
//! target interface, whose methods are the clauses.
//!
//! Naming: interfaces `source`, `var{k}`, `clause{j}`, `target`; literal
//! methods `x{k}` and `not_x{k}`; adapters `var{k}_true`, `var{k}_false`,
//! `clause{j}_lit{p}` (p = 1..3) and `clause{j}_out`.
//!
//! An assignment that makes at least one literal true in every clause
//! yields a web of `v + 2c` adapters, and any web of that size selects one
//! truth adapter per link.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AdapterDef, AdapterGraph, InterfaceDef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn from_dimacs(n: i64) -> Option<Self> {
        (n != 0).then(|| Literal {
            var: n.unsigned_abs() as usize,
            positive: n > 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] == self.positive
    }

    pub fn method_name(self) -> String {
        if self.positive {
            format!("x{}", self.var)
        } else {
            format!("not_x{}", self.var)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "¬x{}", self.var)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneInThreeInstance {
    pub vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl OneInThreeInstance {
    pub fn new(vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        let inst = Self { vars, clauses };
        inst.validate()?;
        Ok(inst)
    }

    /// Builds an instance from signed literals (`-2` is `¬x2`).
    pub fn from_dimacs(vars: usize, clauses: &[[i64; 3]]) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut lits = [Literal { var: 0, positive: true }; 3];
            for (slot, &n) in lits.iter_mut().zip(c) {
                *slot = Literal::from_dimacs(n).ok_or_else(|| Error::InvalidInstance("literal 0".into()))?;
            }
            out.push(lits);
        }
        Self::new(vars, out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.clauses.is_empty() {
            return Err(Error::InvalidInstance("no clauses".into()));
        }
        for (j, c) in self.clauses.iter().enumerate() {
            for l in c {
                if l.var == 0 || l.var > self.vars {
                    return Err(Error::InvalidInstance(format!(
                        "clause {} references variable {} outside 1..={}",
                        j + 1,
                        l.var,
                        self.vars
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exactly one true literal per clause.
    pub fn is_one_in_three(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.vars
            && self
                .clauses
                .iter()
                .all(|c| c.iter().filter(|l| l.holds(assignment)).count() == 1)
    }

    /// Parses one clause per line, three whitespace-separated nonzero signed
    /// integers. Blank lines are skipped; the variable count is the largest
    /// index mentioned.
    pub fn parse(text: &str) -> Result<Self> {
        let mut clauses = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<i64> = line
                .split_whitespace()
                .map(|w| w.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?;
            let [a, b, c] = nums[..] else {
                return Err(Error::Parse(format!(
                    "line {}: expected 3 literals, found {}",
                    ln + 1,
                    nums.len()
                )));
            };
            if nums.contains(&0) {
                return Err(Error::Parse(format!("line {}: literal 0", ln + 1)));
            }
            clauses.push([a, b, c]);
        }
        let vars = clauses
            .iter()
            .flatten()
            .map(|n| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        Self::from_dimacs(vars, &clauses)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.clauses {
            let line: Vec<String> = c.iter().map(|l| l.to_dimacs().to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct ReductionArtifact {
    pub instance: OneInThreeInstance,
    pub graph: AdapterGraph,
    pub source: String,
    pub target: String,
    pub literal_methods: BTreeMap<Literal, String>,
    /// `(variable, value)` to the adapter into that variable's interface.
    pub truth_adapters: BTreeMap<(usize, bool), String>,
    /// `(clause, position)`, both 1-based, to the clause adapter.
    pub clause_adapters: BTreeMap<(usize, usize), String>,
    /// Clause (1-based) to the adapter into the target.
    pub output_adapters: BTreeMap<usize, String>,
}

impl ReductionArtifact {
    /// The bound `v + 2c`.
    pub fn bound(&self) -> usize {
        self.instance.vars + 2 * self.instance.clauses.len()
    }
}

fn var_iface(k: usize) -> String {
    format!("var{k}")
}

pub fn generate_reduction(inst: &OneInThreeInstance) -> Result<ReductionArtifact> {
    inst.validate()?;
    let v = inst.vars;
    let literals: Vec<Literal> = (1..=v)
        .flat_map(|var| [true, false].map(|positive| Literal { var, positive }))
        .collect();
    let literal_methods: BTreeMap<Literal, String> = literals.iter().map(|&l| (l, l.method_name())).collect();
    let literal_names: Vec<String> = literals.iter().map(|l| l.method_name()).collect();

    let mut interfaces = vec![InterfaceDef::new("source", literal_names.clone())];
    interfaces.extend((1..=v).map(|k| InterfaceDef::new(var_iface(k), literal_names.clone())));
    let mut adapters = Vec::new();
    let mut truth_adapters = BTreeMap::new();
    for k in 1..=v {
        let from = if k == 1 { "source".to_string() } else { var_iface(k - 1) };
        for value in [true, false] {
            let name = format!("var{k}_{value}");
            let mut a = AdapterDef::new(&name, &from, var_iface(k));
            for &l in &literals {
                if l.var == k && l.positive != value {
                    continue;
                }
                a = a.provide(l.method_name(), [l.method_name()]);
            }
            adapters.push(a);
            truth_adapters.insert((k, value), name);
        }
    }

    let sink = var_iface(v);
    let mut clause_adapters = BTreeMap::new();
    let mut output_adapters = BTreeMap::new();
    let mut target_methods = Vec::new();
    for (j, clause) in inst.clauses.iter().enumerate() {
        let j = j + 1;
        let iface = format!("clause{j}");
        interfaces.push(InterfaceDef::new(&iface, ["sat"]));
        for (p, l) in clause.iter().enumerate() {
            let name = format!("clause{j}_lit{}", p + 1);
            adapters.push(AdapterDef::new(&name, &sink, &iface).provide("sat", [l.method_name()]));
            clause_adapters.insert((j, p + 1), name);
        }
        let out = format!("clause{j}_out");
        adapters.push(AdapterDef::new(&out, &iface, "target").provide(&iface, ["sat"]));
        output_adapters.insert(j, out);
        target_methods.push(iface);
    }
    interfaces.push(InterfaceDef::new("target", target_methods));

    let graph = AdapterGraph::from_parts(interfaces, adapters)?;
    Ok(ReductionArtifact {
        instance: inst.clone(),
        graph,
        source: "source".into(),
        target: "target".into(),
        literal_methods,
        truth_adapters,
        clause_adapters,
        output_adapters,
    })
}

/// Largest variable count the brute-force oracle will enumerate.
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// All `2^v` assignments, in the order the oracle visits them: `true`
/// before `false`, `x1` most significant.
pub fn assignments(vars: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << vars).map(move |idx| (1..=vars).map(|k| (idx >> (vars - k)) & 1 == 0).collect())
}

/// First assignment, in [`assignments`] order, with exactly one true literal
/// in every clause.
pub fn one_in_three_brute_force(inst: &OneInThreeInstance) -> Result<Option<Vec<bool>>> {
    inst.validate()?;
    if inst.vars > BRUTE_FORCE_MAX_VARS {
        return Err(Error::BudgetExceeded(format!(
            "{} variables exceed the brute-force limit of {BRUTE_FORCE_MAX_VARS}",
            inst.vars
        )));
    }
    Ok(assignments(inst.vars).find(|a| inst.is_one_in_three(a)))
}

/// The assignment selected by a web containing exactly one truth adapter
/// per variable link, or `None`.
pub fn extract_assignment<'a>(
    art: &ReductionArtifact,
    web_adapters: impl IntoIterator<Item = &'a str>,
) -> Option<Vec<bool>> {
    let names: Vec<&str> = web_adapters.into_iter().collect();
    (1..=art.instance.vars)
        .map(|k| {
            let t = names.contains(&art.truth_adapters[&(k, true)].as_str());
            let f = names.contains(&art.truth_adapters[&(k, false)].as_str());
            match (t, f) {
                (true, false) => Some(true),
                (false, true) => Some(false),
                _ => None,
            }
        })
        .collect()
}

/// Adapters of the web induced by `assignment`: the truth path, the first
/// clause adapter whose literal holds, and every output adapter. `None` if
/// some clause has no true literal.
pub fn witness_from_assignment(art: &ReductionArtifact, assignment: &[bool]) -> Option<Vec<String>> {
    let mut out: Vec<String> = (1..=art.instance.vars)
        .map(|k| art.truth_adapters[&(k, assignment[k - 1])].clone())
        .collect();
    for (j, clause) in art.instance.clauses.iter().enumerate() {
        let p = clause.iter().position(|l| l.holds(assignment))?;
        out.push(art.clause_adapters[&(j + 1, p + 1)].clone());
        out.push(art.output_adapters[&(j + 1)].clone());
    }
    out.sort();
    Some(out)
}
