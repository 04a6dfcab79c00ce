//! Graphviz DOT rendering.

use std::fmt::Write;

use crate::cover::{CoverResult, Web};
use crate::minimize::MinimizeResult;
use crate::model::{AdapterGraph, IfaceId, MethodId};

/// What to highlight on top of the plain graph.
#[derive(Clone, Debug, Default)]
pub struct Overlay {
    pub web: Web,
    pub source: Option<IfaceId>,
    pub target: Option<IfaceId>,
    pub lost: Vec<MethodId>,
}

impl Overlay {
    pub fn from_cover(g: &AdapterGraph, cover: &CoverResult) -> Self {
        Self {
            web: cover.web.clone(),
            source: Some(cover.source),
            target: Some(cover.target),
            lost: g.methods_of(cover.target).filter(|&m| !cover.sat.get(m)).collect(),
        }
    }

    pub fn from_minimize(g: &AdapterGraph, source: IfaceId, target: IfaceId, r: &MinimizeResult) -> Self {
        Self {
            web: r.web.clone(),
            source: Some(source),
            target: Some(target),
            lost: g
                .methods_of(target)
                .filter(|m| !r.target_coverage.contains(m))
                .collect(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

pub fn export_dot(g: &AdapterGraph, overlay: Option<&Overlay>) -> String {
    let mut out = String::new();
    out.push_str("digraph adapters {\n  rankdir=LR;\n  node [shape=box];\n");
    for i in g.interface_ids() {
        let iface = g.interface(i);
        let mut label = format!("{}\\n{}", escape(&iface.name), escape(&iface.methods.join(", ")));
        let mut attrs = Vec::new();
        if let Some(o) = overlay {
            let lost: Vec<&str> = o
                .lost
                .iter()
                .filter(|&&m| g.method_owner(m) == i)
                .map(|&m| g.method_name(m))
                .collect();
            if !lost.is_empty() {
                label.push_str(&format!("\\nlost: {}", escape(&lost.join(", "))));
                attrs.push("color=\"red\"".to_string());
            }
            if o.source == Some(i) || o.target == Some(i) {
                attrs.push("peripheries=2".to_string());
            }
        }
        let mut line = format!("  {} [label=\"{label}\"", quote(&iface.name));
        for a in &attrs {
            line.push_str(", ");
            line.push_str(a);
        }
        line.push_str("];\n");
        out.push_str(&line);
    }
    for (a, edge) in g.edges() {
        let def = g.adapter(a);
        let _ = write!(
            out,
            "  {} -> {} [label={}",
            quote(&g.interface(edge.source).name),
            quote(&g.interface(edge.target).name),
            quote(&def.name)
        );
        if overlay.is_some_and(|o| o.web.contains(a)) {
            out.push_str(", color=\"blue\", penwidth=2");
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::maximal_cover;
    use crate::fixtures::diamond;
    use crate::model::InterfaceDef;

    #[test]
    fn nodes_only() {
        let g = AdapterGraph::from_parts(vec![InterfaceDef::new("s", ["a", "b"])], vec![]).unwrap();
        let dot = export_dot(&g, None);
        assert!(dot.contains("\"s\" [label=\"s\\na, b\"];"), "{dot}");
        assert!(!dot.contains("->"));
    }

    #[test]
    fn cover_overlay_highlights_web() {
        let g = diamond();
        let cover = maximal_cover(&g, "s", "t").unwrap();
        let dot = export_dot(&g, Some(&Overlay::from_cover(&g, &cover)));
        assert_eq!(dot.matches("->").count(), 4);
        assert_eq!(dot.matches("color=\"blue\"").count(), 4);
        for a in ["A1", "A2", "A3", "A4"] {
            assert!(dot.contains(&format!("[label=\"{a}\", color=\"blue\"")));
        }
        assert!(!dot.contains("lost:"));
    }

    #[test]
    fn lost_methods_marked() {
        let g = diamond();
        let cover = maximal_cover(&g, "I1", "t").unwrap();
        let dot = export_dot(&g, Some(&Overlay::from_cover(&g, &cover)));
        assert!(dot.contains("lost: y"), "{dot}");
        assert_eq!(dot.matches("color=\"blue\"").count(), 1);
    }
}
