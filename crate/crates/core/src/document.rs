//! JSON graph documents.
//!
//! ```json
//! {
//!   "interfaces": [{ "name": "s", "methods": ["a"] }],
//!   "adapters": [{
//!     "name": "A1", "source": "s", "target": "t",
//!     "provides": [{ "method": "x", "requires": ["a"] }]
//!   }]
//! }
//! ```
//!
//! Serialization is canonical: interfaces and adapters sorted by name,
//! methods in declared order, provision rows in target-method order and
//! requirements in source-method order.

use crate::error::{Error, Result};
use crate::model::{AdapterGraph, GraphDef};

/// Parses and validates a graph document.
pub fn parse_graph(text: &str) -> Result<AdapterGraph> {
    let def: GraphDef = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    AdapterGraph::new(def)
}

pub fn serialize_graph(g: &AdapterGraph) -> String {
    let mut s = serde_json::to_string_pretty(&g.to_def()).expect("graph definitions always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ViolationCode;

    const MINIMAL: &str = r#"{
        "interfaces": [{"name": "t", "methods": ["x"]}, {"name": "s", "methods": ["a"]}],
        "adapters": [{"name": "A1", "source": "s", "target": "t",
                      "provides": [{"method": "x", "requires": ["a"]}]}]
    }"#;

    #[test]
    fn minimal_document() {
        let g = parse_graph(MINIMAL).unwrap();
        assert_eq!(g.interface_count(), 2);
        assert_eq!(g.adapter_count(), 1);
        let text = serialize_graph(&g);
        assert!(text.find("\"s\"").unwrap() < text.find("\"t\"").unwrap());
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert_eq!(serialize_graph(&parse_graph(&text).unwrap()), text);
    }

    #[test]
    fn unknown_method_is_a_validation_error() {
        let doc = MINIMAL.replace(r#"["a"]}]}]"#, r#"["b"]}]}]"#);
        match parse_graph(&doc) {
            Err(Error::Validation(v)) => {
                assert_eq!(v[0].code, ViolationCode::UnknownMethod);
                assert_eq!(v[0].path, "adapters[0].provides[0].requires[0]");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_is_a_parse_error() {
        assert!(matches!(parse_graph("{\"interfaces\": ["), Err(Error::Parse(_))));
        assert!(matches!(
            parse_graph("{\"interfaces\": [], \"adapters\": [], \"x\": 1}"),
            Err(Error::Parse(_))
        ));
        let e = parse_graph("{\n  \"interfaces\": 3\n}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }
}
