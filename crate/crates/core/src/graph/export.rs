//! DOT and JSON renderings of a merged DAG. Both are byte-stable for a given
//! graph: everything is emitted in sorted order.

use serde::Serialize;

use super::{AttackDag, Layer, NodeKey, PREDICTED_PROVENANCE};

fn dot_quote(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len() + 2);
    out.push('"');
    for c in raw.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Serialize)]
struct JsonNode<'a> {
    label: &'a str,
    layer: Layer,
    description: &'a str,
    features: String,
}

#[derive(Serialize)]
struct JsonEdge {
    src: String,
    dst: String,
    provenance: Vec<String>,
}

#[derive(Serialize)]
struct JsonDag<'a> {
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<JsonEdge>,
}

impl AttackDag {
    /// DOT digraph text. Node identifiers are the `label@layer` key strings;
    /// predicted edges are rendered dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph attacks {\n");
        out.push_str("  rankdir=LR;\n");
        for key in self.node_keys() {
            out.push_str("  ");
            out.push_str(&dot_quote(&key.to_string()));
            out.push_str(";\n");
        }
        for ((src, dst), provenance) in self.edges() {
            out.push_str("  ");
            out.push_str(&dot_quote(&src.to_string()));
            out.push_str(" -> ");
            out.push_str(&dot_quote(&dst.to_string()));
            if provenance.contains(PREDICTED_PROVENANCE) {
                out.push_str(" [style=dashed]");
            }
            out.push_str(";\n");
        }
        out.push_str("}\n");
        out
    }

    /// JSON object with sorted `nodes` and `edges` arrays. Edge endpoints use
    /// the `label@layer` key strings.
    pub fn to_json(&self) -> String {
        let doc = JsonDag {
            nodes: self
                .nodes()
                .map(|(_, n)| JsonNode {
                    label: &n.label,
                    layer: n.layer,
                    description: &n.description,
                    features: n.features.to_string(),
                })
                .collect(),
            edges: self
                .edges()
                .map(|((src, dst), provenance)| JsonEdge {
                    src: src.to_string(),
                    dst: dst.to_string(),
                    provenance: provenance.iter().cloned().collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("dag serializes")
    }

    fn node_keys(&self) -> impl Iterator<Item = &NodeKey> {
        self.nodes().map(|(k, _)| k)
    }
}
