//! JSON encoding of a corpus, secondary to the line-oriented format. Uses
//! the same validation path as the text parser.

use serde::{Deserialize, Serialize};

use super::{Category, CorpusError, CorpusFile, System, TaxonomyRow};
use crate::features::BitVector;
use crate::graph::{AttackCfg, Layer, StepNode};

#[derive(Serialize, Deserialize)]
struct JsonCorpus {
    format_version: String,
    schema_version: String,
    attacks: Vec<JsonAttack>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    taxonomy: Vec<JsonTaxon>,
}

#[derive(Serialize, Deserialize)]
struct JsonAttack {
    id: String,
    name: String,
    category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    citation: Option<String>,
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    id: String,
    label: String,
    layer: Layer,
    bits: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    src: String,
    dst: String,
}

#[derive(Serialize, Deserialize)]
struct JsonTaxon {
    system: System,
    category: Category,
    threat: String,
    description: String,
}

pub fn corpus_to_json(corpus: &CorpusFile) -> String {
    let doc = JsonCorpus {
        format_version: corpus.format_version.clone(),
        schema_version: corpus.schema_version.clone(),
        attacks: corpus
            .attacks()
            .iter()
            .map(|cfg| JsonAttack {
                id: cfg.attack_id.clone(),
                name: cfg.name.clone(),
                category: cfg.category.clone(),
                citation: cfg.citation.clone(),
                nodes: cfg
                    .nodes()
                    .iter()
                    .map(|n| JsonNode {
                        id: n.id.clone(),
                        label: n.label.clone(),
                        layer: n.layer,
                        bits: n.features.to_string(),
                        description: n.description.clone(),
                    })
                    .collect(),
                edges: cfg
                    .edges()
                    .iter()
                    .map(|(src, dst)| JsonEdge { src: src.clone(), dst: dst.clone() })
                    .collect(),
            })
            .collect(),
        taxonomy: corpus
            .taxonomy()
            .iter()
            .map(|row| JsonTaxon {
                system: row.system,
                category: row.category,
                threat: row.threat.clone(),
                description: row.description.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("corpus serializes")
}

pub fn corpus_from_json(text: &str) -> Result<CorpusFile, CorpusError> {
    let doc: JsonCorpus =
        serde_json::from_str(text).map_err(|e| CorpusError::Json(e.to_string()))?;
    if doc.format_version != super::FORMAT_VERSION {
        return Err(CorpusError::UnsupportedFormatVersion(doc.format_version));
    }
    let schema = crate::features::default_schema();
    if doc.schema_version != schema.version() {
        return Err(CorpusError::UnknownSchemaVersion(doc.schema_version));
    }
    let mut attacks = Vec::with_capacity(doc.attacks.len());
    for attack in doc.attacks {
        let mut nodes = Vec::with_capacity(attack.nodes.len());
        for node in attack.nodes {
            let bits = BitVector::parse(&node.bits)
                .map_err(|_| CorpusError::Json(format!("node '{}': invalid bit string", node.id)))?;
            if bits.len() != schema.len() {
                return Err(CorpusError::FeatureLengthMismatch {
                    attack_id: attack.id.clone(),
                    node_id: node.id.clone(),
                    expected: schema.len(),
                    got: bits.len(),
                });
            }
            let step = StepNode::new(&node.id, &node.label, node.layer, &node.description, bits)
                .map_err(|_| CorpusError::Json(format!("node '{}': empty label", node.id)))?;
            nodes.push(step);
        }
        let edges = attack.edges.into_iter().map(|e| (e.src, e.dst)).collect();
        attacks.push(
            AttackCfg::new(&attack.id, &attack.name, &attack.category, attack.citation.as_deref(), nodes, edges)
                .map_err(CorpusError::from_cfg)?,
        );
    }
    let taxonomy = doc
        .taxonomy
        .into_iter()
        .map(|t| TaxonomyRow {
            system: t.system,
            category: t.category,
            threat: t.threat,
            description: t.description,
        })
        .collect();
    CorpusFile::new(&doc.format_version, &doc.schema_version, attacks, taxonomy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_on_a_small_corpus() {
        let node = StepNode::new("n", "a step", Layer::System, "why", BitVector::zeros(16)).unwrap();
        let cfg = AttackCfg::new("a", "A", "DoS", Some("somewhere"), vec![node], vec![]).unwrap();
        let corpus = CorpusFile::new("1", "v1", vec![cfg], vec![]).unwrap();
        let back = corpus_from_json(&corpus_to_json(&corpus)).unwrap();
        assert_eq!(back, corpus);
    }

    #[test]
    fn garbage_json_is_an_error() {
        assert!(matches!(corpus_from_json("{nope"), Err(CorpusError::Json(_))));
    }
}
