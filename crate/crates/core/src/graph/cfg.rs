//! A single attack encoded as a directed control-flow graph: entry steps
//! (in-degree zero) through actions to impact steps (out-degree zero).

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use super::{NodeKey, StepNode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CfgError {
    #[error("attack '{attack_id}' has no nodes")]
    Empty { attack_id: String },
    #[error("attack '{attack_id}' declares node id '{node_id}' more than once")]
    DuplicateNodeId { attack_id: String, node_id: String },
    #[error("attack '{attack_id}' has two nodes with the same key '{key}'")]
    DuplicateNodeKey { attack_id: String, key: NodeKey },
    #[error("attack '{attack_id}' has an edge referencing undeclared node '{node_id}'")]
    DanglingEdge { attack_id: String, node_id: String },
    #[error("attack '{attack_id}' contains a cycle through node '{node_id}'")]
    Cyclic { attack_id: String, node_id: String },
}

/// One attack's control-flow graph. Nodes and edges are held sorted (by node
/// id, and by endpoint pair) so equal graphs compare and serialize equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AttackCfg {
    pub attack_id: String,
    pub name: String,
    pub category: String,
    /// Optional pointer to the public source describing the attack class.
    pub citation: Option<String>,
    nodes: Vec<StepNode>,
    edges: Vec<(String, String)>,
}

impl AttackCfg {
    /// Validates and canonicalizes an attack graph. Checks: at least one
    /// node, unique node ids, unique node keys, resolvable edge endpoints,
    /// acyclicity. Duplicate edges collapse (edges are a set).
    pub fn new(
        attack_id: &str,
        name: &str,
        category: &str,
        citation: Option<&str>,
        mut nodes: Vec<StepNode>,
        mut edges: Vec<(String, String)>,
    ) -> Result<Self, CfgError> {
        if nodes.is_empty() {
            return Err(CfgError::Empty { attack_id: attack_id.to_string() });
        }
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let mut ids = BTreeSet::new();
        let mut keys = BTreeSet::new();
        for node in &nodes {
            if !ids.insert(node.id.clone()) {
                return Err(CfgError::DuplicateNodeId {
                    attack_id: attack_id.to_string(),
                    node_id: node.id.clone(),
                });
            }
            if !keys.insert(node.key()) {
                return Err(CfgError::DuplicateNodeKey {
                    attack_id: attack_id.to_string(),
                    key: node.key(),
                });
            }
        }
        edges.sort();
        edges.dedup();
        for (src, dst) in &edges {
            for endpoint in [src, dst] {
                if !ids.contains(endpoint) {
                    return Err(CfgError::DanglingEdge {
                        attack_id: attack_id.to_string(),
                        node_id: endpoint.clone(),
                    });
                }
            }
        }
        let cfg = AttackCfg {
            attack_id: attack_id.to_string(),
            name: name.to_string(),
            category: category.to_string(),
            citation: citation.map(str::to_string),
            nodes,
            edges,
        };
        if let Some(node_id) = cfg.find_cycle_node() {
            return Err(CfgError::Cyclic { attack_id: cfg.attack_id, node_id });
        }
        Ok(cfg)
    }

    pub fn nodes(&self) -> &[StepNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&StepNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Nodes with in-degree zero. Non-empty for every valid (acyclic) CFG.
    pub fn entry_nodes(&self) -> Vec<&StepNode> {
        let targets: BTreeSet<&str> = self.edges.iter().map(|(_, d)| d.as_str()).collect();
        self.nodes.iter().filter(|n| !targets.contains(n.id.as_str())).collect()
    }

    /// Nodes with out-degree zero. Non-empty for every valid (acyclic) CFG.
    pub fn impact_nodes(&self) -> Vec<&StepNode> {
        let sources: BTreeSet<&str> = self.edges.iter().map(|(s, _)| s.as_str()).collect();
        self.nodes.iter().filter(|n| !sources.contains(n.id.as_str())).collect()
    }

    /// Kahn's algorithm over node ids; returns a node on a cycle if one
    /// exists.
    fn find_cycle_node(&self) -> Option<String> {
        let mut indegree: BTreeMap<&str, usize> =
            self.nodes.iter().map(|n| (n.id.as_str(), 0)).collect();
        let mut succs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (src, dst) in &self.edges {
            *indegree.get_mut(dst.as_str()).expect("validated endpoint") += 1;
            succs.entry(src.as_str()).or_default().push(dst.as_str());
        }
        let mut ready: BTreeSet<&str> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| id)
            .collect();
        let mut seen = 0usize;
        while let Some(&id) = ready.iter().next() {
            ready.remove(id);
            seen += 1;
            for &succ in succs.get(id).into_iter().flatten() {
                let d = indegree.get_mut(succ).expect("validated endpoint");
                *d -= 1;
                if *d == 0 {
                    ready.insert(succ);
                }
            }
        }
        if seen == self.nodes.len() {
            return None;
        }
        indegree
            .into_iter()
            .filter(|(_, d)| *d > 0)
            .map(|(id, _)| id.to_string())
            .next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::BitVector;
    use crate::graph::Layer;

    fn node(id: &str, label: &str) -> StepNode {
        StepNode::new(id, label, Layer::Network, "", BitVector::zeros(4)).unwrap()
    }

    fn edge(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    #[test]
    fn chain_is_valid_with_derived_entries_and_impacts() {
        let cfg = AttackCfg::new(
            "t",
            "test",
            "DoS",
            None,
            vec![node("a", "first"), node("b", "second"), node("c", "third")],
            vec![edge("a", "b"), edge("b", "c")],
        )
        .unwrap();
        assert_eq!(cfg.entry_nodes().iter().map(|n| n.id.as_str()).collect::<Vec<_>>(), ["a"]);
        assert_eq!(cfg.impact_nodes().iter().map(|n| n.id.as_str()).collect::<Vec<_>>(), ["c"]);
    }

    #[test]
    fn rejects_dangling_edge() {
        let err = AttackCfg::new("t", "test", "DoS", None, vec![node("a", "first")], vec![edge("a", "x9")])
            .unwrap_err();
        assert!(matches!(err, CfgError::DanglingEdge { node_id, .. } if node_id == "x9"));
    }

    #[test]
    fn rejects_duplicate_node_id() {
        let err = AttackCfg::new(
            "t",
            "test",
            "DoS",
            None,
            vec![node("a", "first"), node("a", "second")],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, CfgError::DuplicateNodeId { node_id, .. } if node_id == "a"));
    }

    #[test]
    fn rejects_duplicate_key() {
        let err = AttackCfg::new(
            "t",
            "test",
            "DoS",
            None,
            vec![node("a", "same  label"), node("b", "SAME LABEL")],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, CfgError::DuplicateNodeKey { .. }));
    }

    #[test]
    fn rejects_cycle() {
        let err = AttackCfg::new(
            "t",
            "test",
            "DoS",
            None,
            vec![node("a", "first"), node("b", "second")],
            vec![edge("a", "b"), edge("b", "a")],
        )
        .unwrap_err();
        assert!(matches!(err, CfgError::Cyclic { .. }));
    }

    #[test]
    fn rejects_empty() {
        assert!(matches!(
            AttackCfg::new("t", "test", "DoS", None, vec![], vec![]),
            Err(CfgError::Empty { .. })
        ));
    }

    #[test]
    fn single_node_is_both_entry_and_impact() {
        let cfg = AttackCfg::new("t", "test", "DoS", None, vec![node("a", "only")], vec![]).unwrap();
        assert_eq!(cfg.entry_nodes().len(), 1);
        assert_eq!(cfg.impact_nodes().len(), 1);
    }
}
