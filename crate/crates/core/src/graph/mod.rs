//! Core graph types: per-attack control-flow graphs, the merged attack DAG,
//! and the algorithms over them (merging with node deduplication, acyclicity
//! diagnostics, path enumeration, DOT/JSON export).
//!
//! All values are immutable after construction; operations return new values.

mod cfg;
mod dag;
mod export;
mod paths;

pub use cfg::{AttackCfg, CfgError};
pub use dag::{merge_cfgs, AttackDag, PREDICTED_PROVENANCE};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::features::BitVector;

/// Default cap on node expansions during path enumeration.
pub const DEFAULT_PATH_BUDGET: usize = 1_000_000;

/// Where in the stack an attack step acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Application,
    Network,
    System,
    Authentication,
    EdgeDevice,
    ControlPlane,
    DataPlane,
}

impl Layer {
    pub const ALL: [Layer; 7] = [
        Layer::Application,
        Layer::Network,
        Layer::System,
        Layer::Authentication,
        Layer::EdgeDevice,
        Layer::ControlPlane,
        Layer::DataPlane,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Layer::Application => "application",
            Layer::Network => "network",
            Layer::System => "system",
            Layer::Authentication => "authentication",
            Layer::EdgeDevice => "edge_device",
            Layer::ControlPlane => "control_plane",
            Layer::DataPlane => "data_plane",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Layer {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Layer::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("merged edge set contains a cycle: {}", format_cycle(.0))]
    CycleIntroduced(Vec<NodeKey>),
    #[error("node key '{key}' appears in attacks '{first}' and '{second}' with different feature vectors")]
    DuplicateNodeConflict {
        key: NodeKey,
        first: String,
        second: String,
    },
    #[error("unknown node '{0}'")]
    UnknownNode(NodeKey),
    #[error("adding edge '{from}' -> '{to}' would create a cycle")]
    WouldCreateCycle { from: NodeKey, to: NodeKey },
    #[error("edge '{from}' -> '{to}' already exists")]
    EdgeExists { from: NodeKey, to: NodeKey },
    #[error("path enumeration exceeded the budget of {budget} expansions")]
    PathBudgetExceeded { budget: usize },
    #[error("step label is empty")]
    EmptyLabel,
}

fn format_cycle(cycle: &[NodeKey]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|k| k.to_string()).collect();
    if let Some(first) = parts.first().cloned() {
        parts.push(first);
    }
    parts.join(" -> ")
}

/// Merge identity of a step: normalized label plus layer. Two steps with the
/// same key are the same node when CFGs are merged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeKey {
    pub label: String,
    pub layer: Layer,
}

impl NodeKey {
    pub fn new(label: &str, layer: Layer) -> Self {
        NodeKey { label: normalize_label(label), layer }
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.label, self.layer)
    }
}

/// Lowercases and collapses runs of whitespace to single spaces.
pub fn normalize_label(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// One attack step: a vertex of a CFG and of the merged DAG.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StepNode {
    pub id: String,
    pub label: String,
    pub layer: Layer,
    pub description: String,
    pub features: BitVector,
}

impl StepNode {
    /// Builds a step, normalizing the label (lowercase, collapsed
    /// whitespace). Fails only on a label that is empty after normalization.
    pub fn new(
        id: &str,
        label: &str,
        layer: Layer,
        description: &str,
        features: BitVector,
    ) -> Result<Self, GraphError> {
        let label = normalize_label(label);
        if label.is_empty() {
            return Err(GraphError::EmptyLabel);
        }
        Ok(StepNode {
            id: id.to_string(),
            label,
            layer,
            description: description.to_string(),
            features,
        })
    }

    pub fn key(&self) -> NodeKey {
        NodeKey { label: self.label.clone(), layer: self.layer }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_round_trips_through_str() {
        for layer in Layer::ALL {
            assert_eq!(layer.as_str().parse::<Layer>().unwrap(), layer);
        }
        assert!("bogus".parse::<Layer>().is_err());
    }

    #[test]
    fn labels_are_normalized() {
        let n = StepNode::new("n1", "  Flood\tThe   CONTROLLER \n", Layer::ControlPlane, "", BitVector::zeros(4))
            .unwrap();
        assert_eq!(n.label, "flood the controller");
        assert_eq!(n.key(), NodeKey::new("flood the controller", Layer::ControlPlane));
    }

    #[test]
    fn empty_label_rejected() {
        assert!(matches!(
            StepNode::new("n1", "  \t ", Layer::Network, "", BitVector::zeros(1)),
            Err(GraphError::EmptyLabel)
        ));
    }
}
