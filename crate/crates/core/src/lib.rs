//! Attack-graph workbench.
//!
//! This crate models known attacks as small control-flow graphs (one CFG per
//! attack), merges them into a unified attack DAG with per-edge provenance,
//! trains classical classifiers over binary node features to propose new DAG
//! branches, and validates the SDN portion of the catalog against a
//! deterministic discrete-event simulation of an OpenFlow-style control plane.
//!
//! Everything seeded is bit-reproducible: all randomness flows through the
//! [`rng::SplitMix64`] generator and all collections iterate in sorted order.

pub mod corpus;
pub mod features;
pub mod graph;
pub mod ml;
pub mod rng;
pub mod sim;

pub use features::{default_schema, BitVector, FeatureSchema};
pub use graph::{AttackCfg, AttackDag, Layer, NodeKey, StepNode};
