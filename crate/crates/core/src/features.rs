//! Binary feature schema for attack steps, plus the bit-vector similarity
//! measures the classifiers are built on.
//!
//! A step node carries one bit per schema feature. Vectors are only
//! comparable within a single schema version; every length-sensitive
//! operation checks that up front.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::graph::StepNode;

/// Version tag of the bundled schema.
pub const SCHEMA_V1: &str = "v1";

const V1_FEATURES: [(&str, &str); 16] = [
    ("requires_local_access", "attacker needs code running on the victim device or host"),
    ("requires_network_position", "attacker needs reachability or an on-path position"),
    ("requires_malicious_app", "step is performed by a hostile application or controller module"),
    ("requires_compromised_switch", "step is performed from a switch the attacker controls"),
    ("requires_root_or_kernel", "step needs root, kernel or firmware level privilege"),
    ("exploits_missing_auth", "abuses absent or weak authentication/authorization"),
    ("exploits_missing_encryption", "abuses cleartext storage or cleartext transport"),
    ("exploits_resource_limits", "abuses finite cpu, memory or table capacity"),
    ("exploits_protocol_flaw", "abuses a protocol design or parsing weakness"),
    ("exploits_shared_storage", "abuses storage visible to other principals"),
    ("targets_control_plane", "step acts on the controller or control channel"),
    ("targets_data_plane", "step acts on switches or forwarding state"),
    ("targets_application_layer", "step acts on application level assets"),
    ("effect_dos", "outcome degrades or denies service"),
    ("effect_integrity", "outcome tampers with data, rules or state"),
    ("effect_confidentiality", "outcome discloses protected information"),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("bit vector length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// One named feature of a schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub description: String,
}

/// An ordered, versioned list of binary features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    features: Vec<Feature>,
    version: String,
}

impl FeatureSchema {
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Schema as a JSON array of `{name, description}` objects.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.features).expect("schema serializes")
    }
}

/// The bundled 16-feature schema, version "v1". Axes: attacker position,
/// privilege, layer touched and effect class.
pub fn default_schema() -> FeatureSchema {
    FeatureSchema {
        features: V1_FEATURES
            .iter()
            .map(|(n, d)| Feature {
                name: n.to_string(),
                description: d.to_string(),
            })
            .collect(),
        version: SCHEMA_V1.to_string(),
    }
}

/// Fixed-length sequence of bits. Length is validated against the active
/// schema wherever vectors enter the system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn new(bits: Vec<bool>) -> Self {
        BitVector { bits }
    }

    pub fn zeros(len: usize) -> Self {
        BitVector { bits: vec![false; len] }
    }

    /// Parses a `0`/`1` string, e.g. `"0101"`. Any other character is an
    /// error (reported as its index).
    pub fn parse(text: &str) -> Result<Self, usize> {
        let mut bits = Vec::with_capacity(text.len());
        for (i, c) in text.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(i),
            }
        }
        Ok(BitVector { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_lengths(a: &BitVector, b: &BitVector) -> Result<(), FeatureError> {
    if a.len() != b.len() {
        return Err(FeatureError::LengthMismatch { expected: a.len(), got: b.len() });
    }
    Ok(())
}

/// Number of positions where the two vectors differ.
pub fn hamming(a: &BitVector, b: &BitVector) -> Result<usize, FeatureError> {
    check_lengths(a, b)?;
    Ok(a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count())
}

/// Intersection size over union size of the set bits. Both all-zero is
/// defined as 1 (identical vectors stay at similarity 1).
pub fn jaccard(a: &BitVector, b: &BitVector) -> Result<f64, FeatureError> {
    let (inter, union) = jaccard_counts(a, b)?;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

fn jaccard_counts(a: &BitVector, b: &BitVector) -> Result<(usize, usize), FeatureError> {
    check_lengths(a, b)?;
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        if x && y {
            inter += 1;
        }
        if x || y {
            union += 1;
        }
    }
    Ok((inter, union))
}

/// Feature vector for a directed candidate edge `u -> v`: the two node
/// vectors concatenated, then a same-layer bit, then a bit for
/// `jaccard(u, v) >= 1/2`. Length is `2 * schema.len() + 2`.
///
/// The threshold bit is computed in integer arithmetic
/// (`2 * |intersection| >= |union|`, with the empty union counting as
/// similarity 1) so no float comparison is involved.
pub fn edge_features(
    u: &StepNode,
    v: &StepNode,
    schema: &FeatureSchema,
) -> Result<BitVector, FeatureError> {
    for node in [u, v] {
        if node.features.len() != schema.len() {
            return Err(FeatureError::LengthMismatch {
                expected: schema.len(),
                got: node.features.len(),
            });
        }
    }
    let mut bits = Vec::with_capacity(2 * schema.len() + 2);
    bits.extend_from_slice(u.features.bits());
    bits.extend_from_slice(v.features.bits());
    bits.push(u.layer == v.layer);
    let (inter, union) = jaccard_counts(&u.features, &v.features)?;
    bits.push(union == 0 || 2 * inter >= union);
    Ok(BitVector::new(bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Layer, StepNode};
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        BitVector::parse(s).unwrap()
    }

    #[test]
    fn v1_schema_has_16_unique_names() {
        let s = default_schema();
        assert_eq!(s.len(), 16);
        assert_eq!(s.version(), "v1");
        let mut names: Vec<_> = s.features().iter().map(|f| f.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 16);
    }

    #[test]
    fn schema_json_is_an_array_of_name_description() {
        let parsed: serde_json::Value = serde_json::from_str(&default_schema().to_json()).unwrap();
        let arr = parsed.as_array().unwrap();
        assert_eq!(arr.len(), 16);
        assert!(arr.iter().all(|o| o.get("name").is_some() && o.get("description").is_some()));
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&bv("0110"), &bv("0110")).unwrap(), 0);
        assert_eq!(hamming(&bv("0000"), &bv("1111")).unwrap(), 4);
        assert!(matches!(
            hamming(&bv("01"), &bv("011")),
            Err(FeatureError::LengthMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&bv("1010"), &bv("1010")).unwrap(), 1.0);
        assert_eq!(jaccard(&bv("1100"), &bv("0011")).unwrap(), 0.0);
        assert_eq!(jaccard(&bv("1110"), &bv("0110")).unwrap(), 2.0 / 3.0);
        assert_eq!(jaccard(&bv("0000"), &bv("0000")).unwrap(), 1.0);
    }

    fn node(label: &str, layer: Layer, bits: &str) -> StepNode {
        StepNode::new(label, label, layer, "", bv(bits)).unwrap()
    }

    #[test]
    fn edge_features_self_pair() {
        let s = default_schema();
        let u = node("a", Layer::Network, "0110000000000000");
        let x = edge_features(&u, &u, &s).unwrap();
        assert_eq!(x.len(), 34);
        assert!(x.get(32), "same-layer bit");
        assert!(x.get(33), "jaccard threshold bit");
    }

    #[test]
    fn edge_features_encodes_direction() {
        let s = default_schema();
        let u = node("a", Layer::Network, "1000000000000000");
        let v = node("b", Layer::System, "0100000000000000");
        let uv = edge_features(&u, &v, &s).unwrap();
        let vu = edge_features(&v, &u, &s).unwrap();
        assert_ne!(uv, vu);
        assert!(!uv.get(32));
        // disjoint single bits: intersection 0 of union 2, below 1/2
        assert!(!uv.get(33));
    }

    proptest! {
        #[test]
        fn hamming_matches_xor_popcount(a in proptest::collection::vec(any::<bool>(), 0..64)) {
            let b: Vec<bool> = a.iter().map(|_| false).collect();
            let mut c = a.clone();
            if !c.is_empty() { c[0] = !c[0]; }
            for other in [b, c] {
                let oracle = a.iter().zip(&other).filter(|(x, y)| *x != *y).count();
                prop_assert_eq!(
                    hamming(&BitVector::new(a.clone()), &BitVector::new(other.clone())).unwrap(),
                    oracle
                );
            }
        }

        #[test]
        fn hamming_is_a_metric(
            a in proptest::collection::vec(any::<bool>(), 16),
            b in proptest::collection::vec(any::<bool>(), 16),
            c in proptest::collection::vec(any::<bool>(), 16),
        ) {
            let (a, b, c) = (BitVector::new(a), BitVector::new(b), BitVector::new(c));
            let ab = hamming(&a, &b).unwrap();
            let ba = hamming(&b, &a).unwrap();
            let ac = hamming(&a, &c).unwrap();
            let cb = hamming(&c, &b).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(ab == 0, a == b);
            prop_assert!(ab <= ac + cb);
        }

        #[test]
        fn jaccard_bounded_and_one_iff_equal(
            a in proptest::collection::vec(any::<bool>(), 16),
            b in proptest::collection::vec(any::<bool>(), 16),
        ) {
            let (a, b) = (BitVector::new(a), BitVector::new(b));
            let j = jaccard(&a, &b).unwrap();
            prop_assert!((0.0..=1.0).contains(&j));
            prop_assert_eq!(j == 1.0, a == b);
        }
    }
}
