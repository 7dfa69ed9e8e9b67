//! On-disk attack-corpus format, bundled catalogs, and taxonomy rows.
//!
//! The source-of-truth format is line-oriented text (reviewable diffs, real
//! parsing surface); JSON import/export is provided as a secondary encoding.
//!
//! Grammar (ABNF, also shipped in `docs/corpus-format.md`):
//!
//! ```text
//! corpus-file  = header *(attack-block / taxon-line / blank / comment)
//! header       = "corpus" SP word SP "schema" SP word
//! attack-block = attack-line *(cite-line / node-line / edge-line / blank / comment)
//! attack-line  = "attack" SP id SP quoted SP "category" SP word
//! cite-line    = "cite" SP quoted
//! node-line    = "node" SP id SP "layer" SP layer SP "bits" SP bits SP quoted [SP quoted]
//! edge-line    = "edge" SP id SP "->" SP id
//! taxon-line   = "taxon" SP system SP category SP quoted SP quoted
//! comment      = "#" *VCHAR            ; whole-line comments only
//! id           = 1*(ALPHA / DIGIT / "_" / "-")
//! word         = 1*(ALPHA / DIGIT / "_" / "-" / ".")
//! bits         = 1*("0" / "1")         ; length = active schema length
//! layer        = "application" / "network" / "system" / "authentication" /
//!                "edge_device" / "control_plane" / "data_plane"
//! system       = "EPC" / "IMS"
//! category     = "Availability" / "Confidentiality" / "Integrity" /
//!                "Control" / "MaliciousInsider" / "TheftOfService"
//! quoted       = DQUOTE *(%x20-21 / %x23-5B / %x5D-7E / "\" DQUOTE / "\\") DQUOTE
//! ```
//!
//! The second `quoted` on a node line is an optional free-text description.

mod json;
mod parse;
mod serialize;

pub use json::{corpus_from_json, corpus_to_json};
pub use parse::parse;
pub use serialize::serialize;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::graph::{AttackCfg, CfgError, NodeKey};

/// Current corpus format version.
pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported corpus format version '{0}'")]
    UnsupportedFormatVersion(String),
    #[error("unknown feature schema version '{0}'")]
    UnknownSchemaVersion(String),
    #[error("unknown layer '{layer}' at line {line}, column {column}")]
    UnknownLayer { line: usize, column: usize, layer: String },
    #[error("attack id '{0}' declared more than once")]
    DuplicateAttackId(String),
    #[error("attack '{attack_id}' edge references undeclared node '{node_id}'")]
    DanglingEdge { attack_id: String, node_id: String },
    #[error("attack '{attack_id}' declares node id '{node_id}' more than once")]
    DuplicateNodeId { attack_id: String, node_id: String },
    #[error("attack '{attack_id}' has two nodes with the same key '{key}'")]
    DuplicateNodeKey { attack_id: String, key: NodeKey },
    #[error("attack '{attack_id}' node '{node_id}': feature vector has {got} bits, schema wants {expected}")]
    FeatureLengthMismatch { attack_id: String, node_id: String, expected: usize, got: usize },
    #[error("attack '{attack_id}' control-flow graph contains a cycle")]
    CyclicCfg { attack_id: String },
    #[error("attack '{attack_id}' has no nodes")]
    EmptyAttack { attack_id: String },
    #[error("taxonomy row ({system}, '{threat}') declared more than once")]
    DuplicateTaxon { system: System, threat: String },
    #[error("invalid json corpus: {0}")]
    Json(String),
}

impl CorpusError {
    pub(crate) fn from_cfg(err: CfgError) -> Self {
        match err {
            CfgError::Empty { attack_id } => CorpusError::EmptyAttack { attack_id },
            CfgError::DuplicateNodeId { attack_id, node_id } => {
                CorpusError::DuplicateNodeId { attack_id, node_id }
            }
            CfgError::DuplicateNodeKey { attack_id, key } => {
                CorpusError::DuplicateNodeKey { attack_id, key }
            }
            CfgError::DanglingEdge { attack_id, node_id } => {
                CorpusError::DanglingEdge { attack_id, node_id }
            }
            CfgError::Cyclic { attack_id, .. } => CorpusError::CyclicCfg { attack_id },
        }
    }
}

/// Which core-network table a taxonomy row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum System {
    #[serde(rename = "EPC")]
    Epc,
    #[serde(rename = "IMS")]
    Ims,
}

impl System {
    pub fn as_str(&self) -> &'static str {
        match self {
            System::Epc => "EPC",
            System::Ims => "IMS",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for System {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "EPC" => Ok(System::Epc),
            "IMS" => Ok(System::Ims),
            _ => Err(()),
        }
    }
}

/// Threat category used by the taxonomy tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Availability,
    Confidentiality,
    Integrity,
    Control,
    MaliciousInsider,
    TheftOfService,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Availability,
        Category::Confidentiality,
        Category::Integrity,
        Category::Control,
        Category::MaliciousInsider,
        Category::TheftOfService,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Availability => "Availability",
            Category::Confidentiality => "Confidentiality",
            Category::Integrity => "Integrity",
            Category::Control => "Control",
            Category::MaliciousInsider => "MaliciousInsider",
            Category::TheftOfService => "TheftOfService",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Category::ALL.into_iter().find(|c| c.as_str() == s).ok_or(())
    }
}

/// One row of a threat-taxonomy table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TaxonomyRow {
    pub system: System,
    pub category: Category,
    pub threat: String,
    pub description: String,
}

/// A parsed, validated corpus: attack CFGs plus optional taxonomy rows, both
/// held in canonical sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFile {
    pub format_version: String,
    pub schema_version: String,
    attacks: Vec<AttackCfg>,
    taxonomy: Vec<TaxonomyRow>,
}

impl CorpusFile {
    /// Canonicalizes (sorts attacks and taxonomy) and checks cross-attack
    /// uniqueness of attack ids and `(system, threat)` taxonomy pairs.
    pub fn new(
        format_version: &str,
        schema_version: &str,
        mut attacks: Vec<AttackCfg>,
        mut taxonomy: Vec<TaxonomyRow>,
    ) -> Result<Self, CorpusError> {
        attacks.sort_by(|a, b| a.attack_id.cmp(&b.attack_id));
        for pair in attacks.windows(2) {
            if pair[0].attack_id == pair[1].attack_id {
                return Err(CorpusError::DuplicateAttackId(pair[0].attack_id.clone()));
            }
        }
        taxonomy.sort();
        let mut seen = std::collections::BTreeSet::new();
        for row in &taxonomy {
            if !seen.insert((row.system, row.threat.clone())) {
                return Err(CorpusError::DuplicateTaxon {
                    system: row.system,
                    threat: row.threat.clone(),
                });
            }
        }
        Ok(CorpusFile {
            format_version: format_version.to_string(),
            schema_version: schema_version.to_string(),
            attacks,
            taxonomy,
        })
    }

    pub fn attacks(&self) -> &[AttackCfg] {
        &self.attacks
    }

    pub fn taxonomy(&self) -> &[TaxonomyRow] {
        &self.taxonomy
    }

    /// Total node count across all attacks (before any merge deduplication).
    pub fn total_nodes(&self) -> usize {
        self.attacks.iter().map(|a| a.nodes().len()).sum()
    }
}

/// Names of the catalogs shipped inside the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bundled {
    Sdn,
    Whatsapp,
    EpcTaxonomy,
    ImsTaxonomy,
}

impl Bundled {
    pub const ALL: [Bundled; 4] =
        [Bundled::Sdn, Bundled::Whatsapp, Bundled::EpcTaxonomy, Bundled::ImsTaxonomy];

    pub fn as_str(&self) -> &'static str {
        match self {
            Bundled::Sdn => "sdn",
            Bundled::Whatsapp => "whatsapp",
            Bundled::EpcTaxonomy => "epc_taxonomy",
            Bundled::ImsTaxonomy => "ims_taxonomy",
        }
    }

    /// Raw corpus text, as shipped.
    pub fn text(&self) -> &'static str {
        match self {
            Bundled::Sdn => include_str!("data/sdn.corpus"),
            Bundled::Whatsapp => include_str!("data/whatsapp.corpus"),
            Bundled::EpcTaxonomy => include_str!("data/epc_taxonomy.corpus"),
            Bundled::ImsTaxonomy => include_str!("data/ims_taxonomy.corpus"),
        }
    }
}

impl fmt::Display for Bundled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Bundled {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Bundled::ALL.into_iter().find(|b| b.as_str() == s).ok_or(())
    }
}

/// Loads one of the embedded catalogs. The shipped text is covered by the
/// test suite, so parsing cannot fail at runtime.
pub fn load_bundled(which: Bundled) -> CorpusFile {
    parse(which.text()).unwrap_or_else(|err| panic!("bundled corpus '{which}' is valid: {err}"))
}
