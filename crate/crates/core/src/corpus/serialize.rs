//! Canonical text rendering of a corpus: attacks sorted by id, nodes by id,
//! edges by endpoint pair, taxonomy by (system, category, threat). Parsing
//! the output reproduces the input value exactly.

use super::CorpusFile;

fn quote(raw: &str) -> String {
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

/// Renders the canonical form.
pub fn serialize(corpus: &CorpusFile) -> String {
    let mut out = format!("corpus {} schema {}\n", corpus.format_version, corpus.schema_version);
    for cfg in corpus.attacks() {
        out.push('\n');
        out.push_str(&format!(
            "attack {} {} category {}\n",
            cfg.attack_id,
            quote(&cfg.name),
            cfg.category
        ));
        if let Some(citation) = &cfg.citation {
            out.push_str(&format!("cite {}\n", quote(citation)));
        }
        for node in cfg.nodes() {
            out.push_str(&format!(
                "node {} layer {} bits {} {}",
                node.id,
                node.layer,
                node.features,
                quote(&node.label)
            ));
            if !node.description.is_empty() {
                out.push(' ');
                out.push_str(&quote(&node.description));
            }
            out.push('\n');
        }
        for (src, dst) in cfg.edges() {
            out.push_str(&format!("edge {src} -> {dst}\n"));
        }
    }
    if !corpus.taxonomy().is_empty() {
        out.push('\n');
        for row in corpus.taxonomy() {
            out.push_str(&format!(
                "taxon {} {} {} {}\n",
                row.system,
                row.category,
                quote(&row.threat),
                quote(&row.description)
            ));
        }
    }
    out
}
