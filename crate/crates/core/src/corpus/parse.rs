//! Parser for the line-oriented corpus format. Total: any byte sequence
//! yields either a validated [`CorpusFile`] or a diagnostic, never a panic.

use std::str::FromStr;

use super::{Bundled, Category, CorpusError, CorpusFile, System, TaxonomyRow, FORMAT_VERSION};
use crate::features::{default_schema, BitVector};
use crate::graph::{AttackCfg, Layer, StepNode};

/// One token with the 1-based column of its first character.
#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String, usize),
    Quoted(String, usize),
}

impl Token {
    fn column(&self) -> usize {
        match self {
            Token::Word(_, c) | Token::Quoted(_, c) => *c,
        }
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Syntax { line, column, message: message.into() }
}

/// Splits a line into bare words and quoted strings. Supports `\"` and `\\`
/// escapes inside quotes. Columns are 1-based character offsets.
fn tokenize(line_no: usize, line: &str) -> Result<Vec<Token>, CorpusError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i + 1;
        if c == '"' {
            let mut value = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(syntax(line_no, start, "unterminated quoted string")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some('"') => {
                            value.push('"');
                            i += 2;
                        }
                        Some('\\') => {
                            value.push('\\');
                            i += 2;
                        }
                        _ => return Err(syntax(line_no, i + 1, "invalid escape sequence")),
                    },
                    Some(&other) => {
                        value.push(other);
                        i += 1;
                    }
                }
            }
            tokens.push(Token::Quoted(value, start));
        } else {
            let mut value = String::new();
            while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '"' {
                value.push(chars[i]);
                i += 1;
            }
            tokens.push(Token::Word(value, start));
        }
    }
    Ok(tokens)
}

fn expect_word<'t>(
    tokens: &'t [Token],
    idx: usize,
    what: &str,
    line: usize,
) -> Result<(&'t str, usize), CorpusError> {
    match tokens.get(idx) {
        Some(Token::Word(w, c)) => Ok((w.as_str(), *c)),
        Some(Token::Quoted(_, c)) => Err(syntax(line, *c, format!("expected {what}, found quoted string"))),
        None => Err(syntax(line, end_column(tokens), format!("expected {what}"))),
    }
}

fn expect_keyword(tokens: &[Token], idx: usize, kw: &str, line: usize) -> Result<(), CorpusError> {
    let (word, col) = expect_word(tokens, idx, &format!("'{kw}'"), line)?;
    if word != kw {
        return Err(syntax(line, col, format!("expected '{kw}', found '{word}'")));
    }
    Ok(())
}

fn expect_quoted<'t>(
    tokens: &'t [Token],
    idx: usize,
    what: &str,
    line: usize,
) -> Result<(&'t str, usize), CorpusError> {
    match tokens.get(idx) {
        Some(Token::Quoted(q, c)) => Ok((q.as_str(), *c)),
        Some(Token::Word(_, c)) => Err(syntax(line, *c, format!("expected quoted {what}"))),
        None => Err(syntax(line, end_column(tokens), format!("expected quoted {what}"))),
    }
}

fn expect_id<'t>(tokens: &'t [Token], idx: usize, what: &str, line: usize) -> Result<&'t str, CorpusError> {
    let (word, col) = expect_word(tokens, idx, what, line)?;
    let ok = !word.is_empty()
        && word.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if !ok {
        return Err(syntax(line, col, format!("invalid {what} '{word}'")));
    }
    Ok(word)
}

fn expect_end(tokens: &[Token], idx: usize, line: usize) -> Result<(), CorpusError> {
    if let Some(extra) = tokens.get(idx) {
        return Err(syntax(line, extra.column(), "unexpected trailing tokens"));
    }
    Ok(())
}

fn end_column(tokens: &[Token]) -> usize {
    tokens.last().map(|t| t.column() + 1).unwrap_or(1)
}

#[derive(Default)]
struct AttackBuilder {
    attack_id: String,
    name: String,
    category: String,
    citation: Option<String>,
    nodes: Vec<StepNode>,
    edges: Vec<(String, String)>,
}

impl AttackBuilder {
    fn finish(self) -> Result<AttackCfg, CorpusError> {
        AttackCfg::new(
            &self.attack_id,
            &self.name,
            &self.category,
            self.citation.as_deref(),
            self.nodes,
            self.edges,
        )
        .map_err(CorpusError::from_cfg)
    }
}

/// Parses and validates corpus text.
pub fn parse(text: &str) -> Result<CorpusFile, CorpusError> {
    let mut header: Option<(String, String)> = None;
    let mut schema_len = 0usize;
    let mut attacks: Vec<AttackCfg> = Vec::new();
    let mut taxonomy: Vec<TaxonomyRow> = Vec::new();
    let mut current: Option<AttackBuilder> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens = tokenize(line_no, raw)?;
        let (keyword, kw_col) = expect_word(&tokens, 0, "a directive", line_no)?;

        if header.is_none() {
            if keyword != "corpus" {
                return Err(syntax(line_no, kw_col, "expected 'corpus <version> schema <version>' header"));
            }
            let (format_version, fv_col) = expect_word(&tokens, 1, "format version", line_no)?;
            expect_keyword(&tokens, 2, "schema", line_no)?;
            let (schema_version, _) = expect_word(&tokens, 3, "schema version", line_no)?;
            expect_end(&tokens, 4, line_no)?;
            if format_version != FORMAT_VERSION {
                let _ = fv_col;
                return Err(CorpusError::UnsupportedFormatVersion(format_version.to_string()));
            }
            if schema_version != default_schema().version() {
                return Err(CorpusError::UnknownSchemaVersion(schema_version.to_string()));
            }
            schema_len = default_schema().len();
            header = Some((format_version.to_string(), schema_version.to_string()));
            continue;
        }

        match keyword {
            "attack" => {
                if let Some(done) = current.take() {
                    attacks.push(done.finish()?);
                }
                let id = expect_id(&tokens, 1, "attack id", line_no)?;
                let (name, _) = expect_quoted(&tokens, 2, "attack name", line_no)?;
                expect_keyword(&tokens, 3, "category", line_no)?;
                let (category, _) = expect_word(&tokens, 4, "category", line_no)?;
                expect_end(&tokens, 5, line_no)?;
                current = Some(AttackBuilder {
                    attack_id: id.to_string(),
                    name: name.to_string(),
                    category: category.to_string(),
                    ..AttackBuilder::default()
                });
            }
            "cite" => {
                let builder = current
                    .as_mut()
                    .ok_or_else(|| syntax(line_no, kw_col, "'cite' outside an attack block"))?;
                let (citation, _) = expect_quoted(&tokens, 1, "citation", line_no)?;
                expect_end(&tokens, 2, line_no)?;
                builder.citation = Some(citation.to_string());
            }
            "node" => {
                let builder = current
                    .as_mut()
                    .ok_or_else(|| syntax(line_no, kw_col, "'node' outside an attack block"))?;
                let id = expect_id(&tokens, 1, "node id", line_no)?.to_string();
                expect_keyword(&tokens, 2, "layer", line_no)?;
                let (layer_word, layer_col) = expect_word(&tokens, 3, "layer", line_no)?;
                let layer = Layer::from_str(layer_word).map_err(|_| CorpusError::UnknownLayer {
                    line: line_no,
                    column: layer_col,
                    layer: layer_word.to_string(),
                })?;
                expect_keyword(&tokens, 4, "bits", line_no)?;
                let (bits_word, bits_col) = expect_word(&tokens, 5, "bit string", line_no)?;
                let bits = BitVector::parse(bits_word)
                    .map_err(|pos| syntax(line_no, bits_col + pos, "bit string may only contain 0 and 1"))?;
                if bits.len() != schema_len {
                    return Err(CorpusError::FeatureLengthMismatch {
                        attack_id: builder.attack_id.clone(),
                        node_id: id,
                        expected: schema_len,
                        got: bits.len(),
                    });
                }
                let (label, label_col) = expect_quoted(&tokens, 6, "label", line_no)?;
                let description = match tokens.get(7) {
                    None => "",
                    Some(Token::Quoted(d, _)) => {
                        expect_end(&tokens, 8, line_no)?;
                        d.as_str()
                    }
                    Some(Token::Word(_, c)) => {
                        return Err(syntax(line_no, *c, "expected quoted description"));
                    }
                };
                if label.contains('\n') {
                    return Err(syntax(line_no, label_col, "label may not contain newlines"));
                }
                let node = StepNode::new(&id, label, layer, description, bits)
                    .map_err(|_| syntax(line_no, label_col, "label must be non-empty"))?;
                builder.nodes.push(node);
            }
            "edge" => {
                let builder = current
                    .as_mut()
                    .ok_or_else(|| syntax(line_no, kw_col, "'edge' outside an attack block"))?;
                let src = expect_id(&tokens, 1, "source node id", line_no)?.to_string();
                expect_keyword(&tokens, 2, "->", line_no)?;
                let dst = expect_id(&tokens, 3, "target node id", line_no)?.to_string();
                expect_end(&tokens, 4, line_no)?;
                builder.edges.push((src, dst));
            }
            "taxon" => {
                let (system_word, system_col) = expect_word(&tokens, 1, "system", line_no)?;
                let system = System::from_str(system_word)
                    .map_err(|_| syntax(line_no, system_col, format!("unknown system '{system_word}'")))?;
                let (category_word, category_col) = expect_word(&tokens, 2, "category", line_no)?;
                let category = Category::from_str(category_word).map_err(|_| {
                    syntax(line_no, category_col, format!("unknown category '{category_word}'"))
                })?;
                let (threat, _) = expect_quoted(&tokens, 3, "threat", line_no)?;
                let (description, _) = expect_quoted(&tokens, 4, "description", line_no)?;
                expect_end(&tokens, 5, line_no)?;
                taxonomy.push(TaxonomyRow {
                    system,
                    category,
                    threat: threat.to_string(),
                    description: description.to_string(),
                });
            }
            other => {
                return Err(syntax(line_no, kw_col, format!("unknown directive '{other}'")));
            }
        }
    }

    let (format_version, schema_version) = header.ok_or_else(|| syntax(1, 1, "missing corpus header"))?;
    if let Some(done) = current.take() {
        attacks.push(done.finish()?);
    }
    CorpusFile::new(&format_version, &schema_version, attacks, taxonomy)
}

/// Convenience wrapper used by the CLI: resolves a bundled-corpus name.
pub fn bundled_by_name(name: &str) -> Option<Bundled> {
    name.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "corpus 1 schema v1\n";

    #[test]
    fn empty_attack_list_parses() {
        let corpus = parse(HEADER).unwrap();
        assert_eq!(corpus.attacks().len(), 0);
        assert_eq!(corpus.format_version, "1");
        assert_eq!(corpus.schema_version, "v1");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored()  {
        let text = format!("# leading comment\n\n{HEADER}# another\n\n");
        assert!(parse(&text).is_ok());
    }

    #[test]
    fn minimal_attack_parses() {
        let text = format!(
            "{HEADER}attack t \"Test\" category DoS\n\
             node a layer network bits 0000000000000000 \"first step\"\n\
             node b layer network bits 0000000000000100 \"final step\" \"impact\"\n\
             edge a -> b\n"
        );
        let corpus = parse(&text).unwrap();
        assert_eq!(corpus.attacks().len(), 1);
        let cfg = &corpus.attacks()[0];
        assert_eq!(cfg.nodes().len(), 2);
        assert_eq!(cfg.node("b").unwrap().description, "impact");
    }

    #[test]
    fn dangling_edge_is_reported() {
        let text = format!(
            "{HEADER}attack t \"Test\" category DoS\n\
             node a layer network bits 0000000000000000 \"step\"\n\
             edge a -> x9\n"
        );
        assert!(matches!(
            parse(&text),
            Err(CorpusError::DanglingEdge { node_id, .. }) if node_id == "x9"
        ));
    }

    #[test]
    fn unknown_layer_is_reported_with_position() {
        let text = format!(
            "{HEADER}attack t \"Test\" category DoS\n\
             node a layer cloud bits 0000000000000000 \"step\"\n"
        );
        assert!(matches!(
            parse(&text),
            Err(CorpusError::UnknownLayer { line: 3, layer, .. }) if layer == "cloud"
        ));
    }

    #[test]
    fn wrong_bit_count_is_reported() {
        let text = format!(
            "{HEADER}attack t \"Test\" category DoS\n\
             node a layer network bits 0101 \"step\"\n"
        );
        assert!(matches!(
            parse(&text),
            Err(CorpusError::FeatureLengthMismatch { expected: 16, got: 4, .. })
        ));
    }

    #[test]
    fn cyclic_cfg_is_reported() {
        let text = format!(
            "{HEADER}attack t \"Test\" category DoS\n\
             node a layer network bits 0000000000000000 \"one\"\n\
             node b layer network bits 0000000000000000 \"two\"\n\
             edge a -> b\n\
             edge b -> a\n"
        );
        assert!(matches!(parse(&text), Err(CorpusError::CyclicCfg { .. })));
    }

    #[test]
    fn unterminated_quote_is_a_syntax_error() {
        let text = format!("{HEADER}attack t \"Test category DoS\n");
        assert!(matches!(parse(&text), Err(CorpusError::Syntax { line: 2, .. })));
    }

    #[test]
    fn header_must_come_first() {
        assert!(matches!(
            parse("attack t \"Test\" category DoS\n"),
            Err(CorpusError::Syntax { line: 1, .. })
        ));
        assert!(matches!(parse(""), Err(CorpusError::Syntax { line: 1, column: 1, .. })));
    }

    #[test]
    fn bad_versions_are_rejected() {
        assert!(matches!(
            parse("corpus 9 schema v1\n"),
            Err(CorpusError::UnsupportedFormatVersion(v)) if v == "9"
        ));
        assert!(matches!(
            parse("corpus 1 schema v9\n"),
            Err(CorpusError::UnknownSchemaVersion(v)) if v == "v9"
        ));
    }

    #[test]
    fn taxon_lines_parse() {
        let text = format!(
            "{HEADER}taxon EPC Availability \"Flooding an interface\" \"flooded until denial\"\n"
        );
        let corpus = parse(&text).unwrap();
        assert_eq!(corpus.taxonomy().len(), 1);
        assert_eq!(corpus.taxonomy()[0].system, System::Epc);
    }

    proptest! {
        // Parsing must be total: arbitrary input never panics.
        #[test]
        fn parse_never_panics(input in "\\PC*") {
            let _ = parse(&input);
        }

        #[test]
        fn parse_never_panics_on_header_plus_noise(noise in "\\PC*") {
            let _ = parse(&format!("corpus 1 schema v1\n{noise}"));
        }
    }
}
