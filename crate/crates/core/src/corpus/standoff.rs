//! The `.rsta` standoff format: one text, a span layer, and a relation layer.
//!
//! ```text
//! #DOC archer
//! #TEXT Archer could play in the World Cup but will not play test cricket.
//! SPAN s1 0 36
//! SPAN s2 37 67
//! REL s1 s2 Contrast
//! ```
//!
//! `#DOC` must be the first line and appear once. `#TEXT` lines are joined
//! with `\n`; everything after `#TEXT ` is taken verbatim. Other lines starting
//! with `#` are comments and blank lines are ignored. Offsets count Unicode
//! scalar values, end exclusive.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{CorpusError, LabeledPair, Location};
use crate::labels::LabelSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub id: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub source: String,
    pub target: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedDocument {
    pub doc_id: String,
    pub text: String,
    pub spans: Vec<Span>,
    pub relations: Vec<Relation>,
}

impl AnnotatedDocument {
    pub fn span(&self, id: &str) -> Option<&Span> {
        self.spans.iter().find(|s| s.id == id)
    }

    /// The text covered by `span`, untrimmed. Offsets are clamped to the text.
    pub fn slice(&self, span: &Span) -> &str {
        let byte_at = |chars: usize| {
            self.text
                .char_indices()
                .nth(chars)
                .map_or(self.text.len(), |(b, _)| b)
        };
        let (start, end) = (byte_at(span.start), byte_at(span.end));
        &self.text[start..end.max(start)]
    }
}

fn syntax(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::SyntaxError {
        line,
        message: message.into(),
    }
}

fn is_span_id(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

fn parse_offset(field: &str, line: usize) -> Result<usize, CorpusError> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("offset `{field}` is not a decimal integer")));
    }
    field
        .parse()
        .map_err(|_| syntax(line, format!("offset `{field}` is out of range")))
}

/// Four space-separated fields: keyword plus three operands.
fn operands<'a>(line_text: &'a str, line: usize, what: &str) -> Result<[&'a str; 3], CorpusError> {
    let fields: Vec<&str> = line_text.split(' ').collect();
    match fields.as_slice() {
        [_, a, b, c] if !a.is_empty() && !b.is_empty() && !c.is_empty() => Ok([a, b, c]),
        _ => Err(syntax(
            line,
            format!("expected `{what}` with fields separated by single spaces"),
        )),
    }
}

/// Parses a standoff document, enforcing offset bounds, unique span ids,
/// referential integrity of relations, and label validity.
///
/// Line-level problems (syntax, duplicate ids, labels) are reported in line
/// order first; offset and reference checks run once the whole text is known.
pub fn parse_standoff(content: &str, labels: &LabelSet) -> Result<AnnotatedDocument, CorpusError> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut doc_id: Option<String> = None;
    let mut text_lines: Vec<&str> = Vec::new();
    let mut spans: Vec<(usize, Span)> = Vec::new();
    let mut relations: Vec<(usize, Relation)> = Vec::new();
    let mut span_index: HashMap<String, usize> = HashMap::new();

    for (i, raw) in content.split('\n').enumerate() {
        let line = i + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        let keyword = text.split(' ').next().unwrap_or_default();

        if line == 1 && keyword != "#DOC" {
            return Err(syntax(1, "document must start with `#DOC <doc-id>`"));
        }
        match keyword {
            "#DOC" => {
                if doc_id.is_some() {
                    return Err(syntax(line, "`#DOC` may appear only once"));
                }
                let id = text.strip_prefix("#DOC ").unwrap_or_default();
                if id.is_empty() || id.contains(char::is_whitespace) {
                    return Err(syntax(line, "expected `#DOC <doc-id>`"));
                }
                doc_id = Some(id.to_string());
            }
            "#TEXT" => text_lines.push(text.strip_prefix("#TEXT").unwrap_or_default().strip_prefix(' ').unwrap_or_default()),
            "SPAN" => {
                let [id, start, end] = operands(text, line, "SPAN <span-id> <start> <end>")?;
                if !is_span_id(id) {
                    return Err(syntax(line, format!("invalid span id `{id}`")));
                }
                let (start, end) = (parse_offset(start, line)?, parse_offset(end, line)?);
                if span_index.contains_key(id) {
                    return Err(CorpusError::DuplicateSpanId {
                        line,
                        span_id: id.to_string(),
                    });
                }
                span_index.insert(id.to_string(), spans.len());
                spans.push((
                    line,
                    Span {
                        id: id.to_string(),
                        start,
                        end,
                    },
                ));
            }
            "REL" => {
                let [source, target, raw_label] = operands(text, line, "REL <source> <target> <Label>")?;
                for id in [source, target] {
                    if !is_span_id(id) {
                        return Err(syntax(line, format!("invalid span id `{id}`")));
                    }
                }
                let label = labels
                    .normalize(raw_label)
                    .ok_or_else(|| CorpusError::UnknownLabel {
                        at: Location::Line(line),
                        name: raw_label.to_string(),
                        nearest: labels.nearest(raw_label).to_string(),
                    })?;
                relations.push((
                    line,
                    Relation {
                        source: source.to_string(),
                        target: target.to_string(),
                        label: label.to_string(),
                    },
                ));
            }
            _ if text.trim().is_empty() => {}
            _ if text.starts_with('#') => {}
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let doc_id = doc_id.ok_or_else(|| syntax(1, "document must start with `#DOC <doc-id>`"))?;
    let text = text_lines.join("\n");
    let len = text.chars().count();

    for (line, span) in &spans {
        if span.start >= span.end || span.end > len {
            return Err(CorpusError::BadOffset {
                line: *line,
                span_id: span.id.clone(),
                start: span.start,
                end: span.end,
                len,
            });
        }
    }
    for (line, rel) in &relations {
        for id in [&rel.source, &rel.target] {
            if !span_index.contains_key(id) {
                return Err(CorpusError::DanglingRelation {
                    line: *line,
                    span_id: id.clone(),
                });
            }
        }
    }

    Ok(AnnotatedDocument {
        doc_id,
        text,
        spans: spans.into_iter().map(|(_, s)| s).collect(),
        relations: relations.into_iter().map(|(_, r)| r).collect(),
    })
}

/// One pair per relation, in declaration order, with span texts trimmed.
pub fn pairs_from_document(doc: &AnnotatedDocument) -> Result<Vec<LabeledPair>, CorpusError> {
    let unit = |id: &str| -> Result<String, CorpusError> {
        let empty = || CorpusError::EmptyEdu {
            at: Location::Span(id.to_string()),
        };
        let span = doc.span(id).ok_or_else(empty)?;
        let text = doc.slice(span).trim();
        if text.is_empty() {
            return Err(empty());
        }
        Ok(text.to_string())
    };
    doc.relations
        .iter()
        .map(|rel| {
            Ok(LabeledPair {
                edu1: unit(&rel.source)?,
                edu2: unit(&rel.target)?,
                label: rel.label.clone(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ARCHER: &str = "England pace bowler Jofra Archer could play in this year's T20 World Cup but will not play test cricket until 2025, according to England managing director Rob Key.";

    fn parse(s: &str) -> Result<AnnotatedDocument, CorpusError> {
        parse_standoff(s, &LabelSet::canonical())
    }

    fn archer_doc() -> String {
        format!(
            "#DOC archer\n#TEXT {ARCHER}\nSPAN e1 0 76\nSPAN e2 77 115\nSPAN e12 0 115\nSPAN e3 116 163\nREL e1 e2 Contrast\nREL e12 e3 Background\n"
        )
    }

    #[test]
    fn minimal_document() {
        let doc = parse("#DOC d\n#TEXT ab cd\nSPAN s1 0 2\nSPAN s2 3 5\nREL s1 s2 Contrast\n").unwrap();
        assert_eq!(doc.doc_id, "d");
        assert_eq!(doc.spans.len(), 2);
        assert_eq!(doc.relations.len(), 1);
    }

    #[test]
    fn nested_background_contrast_example() {
        let doc = parse(&archer_doc()).unwrap();
        assert_eq!(doc.spans.len(), 4);
        assert_eq!(doc.relations.len(), 2);
        let pairs = pairs_from_document(&doc).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(
            pairs[0].edu1,
            "England pace bowler Jofra Archer could play in this year's T20 World Cup but"
        );
        assert_eq!(pairs[0].edu2, "will not play test cricket until 2025,");
        assert_eq!(pairs[0].label, "Contrast");
        assert_eq!(
            pairs[1].edu1,
            "England pace bowler Jofra Archer could play in this year's T20 World Cup but will not play test cricket until 2025,"
        );
        assert_eq!(pairs[1].edu2, "according to England managing director Rob Key.");
        assert_eq!(pairs[1].label, "Background");
    }

    #[test]
    fn dangling_relation_reports_line() {
        let err = parse("#DOC d\n#TEXT ab cd\nSPAN s1 0 2\n\nREL s1 s9 Joint\n").unwrap_err();
        assert_eq!(
            err,
            CorpusError::DanglingRelation {
                line: 5,
                span_id: "s9".into()
            }
        );
    }

    #[test]
    fn offset_and_id_errors() {
        assert!(matches!(
            parse("#DOC d\n#TEXT abc\nSPAN s1 2 2\n"),
            Err(CorpusError::BadOffset { line: 3, .. })
        ));
        assert!(matches!(
            parse("#DOC d\n#TEXT abc\nSPAN s1 0 4\n"),
            Err(CorpusError::BadOffset { line: 3, len: 3, .. })
        ));
        assert!(matches!(
            parse("#DOC d\n#TEXT abc\nSPAN s1 0 1\nSPAN s1 1 2\n"),
            Err(CorpusError::DuplicateSpanId { line: 4, .. })
        ));
        assert!(matches!(
            parse("#DOC d\n#TEXT abc\nSPAN s1 0 1\nSPAN s2 1 2\nREL s1 s2 Cause\n"),
            Err(CorpusError::UnknownLabel { at: Location::Line(5), .. })
        ));
    }

    #[test]
    fn syntax_errors() {
        for (src, line) in [
            ("", 1),
            ("#TEXT x\n#DOC d\n", 1),
            ("#DOC d\n#DOC e\n", 2),
            ("#DOC d\n#TEXT abc\nSPAN s1  0 1\n", 3),
            ("#DOC d\n#TEXT abc\nSPAN s1 0 x\n", 3),
            ("#DOC d\n#TEXT abc\nSPAN s.1 0 1\n", 3),
            ("#DOC d\n#TEXT abc\nNODE s1\n", 3),
            ("#DOC d\n#TEXT abc\n SPAN s1 0 1\n", 3),
            ("#DOC d\n#TEXT abc\nSPAN s1 0 1 2\n", 3),
            ("#DOC\n", 1),
        ] {
            match parse(src) {
                Err(CorpusError::SyntaxError { line: l, .. }) => assert_eq!(l, line, "{src:?}"),
                other => panic!("{src:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn text_lines_join_and_offsets_count_chars() {
        let doc = parse("#DOC d\r\n#TEXT héllo\r\n# note\r\n#TEXT  wörld\r\nSPAN a 0 5\r\nSPAN b 6 12\r\nREL a b Joint\r\n").unwrap();
        assert_eq!(doc.text, "héllo\n wörld");
        let pairs = pairs_from_document(&doc).unwrap();
        assert_eq!(pairs[0].edu1, "héllo");
        assert_eq!(pairs[0].edu2, "wörld");
    }

    #[test]
    fn zero_relations_and_whitespace_trimming() {
        let doc = parse("#DOC d\n#TEXT abc\nSPAN s1 0 3\n").unwrap();
        assert!(pairs_from_document(&doc).unwrap().is_empty());

        let text = "x  will not play test cricket until 2025,  y";
        let doc = parse(&format!(
            "#DOC d\n#TEXT {text}\nSPAN a 0 1\nSPAN b 1 43\nREL a b Contrast\n"
        ))
        .unwrap();
        let pairs = pairs_from_document(&doc).unwrap();
        assert_eq!(pairs[0].edu2, "will not play test cricket until 2025,");
    }

    #[test]
    fn whitespace_only_span_is_empty_edu() {
        let doc = parse("#DOC d\n#TEXT a   b\nSPAN s1 0 1\nSPAN s2 1 4\nREL s1 s2 Joint\n").unwrap();
        assert_eq!(
            pairs_from_document(&doc),
            Err(CorpusError::EmptyEdu {
                at: Location::Span("s2".into())
            })
        );
    }

    proptest! {
        #[test]
        fn emitted_units_are_trimmed_substrings(
            words in prop::collection::vec("[a-zé ]{1,8}", 2..8),
            cuts in prop::collection::vec((0usize..64, 1usize..64), 1..6),
        ) {
            let text: String = words.join(" ");
            let len = text.chars().count();
            let mut src = format!("#DOC p\n#TEXT {text}\n");
            let mut n = 0;
            for (i, (a, w)) in cuts.iter().enumerate() {
                let start = a % len;
                let end = (start + w).min(len);
                if start < end {
                    src.push_str(&format!("SPAN s{i} {start} {end}\n"));
                    n = i;
                }
            }
            src.push_str(&format!("REL s{n} s{n} Joint\n"));
            if let Ok(doc) = parse(&src) {
                if let Ok(pairs) = pairs_from_document(&doc) {
                    let span = doc.span(&format!("s{n}")).unwrap();
                    let sub: String = doc.text.chars().skip(span.start).take(span.end - span.start).collect();
                    prop_assert_eq!(&pairs[0].edu1, sub.trim());
                }
            }
        }

        #[test]
        fn arbitrary_input_never_panics(s in "\\PC*") {
            let _ = parse(&s);
            let _ = parse(&format!("#DOC x\n{s}"));
        }
    }
}
