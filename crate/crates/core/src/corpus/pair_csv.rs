use super::{CorpusError, LabeledPair, Location};
use crate::labels::LabelSet;

pub const PAIR_CSV_HEADER: &str = "EDU1,EDU2,Label";

/// Parses a pair CSV (header `EDU1,EDU2,Label`, RFC-4180 quoting, LF or CRLF).
///
/// Labels are normalized against `labels`. The first problem found is
/// returned with its 1-based data row.
pub fn parse_pair_csv(content: &str, labels: &LabelSet) -> Result<Vec<LabeledPair>, CorpusError> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(content.as_bytes());
    let mut records = reader.records();

    match records.next() {
        Some(Ok(header)) if header.iter().eq(["EDU1", "EDU2", "Label"]) => {}
        Some(Ok(header)) => {
            return Err(CorpusError::MissingHeader {
                found: header.iter().collect::<Vec<_>>().join(","),
            })
        }
        Some(Err(e)) => {
            return Err(CorpusError::Csv {
                row: 0,
                message: e.to_string(),
            })
        }
        None => {
            return Err(CorpusError::MissingHeader {
                found: String::new(),
            })
        }
    }

    let mut pairs = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CorpusError::Csv {
            row,
            message: e.to_string(),
        })?;
        if record.len() != 3 {
            return Err(CorpusError::MalformedRow {
                row,
                fields: record.len(),
            });
        }
        let (edu1, edu2, raw_label) = (&record[0], &record[1], &record[2]);
        if edu1.trim().is_empty() || edu2.trim().is_empty() {
            return Err(CorpusError::EmptyEdu {
                at: Location::Row(row),
            });
        }
        let label = labels
            .normalize(raw_label)
            .ok_or_else(|| CorpusError::UnknownLabel {
                at: Location::Row(row),
                name: raw_label.to_string(),
                nearest: labels.nearest(raw_label).to_string(),
            })?;
        pairs.push(LabeledPair {
            edu1: edu1.to_string(),
            edu2: edu2.to_string(),
            label: label.to_string(),
        });
    }
    Ok(pairs)
}

/// Serializes pairs under the standard header with LF line endings. A field
/// is quoted exactly when it contains a comma, a double quote, or a line break.
pub fn write_pair_csv(pairs: &[LabeledPair]) -> String {
    let mut out = String::with_capacity(64 * (pairs.len() + 1));
    out.push_str(PAIR_CSV_HEADER);
    out.push('\n');
    for pair in pairs {
        push_field(&mut out, &pair.edu1);
        out.push(',');
        push_field(&mut out, &pair.edu2);
        out.push(',');
        push_field(&mut out, &pair.label);
        out.push('\n');
    }
    out
}

fn push_field(out: &mut String, field: &str) {
    if field.contains([',', '"', '\n', '\r']) {
        out.push('"');
        out.push_str(&field.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(field);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ARCHER_1: &str = "England pace bowler Jofra Archer could play in this year's T20 World Cup but";
    const ARCHER_2: &str = "will not play test cricket until 2025";
    const ARCHER_12: &str = "England pace bowler Jofra Archer could play in this year's T20 World Cup but will not play test cricket until 2025";
    const ARCHER_3: &str = "according to England managing director Rob Key.";

    fn canonical() -> LabelSet {
        LabelSet::canonical()
    }

    #[test]
    fn parses_quoted_table_row() {
        let content = format!("EDU1,EDU2,Label\n\"{ARCHER_1}\",\"{ARCHER_2}\",Contrast\n");
        let pairs = parse_pair_csv(&content, &canonical()).unwrap();
        assert_eq!(
            pairs,
            vec![LabeledPair {
                edu1: ARCHER_1.into(),
                edu2: ARCHER_2.into(),
                label: "Contrast".into()
            }]
        );
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_pair_csv("EDU1,EDU2,Label\n", &canonical()).unwrap().is_empty());
        assert!(parse_pair_csv("EDU1,EDU2,Label", &canonical()).unwrap().is_empty());
    }

    #[test]
    fn unknown_label_names_row_and_suggestion() {
        let err = parse_pair_csv("EDU1,EDU2,Label\na,b,Cause\n", &canonical()).unwrap_err();
        assert_eq!(
            err,
            CorpusError::UnknownLabel {
                at: Location::Row(1),
                name: "Cause".into(),
                nearest: "Cause-Effect".into()
            }
        );
        assert!(err.to_string().contains("Cause-Effect"));
    }

    #[test]
    fn header_and_shape_errors() {
        assert!(matches!(
            parse_pair_csv("", &canonical()),
            Err(CorpusError::MissingHeader { .. })
        ));
        assert!(matches!(
            parse_pair_csv("edu1,edu2,label\n", &canonical()),
            Err(CorpusError::MissingHeader { .. })
        ));
        assert_eq!(
            parse_pair_csv("EDU1,EDU2,Label\na,b,Joint\na,Joint\n", &canonical()),
            Err(CorpusError::MalformedRow { row: 2, fields: 2 })
        );
        assert_eq!(
            parse_pair_csv("EDU1,EDU2,Label\n\"  \",b,Joint\n", &canonical()),
            Err(CorpusError::EmptyEdu { at: Location::Row(1) })
        );
    }

    #[test]
    fn crlf_and_label_variants_accepted() {
        let pairs =
            parse_pair_csv("EDU1,EDU2,Label\r\na,b,re-statement\r\nc,d,JOINT\r\n", &canonical())
                .unwrap();
        assert_eq!(pairs[0].label, "Restatement");
        assert_eq!(pairs[1].label, "Joint");
    }

    #[test]
    fn writer_quotes_only_when_needed() {
        assert_eq!(write_pair_csv(&[]), "EDU1,EDU2,Label\n");
        let pairs = vec![LabeledPair {
            edu1: "will not play test cricket until 2025, apparently".into(),
            edu2: "plain text".into(),
            label: "Contrast".into(),
        }];
        let text = write_pair_csv(&pairs);
        assert_eq!(
            text,
            "EDU1,EDU2,Label\n\"will not play test cricket until 2025, apparently\",plain text,Contrast\n"
        );
        assert_eq!(parse_pair_csv(&text, &canonical()).unwrap(), pairs);
    }

    #[test]
    fn table_rows_roundtrip() {
        let pairs = vec![
            LabeledPair {
                edu1: ARCHER_1.into(),
                edu2: ARCHER_2.into(),
                label: "Contrast".into(),
            },
            LabeledPair {
                edu1: ARCHER_12.into(),
                edu2: ARCHER_3.into(),
                label: "Background".into(),
            },
        ];
        let text = write_pair_csv(&pairs);
        assert_eq!(parse_pair_csv(&text, &canonical()).unwrap(), pairs);
    }

    fn edu() -> impl Strategy<Value = String> {
        "[ a-zA-Z0-9,\"\n\r'é—]{0,24}[a-z\"]".prop_map(|s| s)
    }

    proptest! {
        #[test]
        fn roundtrip_identity(rows in prop::collection::vec((edu(), edu(), 0usize..8), 0..20)) {
            let set = canonical();
            let pairs: Vec<LabeledPair> = rows
                .into_iter()
                .map(|(a, b, c)| LabeledPair { edu1: a, edu2: b, label: set.name(c).unwrap().into() })
                .collect();
            let text = write_pair_csv(&pairs);
            prop_assert_eq!(parse_pair_csv(&text, &set).unwrap(), pairs);
        }

        #[test]
        fn arbitrary_input_never_panics(s in "\\PC*") {
            let _ = parse_pair_csv(&s, &canonical());
        }
    }
}
