use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError, Document, Provenance, Tag};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestOptions {
    /// Skip records whose text is empty or whitespace-only.
    pub drop_empty_text: bool,
}

#[derive(Deserialize)]
struct Record {
    id: String,
    text: String,
    #[serde(default)]
    created_at: Option<String>,
    #[serde(default)]
    tags: Option<Vec<String>>,
    #[serde(default)]
    author: Option<String>,
}

/// Reads one JSON object per nonblank line:
/// `{"id", "text", "created_at"?, "tags"?, "author"?}`.
pub fn ingest_jsonl(path: &Path, opts: &IngestOptions) -> Result<Corpus, CorpusError> {
    let io = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    let mut corpus = parse_jsonl(BufReader::new(file), opts).map_err(|e| match e {
        CorpusError::Io { source, .. } => io(source),
        other => other,
    })?;
    corpus.provenance.source = Some(path.to_path_buf());
    Ok(corpus)
}

pub fn parse_jsonl<R: BufRead>(reader: R, opts: &IngestOptions) -> Result<Corpus, CorpusError> {
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: Default::default(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| CorpusError::Parse {
            line: line_no,
            message,
        };
        let rec: Record = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        if rec.id.is_empty() {
            return Err(parse_err("empty id".into()));
        }
        if opts.drop_empty_text && rec.text.trim().is_empty() {
            continue;
        }
        let created_at = rec
            .created_at
            .map(|s| {
                DateTime::parse_from_rfc3339(&s)
                    .map(|t| t.with_timezone(&Utc))
                    .map_err(|e| parse_err(format!("created_at {s:?}: {e}")))
            })
            .transpose()?;
        let mut tags = BTreeSet::new();
        for t in rec.tags.unwrap_or_default() {
            tags.insert(Tag::new(&t).map_err(|_| parse_err(format!("invalid tag {t:?}")))?);
        }
        if !seen.insert(rec.id.clone()) {
            return Err(CorpusError::DuplicateId(rec.id));
        }
        documents.push(Document {
            id: rec.id,
            raw_text: rec.text,
            created_at,
            tags,
            author: rec.author,
        });
    }
    Corpus::with_provenance(
        documents,
        Provenance {
            source: None,
            options: opts.clone(),
            steps: Vec::new(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Corpus, CorpusError> {
        parse_jsonl(s.as_bytes(), &IngestOptions::default())
    }

    #[test]
    fn empty_input() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("\n  \n").unwrap().is_empty());
    }

    #[test]
    fn three_lines_in_order() {
        let c = parse(concat!(
            r##"{"id":"a","text":"one","tags":["#StayWoke","woke"],"author":"u1"}"##,
            "\n",
            r#"{"id":"b","text":"two","created_at":"2019-04-18T12:00:00+02:00"}"#,
            "\n",
            r#"{"id":"c","text":"three","extra":1}"#,
            "\n"
        ))
        .unwrap();
        let ids: Vec<_> = c.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        let a = &c.documents()[0];
        let tags: Vec<_> = a.tags.iter().map(Tag::as_str).collect();
        assert_eq!(tags, ["staywoke", "woke"]);
        assert_eq!(a.author.as_deref(), Some("u1"));
        let b = &c.documents()[1];
        assert_eq!(
            b.created_at.unwrap().to_rfc3339(),
            "2019-04-18T10:00:00+00:00"
        );
        assert!(b.tags.is_empty());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse("{\"id\":\"a\",\"text\":\"x\"}\n{\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 2, .. }));
        assert!(err.to_string().starts_with("line 2"));
    }

    #[test]
    fn missing_text_is_parse_error() {
        assert!(matches!(
            parse(r#"{"id":"a"}"#),
            Err(CorpusError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn bad_timestamp() {
        let err = parse(r#"{"id":"a","text":"x","created_at":"yesterday"}"#).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 1, .. }));
    }

    #[test]
    fn duplicate_id_named() {
        let err =
            parse("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}").unwrap_err();
        assert_eq!(err.to_string(), "duplicate document id \"a\"");
    }

    #[test]
    fn drop_empty_text_option() {
        let opts = IngestOptions {
            drop_empty_text: true,
        };
        let c = parse_jsonl(
            "{\"id\":\"a\",\"text\":\" \"}\n{\"id\":\"b\",\"text\":\"y\"}".as_bytes(),
            &opts,
        )
        .unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn unreadable_file() {
        let err =
            ingest_jsonl(Path::new("/nonexistent/x.jsonl"), &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, CorpusError::Io { .. }));
    }
}
