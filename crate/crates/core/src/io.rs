//! On-disk formats.
//!
//! Corpus files are JSON:
//!
//! ```json
//! {
//!   "documents": [
//!     {"id": "ap-1", "published": "1999-10-05T10:20",
//!      "sentences": ["...", "..."], "segments": [0, 1]}
//!   ],
//!   "themes": [
//!     {"id": "t1", "members": [{"doc": "ap-1", "pos": 0}]}
//!   ]
//! }
//! ```
//!
//! Orderings files are plain text. The first line is the space-separated label
//! inventory, every further non-empty line one permutation of it.

use std::collections::HashMap;
use std::fmt::Write as _;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};
use crate::model::{validate_corpus, Corpus, Document, PublicationTime, SentenceRef, Theme};

#[derive(Serialize, Deserialize)]
struct RawCorpus {
    documents: Vec<RawDocument>,
    themes: Vec<RawTheme>,
}

#[derive(Serialize, Deserialize)]
struct RawDocument {
    id: String,
    published: String,
    sentences: Vec<String>,
    segments: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawTheme {
    id: String,
    members: Vec<RawMember>,
}

#[derive(Serialize, Deserialize)]
struct RawMember {
    doc: String,
    pos: usize,
}

/// Parses `YYYY-MM-DDTHH:MM`. Seconds and fractions are accepted and
/// truncated; the flag reports whether that happened.
pub fn parse_time(s: &str) -> Option<(PublicationTime, bool)> {
    if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M") {
        return Some((PublicationTime::truncating(dt).0, false));
    }
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")
        .ok()
        .map(PublicationTime::truncating)
}

/// Parses and validates a corpus file.
pub fn parse_corpus(raw: &[u8]) -> Result<Corpus> {
    parse_corpus_with_warnings(raw).map(|(c, _)| c)
}

/// Like [`parse_corpus`], also returning non-fatal warnings (currently only
/// truncated timestamps).
pub fn parse_corpus_with_warnings(raw: &[u8]) -> Result<(Corpus, Vec<String>)> {
    let (corpus, warnings) = parse_corpus_unchecked(raw)?;
    let violations = validate_corpus(&corpus);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok((corpus, warnings))
}

/// Parses a corpus file without validating it.
pub fn parse_corpus_unchecked(raw: &[u8]) -> Result<(Corpus, Vec<String>)> {
    let parsed: RawCorpus = serde_json::from_slice(raw).map_err(|e| Error::Parse {
        location: Location::Line { line: e.line(), column: e.column() },
        message: e.to_string(),
    })?;
    let mut warnings = Vec::new();
    let mut documents = Vec::with_capacity(parsed.documents.len());
    for (i, d) in parsed.documents.into_iter().enumerate() {
        let (published, truncated) = parse_time(&d.published).ok_or_else(|| Error::Parse {
            location: Location::Field(format!("documents[{i}].published")),
            message: format!("`{}` is not a YYYY-MM-DDTHH:MM timestamp", d.published),
        })?;
        if truncated {
            warnings.push(format!(
                "document `{}`: publication time `{}` truncated to {}",
                d.id, d.published, published
            ));
        }
        documents.push(Document { id: d.id, published, sentences: d.sentences, segments: d.segments });
    }
    let themes = parsed
        .themes
        .into_iter()
        .map(|t| Theme {
            id: t.id,
            members: t.members.into_iter().map(|m| SentenceRef::new(m.doc, m.pos)).collect(),
        })
        .collect();
    Ok((Corpus { documents, themes }, warnings))
}

pub fn serialize_corpus(corpus: &Corpus) -> String {
    let raw = RawCorpus {
        documents: corpus
            .documents
            .iter()
            .map(|d| RawDocument {
                id: d.id.clone(),
                published: d.published.to_string(),
                sentences: d.sentences.clone(),
                segments: d.segments.clone(),
            })
            .collect(),
        themes: corpus
            .themes
            .iter()
            .map(|t| RawTheme {
                id: t.id.clone(),
                members: t
                    .members
                    .iter()
                    .map(|m| RawMember { doc: m.doc.clone(), pos: m.pos })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("corpus serializes");
    s.push('\n');
    s
}

/// Several alternative total orders over one label inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Each ordering as indices into `labels`.
    orderings: Vec<Vec<usize>>,
}

impl OrderingSet {
    pub fn new<L, O, S>(labels: L, orderings: O) -> Result<Self>
    where
        L: IntoIterator<Item = S>,
        O: IntoIterator,
        O::Item: IntoIterator,
        <O::Item as IntoIterator>::Item: AsRef<str>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let index = label_index(&labels).map_err(|l| Error::Parse {
            location: Location::Line { line: 1, column: 1 },
            message: format!("label `{l}` listed twice in the inventory"),
        })?;
        let mut set = Self { labels, index, orderings: Vec::new() };
        for (row, ordering) in orderings.into_iter().enumerate() {
            let tokens: Vec<String> = ordering.into_iter().map(|s| s.as_ref().to_string()).collect();
            let perm = set.permutation(&tokens).map_err(|message| Error::Parse {
                location: Location::Line { line: row + 2, column: 1 },
                message: format!("row {}: {message}", row + 1),
            })?;
            set.orderings.push(perm);
        }
        if set.orderings.is_empty() {
            return Err(Error::Parse {
                location: Location::Line { line: 2, column: 1 },
                message: "at least one ordering is required".into(),
            });
        }
        Ok(set)
    }

    fn permutation<S: AsRef<str>>(&self, tokens: &[S]) -> std::result::Result<Vec<usize>, String> {
        let mut seen = vec![false; self.labels.len()];
        let mut perm = Vec::with_capacity(tokens.len());
        for t in tokens {
            let t = t.as_ref();
            let i = *self.index.get(t).ok_or_else(|| format!("unknown label `{t}`"))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(format!("duplicate label `{t}`"));
            }
            perm.push(i);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(format!("missing label `{}`", self.labels[missing]));
        }
        Ok(perm)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Orderings as index sequences into [`labels`](Self::labels).
    pub fn orderings(&self) -> &[Vec<usize>] {
        &self.orderings
    }

    pub fn ordering_labels(&self, row: usize) -> Vec<&str> {
        self.orderings[row].iter().map(|&i| self.labels[i].as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.orderings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orderings.is_empty()
    }
}

fn label_index(labels: &[String]) -> std::result::Result<HashMap<String, usize>, String> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(l.clone());
        }
    }
    Ok(index)
}

pub fn parse_ordering_set(raw: &[u8]) -> Result<OrderingSet> {
    let text = std::str::from_utf8(raw).map_err(|e| Error::Parse {
        location: Location::Line { line: 1, column: 1 },
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        location: Location::Line { line: 1, column: 1 },
        message: "missing label inventory".into(),
    })?;
    let labels: Vec<&str> = header.split_whitespace().collect();
    if labels.is_empty() {
        return Err(Error::Parse {
            location: Location::Line { line: 1, column: 1 },
            message: "empty label inventory".into(),
        });
    }
    let owned: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    let index = label_index(&owned).map_err(|l| Error::Parse {
        location: Location::Line { line: 1, column: column_of(header, &l) },
        message: format!("label `{l}` listed twice in the inventory"),
    })?;
    let mut set = OrderingSet { labels: owned, index, orderings: Vec::new() };

    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let row = set.orderings.len() + 1;
        let perm = set.permutation(&tokens).map_err(|message| {
            let column = message
                .split('`')
                .nth(1)
                .map_or(1, |label| column_of(line, label));
            Error::Parse {
                location: Location::Line { line: n + 1, column },
                message: format!("row {row}: {message}"),
            }
        })?;
        set.orderings.push(perm);
    }
    if set.orderings.is_empty() {
        return Err(Error::Parse {
            location: Location::Line { line: 2, column: 1 },
            message: "at least one ordering is required".into(),
        });
    }
    Ok(set)
}

/// 1-based column of the last whole-token occurrence of `label`, or 1.
fn column_of(line: &str, label: &str) -> usize {
    let mut col = None;
    let mut offset = 0;
    for tok in line.split(' ') {
        if tok == label {
            col = Some(line[..offset].chars().count() + 1);
        }
        offset += tok.len() + 1;
    }
    col.unwrap_or(1)
}

pub fn serialize_ordering_set(set: &OrderingSet) -> String {
    let mut out = set.labels.join(" ");
    out.push('\n');
    for row in 0..set.len() {
        let _ = writeln!(out, "{}", set.ordering_labels(row).join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
      "documents": [{"id": "d1", "published": "1999-10-05T10:20",
                     "sentences": ["A sentence."], "segments": [0]}],
      "themes": [{"id": "t1", "members": [{"doc": "d1", "pos": 0}]}]
    }"#;

    #[test]
    fn minimal_corpus() {
        let c = parse_corpus(MINIMAL.as_bytes()).unwrap();
        assert_eq!(c.documents.len(), 1);
        assert_eq!(c.themes.len(), 1);
        assert_eq!(c.documents[0].published, PublicationTime::from_ymd_hm(1999, 10, 5, 10, 20).unwrap());
    }

    #[test]
    fn duplicate_theme_id_is_a_validation_error() {
        let raw = MINIMAL.replace(
            r#""themes": [{"id": "t1", "members": [{"doc": "d1", "pos": 0}]}]"#,
            r#""themes": [{"id": "t1", "members": [{"doc": "d1", "pos": 0}]},
                          {"id": "t1", "members": [{"doc": "d1", "pos": 0}]}]"#,
        );
        let err = parse_corpus(raw.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("t1"), "{err}");
    }

    #[test]
    fn syntax_error_has_line() {
        let err = parse_corpus(b"{\n  \"documents\": [\n  oops").unwrap_err();
        match err {
            Error::Parse { location: Location::Line { line, .. }, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn bad_timestamp_names_field() {
        let raw = MINIMAL.replace("1999-10-05T10:20", "Oct 5, 11:35am");
        match parse_corpus(raw.as_bytes()).unwrap_err() {
            Error::Parse { location: Location::Field(f), .. } => {
                assert_eq!(f, "documents[0].published")
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn seconds_are_truncated_with_warning() {
        let raw = MINIMAL.replace("1999-10-05T10:20", "1999-10-05T10:20:59");
        let (c, w) = parse_corpus_with_warnings(raw.as_bytes()).unwrap();
        assert_eq!(c.documents[0].published.to_string(), "1999-10-05T10:20");
        assert_eq!(w.len(), 1);
        assert!(parse_time("1999-10-05T10:20:59.5").unwrap().1);
        assert!(!parse_time("1999-10-05T10:20").unwrap().1);
    }

    #[test]
    fn single_row_set() {
        let s = parse_ordering_set(b"A B\nA B\n").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.ordering_labels(0), vec!["A", "B"]);
    }

    #[test]
    fn duplicate_label_in_row() {
        let err = parse_ordering_set(b"A B\nA A B\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1") && msg.contains("duplicate label `A`"), "{msg}");
        match err {
            Error::Parse { location: Location::Line { line, column }, .. } => {
                assert_eq!((line, column), (2, 3))
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn missing_and_unknown_labels() {
        let msg = parse_ordering_set(b"A B C\nA B\n").unwrap_err().to_string();
        assert!(msg.contains("missing label `C`"), "{msg}");
        let msg = parse_ordering_set(b"A B\n\nB A\nA Z\n").unwrap_err().to_string();
        assert!(msg.contains("row 2") && msg.contains("unknown label `Z`"), "{msg}");
        assert!(parse_ordering_set(b"A B\n").is_err());
        assert!(parse_ordering_set(b"").is_err());
        assert!(parse_ordering_set(b"A A\nA A\n").is_err());
    }

    #[test]
    fn constructor_matches_parser() {
        let a = OrderingSet::new(["A", "B", "C"], [["C", "A", "B"], ["A", "B", "C"]]).unwrap();
        let b = parse_ordering_set(b"A B C\nC A B\nA B C\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(serialize_ordering_set(&a), "A B C\nC A B\nA B C\n");
        assert!(OrderingSet::new(["A"], Vec::<Vec<&str>>::new()).is_err());
    }
}
