//! Domain types shared by every ordering strategy.
//!
//! All types here are plain data. Well-formedness is checked by
//! [`validate_corpus`], which reports every violated rule instead of stopping at
//! the first one.

use std::collections::{HashMap, HashSet};
use std::fmt;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime, Timelike};

use crate::augmented::BlockPartition;
use crate::chronological::ThemeTimeStamp;
use crate::error::{Error, Result};
use crate::majority::PrecedenceGraph;

/// Publication time of an article, at minute granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PublicationTime(NaiveDateTime);

impl PublicationTime {
    pub fn new(date: NaiveDate, hour: u32, minute: u32) -> Option<Self> {
        NaiveTime::from_hms_opt(hour, minute, 0).map(|t| Self(date.and_time(t)))
    }

    pub fn from_ymd_hm(year: i32, month: u32, day: u32, hour: u32, minute: u32) -> Option<Self> {
        Self::new(NaiveDate::from_ymd_opt(year, month, day)?, hour, minute)
    }

    /// Drops seconds and sub-second precision. Returns the truncated time and
    /// whether anything was lost.
    pub fn truncating(dt: NaiveDateTime) -> (Self, bool) {
        let lost = dt.second() != 0 || dt.nanosecond() != 0;
        let t = NaiveTime::from_hms_opt(dt.hour(), dt.minute(), 0).expect("valid hour/minute");
        (Self(dt.date().and_time(t)), lost)
    }

    pub fn date(&self) -> NaiveDate {
        self.0.date()
    }

    pub fn hour(&self) -> u32 {
        self.0.hour()
    }

    pub fn minute(&self) -> u32 {
        self.0.minute()
    }
}

impl fmt::Display for PublicationTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub published: PublicationTime,
    pub sentences: Vec<String>,
    /// One segment id per sentence; contiguous spans numbered from 0.
    pub segments: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SentenceRef {
    pub doc: String,
    pub pos: usize,
}

impl SentenceRef {
    pub fn new(doc: impl Into<String>, pos: usize) -> Self {
        Self { doc: doc.into(), pos }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theme {
    pub id: String,
    pub members: Vec<SentenceRef>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub themes: Vec<Theme>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Majority,
    Chronological,
    Augmented,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Majority => "majority",
            Strategy::Chronological => "chronological",
            Strategy::Augmented => "augmented",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostics {
    Majority {
        graph: PrecedenceGraph,
        weight: u64,
    },
    Chronological {
        /// In output order.
        stamps: Vec<ThemeTimeStamp>,
    },
    Augmented {
        /// Blocks in output order.
        partition: BlockPartition,
        /// Per-theme stamps in output order.
        stamps: Vec<ThemeTimeStamp>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingResult {
    pub strategy: Strategy,
    pub sequence: Vec<String>,
    pub diagnostics: Diagnostics,
}

/// A broken corpus rule, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyDocument { doc: String },
    SegmentCount { doc: String, sentences: usize, segments: usize },
    SegmentsNotContiguous { doc: String, pos: usize },
    DuplicateDocId { doc: String },
    DuplicatePublicationTime { first: String, second: String, time: PublicationTime },
    DuplicateThemeId { theme: String },
    EmptyTheme { theme: String },
    UnknownDocument { theme: String, doc: String },
    PositionOutOfRange { theme: String, doc: String, pos: usize, len: usize },
    DuplicateMember { theme: String, doc: String, pos: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyDocument { doc } => write!(f, "document `{doc}` has no sentences"),
            SegmentCount { doc, sentences, segments } => write!(
                f,
                "document `{doc}` has {sentences} sentences but {segments} segment ids"
            ),
            SegmentsNotContiguous { doc, pos } => write!(
                f,
                "document `{doc}`: segment ids must start at 0 and increase by at most 1 (position {pos})"
            ),
            DuplicateDocId { doc } => write!(f, "duplicate document id `{doc}`"),
            DuplicatePublicationTime { first, second, time } => write!(
                f,
                "documents `{first}` and `{second}` share publication time {time}"
            ),
            DuplicateThemeId { theme } => write!(f, "duplicate theme id `{theme}`"),
            EmptyTheme { theme } => write!(f, "theme `{theme}` has no members"),
            UnknownDocument { theme, doc } => {
                write!(f, "theme `{theme}` references unknown document `{doc}`")
            }
            PositionOutOfRange { theme, doc, pos, len } => write!(
                f,
                "theme `{theme}` references position {pos} of document `{doc}` which has {len} sentences"
            ),
            DuplicateMember { theme, doc, pos } => {
                write!(f, "theme `{theme}` lists sentence ({doc}, {pos}) more than once")
            }
        }
    }
}

/// Checks every corpus invariant; an empty result means the corpus is
/// well-formed.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut doc_len: HashMap<&str, usize> = HashMap::new();
    let mut times: HashMap<PublicationTime, &str> = HashMap::new();

    for doc in &corpus.documents {
        if doc_len.insert(&doc.id, doc.sentences.len()).is_some() {
            out.push(Violation::DuplicateDocId { doc: doc.id.clone() });
        }
        if let Some(first) = times.get(&doc.published) {
            out.push(Violation::DuplicatePublicationTime {
                first: first.to_string(),
                second: doc.id.clone(),
                time: doc.published,
            });
        } else {
            times.insert(doc.published, &doc.id);
        }
        if doc.sentences.is_empty() {
            out.push(Violation::EmptyDocument { doc: doc.id.clone() });
        }
        if doc.segments.len() != doc.sentences.len() {
            out.push(Violation::SegmentCount {
                doc: doc.id.clone(),
                sentences: doc.sentences.len(),
                segments: doc.segments.len(),
            });
        }
        if let Some(pos) = first_segment_gap(&doc.segments) {
            out.push(Violation::SegmentsNotContiguous { doc: doc.id.clone(), pos });
        }
    }

    let mut theme_ids = HashSet::new();
    for theme in &corpus.themes {
        if !theme_ids.insert(theme.id.as_str()) {
            out.push(Violation::DuplicateThemeId { theme: theme.id.clone() });
        }
        if theme.members.is_empty() {
            out.push(Violation::EmptyTheme { theme: theme.id.clone() });
        }
        let mut seen = HashSet::new();
        for m in &theme.members {
            match doc_len.get(m.doc.as_str()) {
                None => out.push(Violation::UnknownDocument {
                    theme: theme.id.clone(),
                    doc: m.doc.clone(),
                }),
                Some(&len) if m.pos >= len => out.push(Violation::PositionOutOfRange {
                    theme: theme.id.clone(),
                    doc: m.doc.clone(),
                    pos: m.pos,
                    len,
                }),
                Some(_) => {}
            }
            if !seen.insert(m) {
                out.push(Violation::DuplicateMember {
                    theme: theme.id.clone(),
                    doc: m.doc.clone(),
                    pos: m.pos,
                });
            }
        }
    }
    out
}

fn first_segment_gap(segments: &[u32]) -> Option<usize> {
    let mut prev: Option<u32> = None;
    for (i, &s) in segments.iter().enumerate() {
        let ok = match prev {
            None => s == 0,
            Some(p) => s == p || s == p + 1,
        };
        if !ok {
            return Some(i);
        }
        prev = Some(s);
    }
    None
}

/// Lookup tables over a corpus whose references all resolve.
///
/// `members[t]` lists theme `t`'s sentences as `(document index, position)`,
/// sorted.
#[derive(Debug)]
pub(crate) struct CorpusIndex<'a> {
    pub corpus: &'a Corpus,
    pub members: Vec<Vec<(usize, usize)>>,
}

impl<'a> CorpusIndex<'a> {
    /// Fails with the full violation list when the corpus is not well-formed.
    pub fn new(corpus: &'a Corpus) -> Result<Self> {
        let violations = validate_corpus(corpus);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let by_id: HashMap<&str, usize> = corpus
            .documents
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id.as_str(), i))
            .collect();
        let members = corpus
            .themes
            .iter()
            .map(|t| {
                let mut v: Vec<_> = t.members.iter().map(|m| (by_id[m.doc.as_str()], m.pos)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        Ok(Self { corpus, members })
    }

    pub fn doc(&self, i: usize) -> &'a Document {
        &self.corpus.documents[i]
    }

    pub fn theme_count(&self) -> usize {
        self.corpus.themes.len()
    }
}
