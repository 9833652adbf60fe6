//! Chronological Ordering.
//!
//! A theme is dated by the earliest publication time among the documents that
//! report it. Publication times are unique per document, so two themes with the
//! same date were first reported in the same article and keep that article's
//! order.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{
    Corpus, CorpusIndex, Diagnostics, OrderingResult, PublicationTime, SentenceRef, Strategy,
    Theme, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThemeTimeStamp {
    pub theme_id: String,
    pub time: PublicationTime,
    /// The member sentence that first reported the theme.
    pub stamp: SentenceRef,
}

impl ThemeTimeStamp {
    /// `theme_id ISO-time doc_id position`
    pub fn dump_line(&self) -> String {
        format!("{} {} {} {}", self.theme_id, self.time, self.stamp.doc, self.stamp.pos)
    }

    /// Sort key realizing the chronological order.
    fn key(&self) -> (PublicationTime, usize, &str) {
        (self.time, self.stamp.pos, &self.theme_id)
    }
}

/// Time stamp of a single theme: the earliest member document's time, witnessed
/// by the earliest member sentence in that document.
pub fn theme_timestamp(theme: &Theme, corpus: &Corpus) -> Result<ThemeTimeStamp> {
    let times: HashMap<&str, PublicationTime> = corpus
        .documents
        .iter()
        .map(|d| (d.id.as_str(), d.published))
        .collect();
    let mut best: Option<(PublicationTime, &SentenceRef)> = None;
    for m in &theme.members {
        let t = *times.get(m.doc.as_str()).ok_or_else(|| {
            Error::Validation(vec![Violation::UnknownDocument {
                theme: theme.id.clone(),
                doc: m.doc.clone(),
            }])
        })?;
        if best.is_none_or(|(bt, br)| (t, m.pos) < (bt, br.pos)) {
            best = Some((t, m));
        }
    }
    let (time, stamp) = best.ok_or_else(|| {
        Error::Validation(vec![Violation::EmptyTheme { theme: theme.id.clone() }])
    })?;
    Ok(ThemeTimeStamp { theme_id: theme.id.clone(), time, stamp: stamp.clone() })
}

pub(crate) fn stamps(index: &CorpusIndex<'_>) -> Vec<ThemeTimeStamp> {
    index
        .members
        .iter()
        .zip(&index.corpus.themes)
        .map(|(members, theme)| {
            let &(d, pos) = members
                .iter()
                .min_by_key(|&&(d, pos)| (index.doc(d).published, pos))
                .expect("validated themes are non-empty");
            let doc = index.doc(d);
            ThemeTimeStamp {
                theme_id: theme.id.clone(),
                time: doc.published,
                stamp: SentenceRef::new(doc.id.clone(), pos),
            }
        })
        .collect()
}

/// Theme indices in chronological order.
pub(crate) fn order_indices(stamps: &[ThemeTimeStamp]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..stamps.len()).collect();
    order.sort_by(|&a, &b| stamps[a].key().cmp(&stamps[b].key()));
    order
}

/// Sorts themes by time stamp, breaking same-article ties by presentation
/// order in that article.
///
/// A sentence shared by two themes gives both the same stamp; such themes
/// fall back to id order.
pub fn chronological_order(corpus: &Corpus) -> Result<OrderingResult> {
    let index = CorpusIndex::new(corpus)?;
    let stamps = stamps(&index);
    let order = order_indices(&stamps);
    let stamps: Vec<ThemeTimeStamp> = order.iter().map(|&i| stamps[i].clone()).collect();
    Ok(OrderingResult {
        strategy: Strategy::Chronological,
        sequence: stamps.iter().map(|s| s.theme_id.clone()).collect(),
        diagnostics: Diagnostics::Chronological { stamps },
    })
}
