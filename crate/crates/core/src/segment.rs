//! Fallback topical segmenter for documents that arrive without segment ids.
//!
//! For every gap between adjacent sentences the content words of up to
//! `window` sentences on each side are compared by cosine similarity. A gap is
//! a boundary when its similarity is a local minimum and lies strictly below
//! `mean - stddev` of all gap similarities in the document.
//!
//! This is a word-overlap heuristic only. It is never applied implicitly.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Corpus, Document};

const STOPWORDS: &[&str] = &[
    "a", "about", "after", "all", "also", "an", "and", "any", "are", "as", "at", "be", "been",
    "but", "by", "can", "could", "did", "do", "for", "from", "had", "has", "have", "he", "her",
    "his", "i", "if", "in", "into", "is", "it", "its", "more", "no", "not", "of", "on", "one",
    "or", "other", "our", "out", "said", "she", "so", "than", "that", "the", "their", "them",
    "then", "there", "these", "they", "this", "to", "up", "was", "we", "were", "what", "when",
    "which", "who", "will", "with", "would", "you",
];

fn content_words(sentence: &str) -> impl Iterator<Item = String> + '_ {
    sentence
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .filter(|w| STOPWORDS.binary_search(&w.as_str()).is_err())
}

fn cosine(a: &HashMap<String, u32>, b: &HashMap<String, u32>) -> f64 {
    let dot: f64 = a
        .iter()
        .filter_map(|(w, &x)| b.get(w).map(|&y| f64::from(x) * f64::from(y)))
        .sum();
    if dot == 0.0 {
        return 0.0;
    }
    let norm = |m: &HashMap<String, u32>| m.values().map(|&x| f64::from(x).powi(2)).sum::<f64>().sqrt();
    dot / (norm(a) * norm(b))
}

fn bag(bags: &[HashMap<String, u32>]) -> HashMap<String, u32> {
    let mut out = HashMap::new();
    for b in bags {
        for (w, &c) in b {
            *out.entry(w.clone()).or_insert(0) += c;
        }
    }
    out
}

/// Similarity across each of the `n - 1` sentence gaps.
pub fn gap_similarities(sentences: &[String], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::InvalidWindow);
    }
    let bags: Vec<HashMap<String, u32>> = sentences
        .iter()
        .map(|s| {
            let mut m = HashMap::new();
            for w in content_words(s) {
                *m.entry(w).or_insert(0) += 1;
            }
            m
        })
        .collect();
    let n = bags.len();
    Ok((0..n.saturating_sub(1))
        .map(|g| {
            let left = bag(&bags[(g + 1).saturating_sub(window)..=g]);
            let right = bag(&bags[g + 1..(g + 1 + window).min(n)]);
            cosine(&left, &right)
        })
        .collect())
}

/// Segment ids for a document's sentences: non-decreasing, starting at 0.
pub fn naive_segment(document: &Document, window: usize) -> Result<Vec<u32>> {
    let sims = gap_similarities(&document.sentences, window)?;
    let mut segments = Vec::with_capacity(document.sentences.len());
    if document.sentences.is_empty() {
        return Ok(segments);
    }
    let n = sims.len() as f64;
    let (mean, sd) = if sims.is_empty() {
        (0.0, 0.0)
    } else {
        let mean = sims.iter().sum::<f64>() / n;
        let var = sims.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let cutoff = mean - sd;

    let mut current = 0u32;
    segments.push(0);
    for (g, &s) in sims.iter().enumerate() {
        let left_ok = g == 0 || s <= sims[g - 1];
        let right_ok = g + 1 == sims.len() || s <= sims[g + 1];
        if left_ok && right_ok && s < cutoff {
            current += 1;
        }
        segments.push(current);
    }
    Ok(segments)
}

/// Replaces every document's segment ids with [`naive_segment`] output.
pub fn segment_corpus(corpus: &mut Corpus, window: usize) -> Result<()> {
    for doc in &mut corpus.documents {
        doc.segments = naive_segment(doc, window)?;
    }
    Ok(())
}
