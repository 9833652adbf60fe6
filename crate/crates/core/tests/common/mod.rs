//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use themeorder::io::OrderingSet;
use themeorder::{Corpus, Document, PrecedenceGraph, PublicationTime, SentenceRef, Theme};

pub const MULTIPLE_ORDERINGS: &str = include_str!("../../fixtures/multiple_orderings.txt");
pub const MISSILE_THEME: &str = include_str!("../../fixtures/missile_theme.json");
pub const RELATED_TOPICS: &str = include_str!("../../fixtures/related_topics.json");

const WORDS: &[&str] = &[
    "embassy", "missile", "trial", "court", "mourning", "ceremony", "officials", "crash",
    "exercise", "verdict", "witness", "prosecutor",
];

fn segments<R: Rng>(rng: &mut R, n: usize) -> Vec<u32> {
    let mut seg = 0;
    (0..n)
        .map(|i| {
            if i > 0 && rng.random_bool(0.3) {
                seg += 1;
            }
            seg
        })
        .collect()
}

/// A valid corpus: unique publication times, contiguous segments, themes with
/// one or more distinct members. Themes may share sentences and may hold
/// several sentences of one document.
pub fn random_corpus<R: Rng>(rng: &mut R) -> Corpus {
    let n_docs = rng.random_range(1..=6);
    let mut minutes: Vec<u32> = (0..48 * 60).step_by(7).collect();
    minutes.shuffle(rng);
    let documents: Vec<Document> = (0..n_docs)
        .map(|d| {
            let n = rng.random_range(1..=8);
            let m = minutes[d];
            Document {
                id: format!("doc{d}"),
                published: PublicationTime::from_ymd_hm(1999, 10, 5 + m / 1440, (m / 60) % 24, m % 60)
                    .unwrap(),
                sentences: (0..n)
                    .map(|_| {
                        (0..4).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
                    })
                    .collect(),
                segments: segments(rng, n),
            }
        })
        .collect();

    let n_themes = rng.random_range(1..=8);
    let themes = (0..n_themes)
        .map(|t| {
            let want = rng.random_range(1..=4);
            let mut members: Vec<SentenceRef> = Vec::new();
            for _ in 0..want {
                let doc = documents.choose(rng).unwrap();
                let r = SentenceRef::new(doc.id.clone(), rng.random_range(0..doc.sentences.len()));
                if !members.contains(&r) {
                    members.push(r);
                }
            }
            Theme { id: format!("t{t:02}"), members }
        })
        .collect();
    Corpus { documents, themes }
}

/// A random shared order of `n` themes, and documents each presenting a
/// random subsequence of it (one sentence per theme, single segment).
pub fn agreeing_corpus<R: Rng>(rng: &mut R, n: usize, docs: usize, full: bool) -> (Corpus, Vec<String>) {
    let mut order: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    order.shuffle(rng);
    let mut corpus = Corpus::default();
    let mut themes: Vec<Theme> = order.iter().map(|id| Theme { id: id.clone(), members: vec![] }).collect();
    for d in 0..docs {
        let present: Vec<usize> = (0..n).filter(|_| full || rng.random_bool(0.6)).collect();
        if present.is_empty() {
            continue;
        }
        let id = format!("doc{d}");
        for (pos, &t) in present.iter().enumerate() {
            themes[t].members.push(SentenceRef::new(id.clone(), pos));
        }
        corpus.documents.push(Document {
            id,
            published: PublicationTime::from_ymd_hm(2000, 1, 1, d as u32, 0).unwrap(),
            sentences: present.iter().map(|&t| format!("sentence about {}", order[t])).collect(),
            segments: vec![0; present.len()],
        });
    }
    themes.retain(|t| !t.members.is_empty());
    let kept: Vec<String> = order.into_iter().filter(|id| themes.iter().any(|t| &t.id == id)).collect();
    corpus.themes = themes;
    (corpus, kept)
}

/// Arbitrary non-negative counts on every ordered pair.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> PrecedenceGraph {
    let ids: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut g = PrecedenceGraph::new(ids.clone());
    for a in &ids {
        for b in &ids {
            if a != b && rng.random_bool(0.7) {
                g.set_count(a, b, rng.random_range(0..6)).unwrap();
            }
        }
    }
    g
}

pub fn random_ordering_set<R: Rng>(rng: &mut R) -> OrderingSet {
    let n = rng.random_range(1..=10);
    let labels: Vec<String> = (0..n).map(|i| format!("L{i}")).collect();
    let rows: Vec<Vec<String>> = (0..rng.random_range(1..=8))
        .map(|_| {
            let mut r = labels.clone();
            r.shuffle(rng);
            r
        })
        .collect();
    OrderingSet::new(labels, rows).unwrap()
}

/// Gaps per ordering between two labels, from the raw rows.
pub fn gaps(set: &OrderingSet, a: &str, b: &str) -> Vec<usize> {
    (0..set.len())
        .map(|r| {
            let row = set.ordering_labels(r);
            let pa = row.iter().position(|x| *x == a).unwrap();
            let pb = row.iter().position(|x| *x == b).unwrap();
            pa.abs_diff(pb)
        })
        .collect()
}
