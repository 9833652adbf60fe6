//! Majority Ordering.
//!
//! Each input document votes on the relative order of every pair of themes it
//! contains. The votes form a weighted precedence graph; the order maximizing
//! the agreeing vote total is NP-hard to find, so themes are linearized
//! greedily by potential (outgoing minus incoming weight), which guarantees at
//! least half the optimal weight. [`brute_force_optimal`] solves small
//! instances exactly and serves as the reference.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Corpus, CorpusIndex, Diagnostics, OrderingResult, Strategy};

/// Default node limit for [`brute_force_optimal`].
pub const DEFAULT_MAX_NODES: usize = 8;

/// Pairwise precedence counts over a set of themes.
///
/// Node ids are kept sorted so that index order equals id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecedenceGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
}

impl PrecedenceGraph {
    /// A graph with all counts zero. Duplicate ids are merged.
    pub fn new<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        ids.sort();
        ids.dedup();
        let index = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let n = ids.len();
        Self { ids, index, counts: vec![0; n * n] }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node ids in ascending order.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// `C[from][to]`; `None` for unknown ids or `from == to`.
    pub fn count(&self, from: &str, to: &str) -> Option<u64> {
        let (i, j) = (self.index_of(from)?, self.index_of(to)?);
        (i != j).then(|| self.at(i, j))
    }

    pub fn set_count(&mut self, from: &str, to: &str, value: u64) -> Result<()> {
        let i = self.index_of(from).ok_or_else(|| Error::UnknownLabel(from.into()))?;
        let j = self.index_of(to).ok_or_else(|| Error::UnknownLabel(to.into()))?;
        if i == j {
            return Err(Error::UnknownLabel(format!("{from} -> {to} (self loop)")));
        }
        let n = self.len();
        self.counts[i * n + j] = value;
        Ok(())
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.ids.len() + j]
    }

    #[inline]
    fn bump(&mut self, i: usize, j: usize) {
        let n = self.ids.len();
        self.counts[i * n + j] += 1;
    }

    /// Edges with a positive count as `(from, to, count)`, sorted by
    /// `(from, to)`.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        let n = self.len();
        (0..n)
            .cartesian_product(0..n)
            .filter(move |&(i, j)| i != j && self.at(i, j) > 0)
            .map(move |(i, j)| (self.ids[i].as_str(), self.ids[j].as_str(), self.at(i, j)))
    }

    /// Sum of every count; the weight of any order plus that of its reverse.
    pub fn total_weight(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Edge list dump: one `from to count` line per positive edge.
    pub fn dump(&self) -> String {
        self.edges().map(|(i, j, c)| format!("{i} {j} {c}\n")).collect()
    }
}

impl fmt::Display for PrecedenceGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// How to choose among nodes of equal maximal potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Smallest theme id wins.
    #[default]
    ById,
    /// Uniform choice from a ChaCha8 stream seeded with the given value.
    Seeded(u64),
}

/// Counts, for every ordered theme pair, the documents in which the first
/// theme is presented before the second.
///
/// A theme's position in a document is the smallest position among its
/// members there. Two themes sharing that exact sentence cast no vote.
pub fn build_precedence_counts(corpus: &Corpus) -> Result<PrecedenceGraph> {
    let index = CorpusIndex::new(corpus)?;
    let mut graph = PrecedenceGraph::new(corpus.themes.iter().map(|t| t.id.clone()));
    let node: Vec<usize> = corpus
        .themes
        .iter()
        .map(|t| graph.index_of(&t.id).expect("theme id present"))
        .collect();

    // per document: (first position, graph node) of each theme present
    let mut per_doc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); corpus.documents.len()];
    for (t, members) in index.members.iter().enumerate() {
        // members are sorted, so the first hit per document is the minimum
        let mut last_doc = None;
        for &(d, pos) in members {
            if last_doc != Some(d) {
                per_doc[d].push((pos, node[t]));
                last_doc = Some(d);
            }
        }
    }

    for mut present in per_doc {
        present.sort_unstable();
        for (a, b) in present.iter().tuple_combinations() {
            if a.0 < b.0 {
                graph.bump(a.1, b.1);
            }
        }
    }
    Ok(graph)
}

fn positions_of<S: AsRef<str>>(sequence: &[S], graph: &PrecedenceGraph) -> Result<Vec<usize>> {
    if sequence.len() != graph.len() {
        return Err(Error::NotAPermutation(format!(
            "sequence has {} items, graph has {} nodes",
            sequence.len(),
            graph.len()
        )));
    }
    let mut seen = vec![false; graph.len()];
    let mut idx = Vec::with_capacity(sequence.len());
    for s in sequence {
        let s = s.as_ref();
        let i = graph
            .index_of(s)
            .ok_or_else(|| Error::NotAPermutation(format!("unknown theme `{s}`")))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::NotAPermutation(format!("theme `{s}` repeated")));
        }
        idx.push(i);
    }
    Ok(idx)
}

pub(crate) fn weight_of(order: &[usize], graph: &PrecedenceGraph) -> u64 {
    let mut w = 0;
    for (k, &a) in order.iter().enumerate() {
        for &b in &order[k + 1..] {
            w += graph.at(a, b);
        }
    }
    w
}

/// Sum of `C[a][b]` over every pair with `a` placed before `b`.
pub fn order_weight<S: AsRef<str>>(sequence: &[S], graph: &PrecedenceGraph) -> Result<u64> {
    Ok(weight_of(&positions_of(sequence, graph)?, graph))
}

pub(crate) fn greedy_indices(graph: &PrecedenceGraph, tie_break: TieBreak) -> Vec<usize> {
    let n = graph.len();
    let mut potential: Vec<i64> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| u != v)
                .map(|u| graph.at(v, u) as i64 - graph.at(u, v) as i64)
                .sum()
        })
        .collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rng = match tie_break {
        TieBreak::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TieBreak::ById => None,
    };
    let mut out = Vec::with_capacity(n);
    let mut best = Vec::new();

    while !remaining.is_empty() {
        let max = remaining.iter().map(|&v| potential[v]).max().expect("non-empty");
        best.clear();
        // `remaining` stays in ascending index order, i.e. ascending id order
        best.extend(remaining.iter().copied().filter(|&v| potential[v] == max));
        let pick = match rng.as_mut() {
            Some(rng) if best.len() > 1 => best[rng.random_range(0..best.len())],
            _ => best[0],
        };
        remaining.retain(|&v| v != pick);
        for &v in &remaining {
            potential[v] -= graph.at(v, pick) as i64;
            potential[v] += graph.at(pick, v) as i64;
        }
        out.push(pick);
    }
    out
}

/// Greedy linearization: repeatedly emit a node of maximal potential and
/// delete it along with all its edges.
pub fn greedy_linearize(graph: &PrecedenceGraph, tie_break: TieBreak) -> Vec<String> {
    greedy_indices(graph, tie_break)
        .into_iter()
        .map(|i| graph.ids[i].clone())
        .collect()
}

/// Exhaustive search for a maximum-weight order. Among optimal orders the
/// lexicographically smallest by id sequence is returned.
pub fn brute_force_optimal(graph: &PrecedenceGraph, max_n: usize) -> Result<(Vec<String>, u64)> {
    if graph.len() > max_n {
        return Err(Error::SizeLimit { nodes: graph.len(), max: max_n });
    }
    let n = graph.len();
    let mut best: Option<(Vec<usize>, u64)> = None;
    // permutations of an ascending range come out in lexicographic order
    for perm in (0..n).permutations(n) {
        let w = weight_of(&perm, graph);
        if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
            best = Some((perm, w));
        }
    }
    let (order, w) = best.unwrap_or_default();
    Ok((order.into_iter().map(|i| graph.ids[i].clone()).collect(), w))
}

/// Builds the precedence graph of a corpus and linearizes it greedily.
pub fn majority_order(corpus: &Corpus, tie_break: TieBreak) -> Result<OrderingResult> {
    let graph = build_precedence_counts(corpus)?;
    let order = greedy_indices(&graph, tie_break);
    let weight = weight_of(&order, &graph);
    Ok(OrderingResult {
        strategy: Strategy::Majority,
        sequence: order.into_iter().map(|i| graph.ids[i].clone()).collect(),
        diagnostics: Diagnostics::Majority { graph, weight },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Document, PublicationTime, SentenceRef, Theme};

    fn graph(ids: &[&str], edges: &[(&str, &str, u64)]) -> PrecedenceGraph {
        let mut g = PrecedenceGraph::new(ids.iter().copied());
        for &(a, b, c) in edges {
            g.set_count(a, b, c).unwrap();
        }
        g
    }

    /// Documents given as theme-id sequences, one sentence per theme.
    fn corpus(docs: &[&[&str]]) -> Corpus {
        let mut c = Corpus::default();
        let mut themes: Vec<Theme> = Vec::new();
        for (d, seq) in docs.iter().enumerate() {
            let id = format!("doc{d}");
            c.documents.push(Document {
                id: id.clone(),
                published: PublicationTime::from_ymd_hm(2001, 1, 1 + d as u32, 9, 0).unwrap(),
                sentences: seq.iter().map(|s| format!("about {s}")).collect(),
                segments: vec![0; seq.len()],
            });
            for (pos, t) in seq.iter().enumerate() {
                let r = SentenceRef::new(id.clone(), pos);
                match themes.iter_mut().find(|x| x.id == *t) {
                    Some(th) => th.members.push(r),
                    None => themes.push(Theme { id: t.to_string(), members: vec![r] }),
                }
            }
        }
        c.themes = themes;
        c
    }

    #[test]
    fn single_observation() {
        let mut c = corpus(&[&["Th1", "x", "y", "Th2"]]);
        c.themes.retain(|t| t.id.starts_with("Th"));
        let g = build_precedence_counts(&c).unwrap();
        assert_eq!(g.count("Th1", "Th2"), Some(1));
        assert_eq!(g.count("Th2", "Th1"), Some(0));
    }

    #[test]
    fn no_cooccurrence_no_votes() {
        let c = corpus(&[&["Th1"], &["Th2"]]);
        let g = build_precedence_counts(&c).unwrap();
        assert_eq!(g.count("Th1", "Th2"), Some(0));
        assert_eq!(g.count("Th2", "Th1"), Some(0));
    }

    #[test]
    fn three_documents_two_to_one() {
        let c = corpus(&[&["Th1", "Th2"], &["Th2", "Th1"], &["Th1", "Th2"]]);
        let g = build_precedence_counts(&c).unwrap();
        assert_eq!(g.count("Th1", "Th2"), Some(2));
        assert_eq!(g.count("Th2", "Th1"), Some(1));
        assert_eq!(order_weight(&["Th1", "Th2"], &g).unwrap(), 2);
        assert_eq!(order_weight(&["Th2", "Th1"], &g).unwrap(), 1);
        assert_eq!(greedy_linearize(&g, TieBreak::ById), vec!["Th1", "Th2"]);
    }

    #[test]
    fn multi_member_theme_uses_first_position() {
        let mut c = corpus(&[&["a", "b", "a"]]);
        c.themes[0].members = vec![SentenceRef::new("doc0", 2), SentenceRef::new("doc0", 0)];
        let g = build_precedence_counts(&c).unwrap();
        assert_eq!(g.count("a", "b"), Some(1));
        assert_eq!(g.count("b", "a"), Some(0));
    }

    #[test]
    fn shared_sentence_casts_no_vote() {
        let mut c = corpus(&[&["a", "b"]]);
        c.themes[1].members = vec![SentenceRef::new("doc0", 0)];
        let g = build_precedence_counts(&c).unwrap();
        assert_eq!(g.total_weight(), 0);
    }

    #[test]
    fn weight_rejects_non_permutations() {
        let g = graph(&["a", "b"], &[]);
        assert!(matches!(order_weight(&["a"], &g), Err(Error::NotAPermutation(_))));
        assert!(matches!(order_weight(&["a", "a"], &g), Err(Error::NotAPermutation(_))));
        assert!(matches!(order_weight(&["a", "z"], &g), Err(Error::NotAPermutation(_))));
        assert_eq!(order_weight(&["a"], &graph(&["a"], &[])).unwrap(), 0);
    }

    #[test]
    fn empty_graph() {
        let g = PrecedenceGraph::new(Vec::<String>::new());
        assert!(greedy_linearize(&g, TieBreak::ById).is_empty());
        assert_eq!(brute_force_optimal(&g, 8).unwrap(), (vec![], 0));
    }

    #[test]
    fn three_cycle() {
        let g = graph(
            &["Th1", "Th2", "Th3"],
            &[("Th1", "Th2", 1), ("Th2", "Th3", 1), ("Th3", "Th1", 1)],
        );
        let greedy = greedy_linearize(&g, TieBreak::ById);
        assert_eq!(greedy, vec!["Th1", "Th2", "Th3"]);
        assert_eq!(order_weight(&greedy, &g).unwrap(), 2);
        let (best, w) = brute_force_optimal(&g, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(w, 2);
        assert_eq!(best, vec!["Th1", "Th2", "Th3"]);
    }

    #[test]
    fn brute_force_single_and_limit() {
        let g = graph(&["only"], &[]);
        assert_eq!(brute_force_optimal(&g, 8).unwrap(), (vec!["only".to_string()], 0));
        let big = PrecedenceGraph::new((0..9).map(|i| i.to_string()));
        assert!(matches!(
            brute_force_optimal(&big, DEFAULT_MAX_NODES),
            Err(Error::SizeLimit { nodes: 9, max: 8 })
        ));
    }

    #[test]
    fn seeded_tie_break_is_reproducible() {
        let g = PrecedenceGraph::new((0..7).map(|i| format!("t{i}")));
        let a = greedy_linearize(&g, TieBreak::Seeded(42));
        assert_eq!(a, greedy_linearize(&g, TieBreak::Seeded(42)));
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, g.ids());
        // with no edges every node ties, so some seed must leave id order
        assert!((0..20).any(|s| greedy_linearize(&g, TieBreak::Seeded(s)) != g.ids()));
    }

    #[test]
    fn majority_on_single_document_follows_it() {
        let c = corpus(&[&["c", "a", "d", "b"]]);
        let r = majority_order(&c, TieBreak::ById).unwrap();
        assert_eq!(r.sequence, vec!["c", "a", "d", "b"]);
        match r.diagnostics {
            Diagnostics::Majority { weight, .. } => assert_eq!(weight, 6),
            _ => panic!("wrong diagnostics"),
        }
    }

    #[test]
    fn majority_on_cyclic_corpus_is_deterministic() {
        let c = corpus(&[&["Th1", "Th2"], &["Th2", "Th3"], &["Th3", "Th1"]]);
        let r = majority_order(&c, TieBreak::ById).unwrap();
        assert_eq!(r.sequence, vec!["Th1", "Th2", "Th3"]);
    }

    #[test]
    fn dump_lists_positive_edges_sorted() {
        let g = graph(&["b", "a", "c"], &[("c", "a", 2), ("a", "b", 1), ("b", "a", 3)]);
        assert_eq!(g.dump(), "a b 1\nb a 3\nc a 2\n");
    }
}
