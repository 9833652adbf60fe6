//! The cohesion-augmented ordering.
//!
//! Two themes are related when most of their sentence pairs that share a
//! document also share a segment of it. Related themes are closed
//! transitively into blocks; blocks are ordered chronologically as units and
//! themes are ordered chronologically inside each block, so topically related
//! themes always end up next to each other.

use std::fmt;

use num_rational::Ratio;

use crate::chronological::{self, ThemeTimeStamp};
use crate::error::{Error, Result};
use crate::model::{
    Corpus, CorpusIndex, Diagnostics, OrderingResult, PublicationTime, Strategy, Theme,
    Violation,
};
use crate::par::Execution;

/// Relatedness cut-off. The default is a strict `> 3/5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threshold {
    pub value: Ratio<u64>,
    /// Use `>=` instead of `>`.
    pub inclusive: bool,
}

impl Threshold {
    pub fn strict(value: Ratio<u64>) -> Self {
        Self { value, inclusive: false }
    }

    pub fn inclusive(value: Ratio<u64>) -> Self {
        Self { value, inclusive: true }
    }

    pub fn admits(&self, ratio: Ratio<u64>) -> bool {
        if self.inclusive {
            ratio >= self.value
        } else {
            ratio > self.value
        }
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Self::strict(Ratio::new(3, 5))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelatednessScore<'a> {
    /// The pair, smaller id first.
    pub themes: (&'a str, &'a str),
    /// Member pairs sharing a document.
    pub same_text: u64,
    /// Member pairs sharing a segment of a document.
    pub same_segment: u64,
    /// `same_segment / same_text`, or zero when `same_text` is zero.
    pub ratio: Ratio<u64>,
}

impl<'a> RelatednessScore<'a> {
    fn new(a: &'a str, b: &'a str, same_text: u64, same_segment: u64) -> Self {
        let ratio = if same_text == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(same_segment, same_text)
        };
        Self { themes: if a <= b { (a, b) } else { (b, a) }, same_text, same_segment, ratio }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Themes in chronological order.
    pub themes: Vec<String>,
    /// Earliest theme time stamp in the block.
    pub time: PublicationTime,
    /// The theme carrying that time stamp.
    pub stamp_theme: String,
}

/// Related-theme blocks in output order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockPartition {
    pub blocks: Vec<Block>,
}

impl BlockPartition {
    /// One `block_k ISO-time: theme …` line per block, `k` counted from 1.
    pub fn dump(&self) -> String {
        self.blocks
            .iter()
            .enumerate()
            .map(|(k, b)| format!("block_{} {}: {}\n", k + 1, b.time, b.themes.join(" ")))
            .collect()
    }

    /// Index of the block containing a theme.
    pub fn block_of(&self, theme_id: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.themes.iter().any(|t| t == theme_id))
    }
}

impl fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// A theme's sentences as `(document, segment)`, sorted.
type Placement = Vec<(usize, u32)>;

fn placements(index: &CorpusIndex<'_>) -> Vec<Placement> {
    index
        .members
        .iter()
        .map(|ms| {
            let mut v: Placement =
                ms.iter().map(|&(d, pos)| (d, index.doc(d).segments[pos])).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

/// Length of the run of equal keys starting at `i`.
fn run<K: PartialEq, T>(xs: &[T], i: usize, key: impl Fn(&T) -> K) -> usize {
    let k = key(&xs[i]);
    xs[i..].iter().take_while(|x| key(x) == k).count()
}

fn pair_counts(a: &[(usize, u32)], b: &[(usize, u32)]) -> (u64, u64) {
    let (mut i, mut j) = (0, 0);
    let (mut together, mut same) = (0u64, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += run(a, i, |x| x.0),
            std::cmp::Ordering::Greater => j += run(b, j, |x| x.0),
            std::cmp::Ordering::Equal => {
                let la = run(a, i, |x| x.0);
                let lb = run(b, j, |x| x.0);
                together += (la * lb) as u64;
                let (sa, sb) = (&a[i..i + la], &b[j..j + lb]);
                let (mut p, mut q) = (0, 0);
                while p < sa.len() && q < sb.len() {
                    match sa[p].1.cmp(&sb[q].1) {
                        std::cmp::Ordering::Less => p += 1,
                        std::cmp::Ordering::Greater => q += 1,
                        std::cmp::Ordering::Equal => {
                            let ra = run(sa, p, |x| x.1);
                            let rb = run(sb, q, |x| x.1);
                            same += (ra * rb) as u64;
                            p += ra;
                            q += rb;
                        }
                    }
                }
                i += la;
                j += lb;
            }
        }
    }
    (together, same)
}

fn resolve(theme: &Theme, corpus: &Corpus) -> Result<Placement> {
    let mut v = Vec::with_capacity(theme.members.len());
    for m in &theme.members {
        let (d, doc) = corpus
            .documents
            .iter()
            .enumerate()
            .find(|(_, d)| d.id == m.doc)
            .ok_or_else(|| {
                Error::Validation(vec![Violation::UnknownDocument {
                    theme: theme.id.clone(),
                    doc: m.doc.clone(),
                }])
            })?;
        let seg = doc.segments.get(m.pos).ok_or_else(|| {
            Error::Validation(vec![Violation::PositionOutOfRange {
                theme: theme.id.clone(),
                doc: m.doc.clone(),
                pos: m.pos,
                len: doc.segments.len(),
            }])
        })?;
        v.push((d, *seg));
    }
    v.sort_unstable();
    Ok(v)
}

/// `(#pairs in the same document, #pairs in the same segment)` over all
/// member pairs of two themes.
pub fn cooccurrence_counts(a: &Theme, b: &Theme, corpus: &Corpus) -> Result<(u64, u64)> {
    Ok(pair_counts(&resolve(a, corpus)?, &resolve(b, corpus)?))
}

pub fn relatedness<'a>(a: &'a Theme, b: &'a Theme, corpus: &Corpus) -> Result<RelatednessScore<'a>> {
    let (t, s) = cooccurrence_counts(a, b, corpus)?;
    Ok(RelatednessScore::new(&a.id, &b.id, t, s))
}

/// Scores for every unordered pair of themes in the corpus.
pub fn relatedness_table(corpus: &Corpus, exec: Execution) -> Result<Vec<RelatednessScore<'_>>> {
    let index = CorpusIndex::new(corpus)?;
    let places = placements(&index);
    let pairs = all_pairs(places.len());
    Ok(exec
        .map(&pairs, |&(i, j)| {
            let (t, s) = pair_counts(&places[i], &places[j]);
            RelatednessScore::new(&corpus.themes[i].id, &corpus.themes[j].id, t, s)
        }))
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

struct Blocks {
    partition: BlockPartition,
    /// Theme indices per block, in output order.
    members: Vec<Vec<usize>>,
    stamps: Vec<ThemeTimeStamp>,
}

fn blocks(index: &CorpusIndex<'_>, threshold: Threshold, exec: Execution) -> Blocks {
    let n = index.theme_count();
    let places = placements(index);
    let pairs = all_pairs(n);
    let related = exec.map(&pairs, |&(i, j)| {
        let (t, s) = pair_counts(&places[i], &places[j]);
        let ratio = if t == 0 { Ratio::from_integer(0) } else { Ratio::new(s, t) };
        threshold.admits(ratio)
    });
    let mut dsu = DisjointSet::new(n);
    for (&(i, j), linked) in pairs.iter().zip(related) {
        if linked {
            dsu.union(i, j);
        }
    }

    let stamps = chronological::stamps(index);
    let chrono = chronological::order_indices(&stamps);
    // walking themes in chronological order visits each block first at its
    // stamp theme, so blocks come out sorted by (time, stamp position)
    // and their themes in chronological order
    let mut slot = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for &t in &chrono {
        let root = dsu.find(t);
        if slot[root] == usize::MAX {
            slot[root] = members.len();
            members.push(Vec::new());
        }
        members[slot[root]].push(t);
    }
    let themes = &index.corpus.themes;
    let partition = BlockPartition {
        blocks: members
            .iter()
            .map(|ms| Block {
                themes: ms.iter().map(|&t| themes[t].id.clone()).collect(),
                time: stamps[ms[0]].time,
                stamp_theme: themes[ms[0]].id.clone(),
            })
            .collect(),
    };
    Blocks { partition, members, stamps }
}

/// Groups themes into blocks: connected components of the "ratio passes the
/// threshold" relation. Blocks and their themes are in chronological order.
pub fn build_blocks(corpus: &Corpus, threshold: Threshold) -> Result<BlockPartition> {
    build_blocks_with(corpus, threshold, Execution::default())
}

pub fn build_blocks_with(
    corpus: &Corpus,
    threshold: Threshold,
    exec: Execution,
) -> Result<BlockPartition> {
    let index = CorpusIndex::new(corpus)?;
    Ok(blocks(&index, threshold, exec).partition)
}

pub fn augmented_order(corpus: &Corpus, threshold: Threshold) -> Result<OrderingResult> {
    augmented_order_with(corpus, threshold, Execution::default())
}

pub fn augmented_order_with(
    corpus: &Corpus,
    threshold: Threshold,
    exec: Execution,
) -> Result<OrderingResult> {
    let index = CorpusIndex::new(corpus)?;
    let Blocks { partition, members, stamps } = blocks(&index, threshold, exec);
    let order: Vec<usize> = members.into_iter().flatten().collect();
    Ok(OrderingResult {
        strategy: Strategy::Augmented,
        sequence: order.iter().map(|&t| corpus.themes[t].id.clone()).collect(),
        diagnostics: Diagnostics::Augmented {
            partition,
            stamps: order.iter().map(|&t| stamps[t].clone()).collect(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chronological::chronological_order;
    use crate::model::{Document, SentenceRef};

    fn doc(id: &str, hour: u32, segments: &[u32]) -> Document {
        Document {
            id: id.into(),
            published: PublicationTime::from_ymd_hm(1998, 8, 7, hour, 0).unwrap(),
            sentences: segments.iter().map(|s| format!("segment {s}")).collect(),
            segments: segments.to_vec(),
        }
    }

    fn theme(id: &str, members: &[(&str, usize)]) -> Theme {
        Theme {
            id: id.into(),
            members: members.iter().map(|&(d, p)| SentenceRef::new(d, p)).collect(),
        }
    }

    #[test]
    fn same_segment_single_pair() {
        let c = Corpus {
            documents: vec![doc("D", 1, &[0, 0])],
            themes: vec![theme("a", &[("D", 0)]), theme("b", &[("D", 1)])],
        };
        assert_eq!(cooccurrence_counts(&c.themes[0], &c.themes[1], &c).unwrap(), (1, 1));
        let r = relatedness(&c.themes[0], &c.themes[1], &c).unwrap();
        assert_eq!(r.ratio, Ratio::from_integer(1));
    }

    #[test]
    fn disjoint_documents() {
        let c = Corpus {
            documents: vec![doc("D", 1, &[0]), doc("E", 2, &[0])],
            themes: vec![theme("a", &[("D", 0)]), theme("b", &[("E", 0)])],
        };
        assert_eq!(cooccurrence_counts(&c.themes[0], &c.themes[1], &c).unwrap(), (0, 0));
        let r = relatedness(&c.themes[0], &c.themes[1], &c).unwrap();
        assert_eq!(r.ratio, Ratio::from_integer(0));
    }

    fn three_to_one() -> Corpus {
        Corpus {
            documents: vec![doc("D", 1, &[0, 1, 1]), doc("E", 2, &[0, 1])],
            themes: vec![
                theme("a", &[("D", 0), ("D", 1), ("E", 0)]),
                theme("b", &[("D", 2), ("E", 1)]),
            ],
        }
    }

    #[test]
    fn multi_member_counts() {
        // D: (a0,b2) segs 0/1, (a1,b2) segs 1/1; E: (a0,b1) segs 0/1
        let c = three_to_one();
        assert_eq!(cooccurrence_counts(&c.themes[0], &c.themes[1], &c).unwrap(), (3, 1));
        let r = relatedness(&c.themes[1], &c.themes[0], &c).unwrap();
        assert_eq!(r.ratio, Ratio::new(1, 3));
        assert_eq!(r.themes, ("a", "b"));
    }

    #[test]
    fn pair_counts_is_symmetric() {
        let a = [(0, 0), (0, 1), (0, 1), (2, 3), (5, 0)];
        let b = [(0, 1), (2, 3), (2, 4), (4, 0), (5, 0), (5, 0)];
        assert_eq!(pair_counts(&a, &b), pair_counts(&b, &a));
        assert_eq!(pair_counts(&a, &b), (3 + 2 + 2, 2 + 1 + 2));
    }

    /// Three themes in three articles; A–B and B–C share segments, A–C don't.
    fn chain() -> Corpus {
        Corpus {
            documents: vec![
                doc("t1", 1, &[0, 0]),
                doc("t2", 2, &[0, 0]),
                doc("t3", 3, &[0, 1]),
            ],
            themes: vec![
                theme("A", &[("t1", 0), ("t3", 0)]),
                theme("B", &[("t1", 1), ("t2", 0)]),
                theme("C", &[("t2", 1), ("t3", 1)]),
            ],
        }
    }

    #[test]
    fn transitive_closure_links_chain() {
        let c = chain();
        let p = build_blocks(&c, Threshold::default()).unwrap();
        assert_eq!(p.blocks.len(), 1);
        assert_eq!(p.blocks[0].themes, vec!["A", "B", "C"]);
    }

    #[test]
    fn threshold_one_is_all_singletons() {
        let c = chain();
        let p = build_blocks(&c, Threshold::strict(Ratio::from_integer(1))).unwrap();
        assert_eq!(p.blocks.len(), 3);
        let p = build_blocks(&c, Threshold::inclusive(Ratio::from_integer(1))).unwrap();
        assert_eq!(p.blocks.len(), 1);
    }

    #[test]
    fn cohesion_pulls_related_theme_forward() {
        // A at T1 and T3 in one segment with C; B only in T2.
        let c = Corpus {
            documents: vec![
                doc("T1", 1, &[0, 1]),
                doc("T2", 2, &[0]),
                doc("T3", 3, &[0, 0]),
            ],
            themes: vec![
                theme("A", &[("T1", 0), ("T3", 0)]),
                theme("B", &[("T2", 0)]),
                theme("C", &[("T3", 1)]),
            ],
        };
        assert_eq!(chronological_order(&c).unwrap().sequence, vec!["A", "B", "C"]);
        let r = augmented_order(&c, Threshold::default()).unwrap();
        assert_eq!(r.sequence, vec!["A", "C", "B"]);
        let Diagnostics::Augmented { partition, .. } = r.diagnostics else { panic!() };
        assert_eq!(partition.dump(), "block_1 1998-08-07T01:00: A C\nblock_2 1998-08-07T02:00: B\n");
    }

    #[test]
    fn blocks_sharing_a_stamp_document_use_position() {
        // both blocks first reported in T1; block {Y, Z} starts at position 0
        let c = Corpus {
            documents: vec![doc("T1", 1, &[0, 1, 2]), doc("T2", 2, &[0, 0])],
            themes: vec![
                theme("X", &[("T1", 1)]),
                theme("Y", &[("T1", 0), ("T2", 0)]),
                theme("Z", &[("T2", 1)]),
            ],
        };
        let r = augmented_order(&c, Threshold::default()).unwrap();
        assert_eq!(r.sequence, vec!["Y", "Z", "X"]);
    }

    #[test]
    fn no_related_pairs_matches_chronological() {
        let c = three_to_one();
        let aug = augmented_order(&c, Threshold::default()).unwrap();
        assert_eq!(aug.sequence, chronological_order(&c).unwrap().sequence);
    }

    #[test]
    fn table_covers_all_pairs_in_both_modes() {
        let c = chain();
        let s = relatedness_table(&c, Execution::Sequential).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s, relatedness_table(&c, Execution::Parallel).unwrap());
        let ac = s.iter().find(|r| r.themes == ("A", "C")).unwrap();
        assert_eq!((ac.same_text, ac.same_segment), (1, 0));
    }
}
