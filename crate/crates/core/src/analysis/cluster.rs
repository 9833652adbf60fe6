//! Agglomerative clustering over a [`DistanceMatrix`].
//!
//! Cluster distances are kept as exact rationals and updated with the
//! Lance-Williams recurrences, so ties are real ties and the merge order is
//! fully deterministic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};

use super::DistanceMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Merge until exactly this many clusters remain.
    Clusters(usize),
    /// Merge while the closest pair is at most this far apart.
    MaxDistance(Ratio<u64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linkage {
    /// Minimum variance merge (Lance-Williams on squared distances).
    #[default]
    Ward,
    /// Mean distance over all cross-cluster pairs.
    Average,
}

/// Label blocks, each sorted, ordered by their smallest label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub blocks: Vec<Vec<String>>,
}

impl Clustering {
    /// One `block_k: label …` line per block.
    pub fn report(&self) -> String {
        self.blocks
            .iter()
            .enumerate()
            .map(|(k, b)| format!("block_{}: {}\n", k + 1, b.join(" ")))
            .collect()
    }
}

struct Cluster {
    members: Vec<usize>,
    /// Smallest member label.
    key: String,
}

fn rational(r: Ratio<u64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Ward clustering stopped by `stop`.
pub fn cluster_blocks(m: &DistanceMatrix, stop: StopRule) -> Result<Clustering> {
    cluster_blocks_with(m, stop, Linkage::default())
}

pub fn cluster_blocks_with(m: &DistanceMatrix, stop: StopRule, linkage: Linkage) -> Result<Clustering> {
    let n = m.len();
    if let StopRule::Clusters(k) = stop {
        if k == 0 || k > n {
            return Err(Error::ClusterCount { k, n });
        }
    }
    let labels = m.labels();
    let mut clusters: Vec<Cluster> = (0..n)
        .map(|i| Cluster { members: vec![i], key: labels[i].clone() })
        .collect();
    // Ward works on squared distances; the merge order is the same either way
    let lift = |d: BigRational| match linkage {
        Linkage::Ward => &d * &d,
        Linkage::Average => d,
    };
    let mut dist: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| lift(rational(m.at(i, j)))).collect())
        .collect();
    let cutoff = match stop {
        StopRule::MaxDistance(t) => Some(lift(rational(t))),
        StopRule::Clusters(_) => None,
    };

    loop {
        if let StopRule::Clusters(k) = stop {
            if clusters.len() <= k {
                break;
            }
        }
        let Some((a, b)) = closest(&clusters, &dist) else { break };
        if cutoff.as_ref().is_some_and(|c| dist[a][b] > *c) {
            break;
        }
        merge(&mut clusters, &mut dist, a, b, linkage);
    }

    let mut blocks: Vec<Vec<String>> = clusters
        .into_iter()
        .map(|c| {
            let mut b: Vec<String> = c.members.iter().map(|&i| labels[i].clone()).collect();
            b.sort();
            b
        })
        .collect();
    blocks.sort();
    Ok(Clustering { blocks })
}

/// Closest pair `(a, b)` with `a < b`. Ties go to the pair whose smaller
/// cluster key is lexicographically smallest, then the larger key.
fn closest(clusters: &[Cluster], dist: &[Vec<BigRational>]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let tie_key = |a: usize, b: usize| {
        let (x, y) = (&clusters[a].key, &clusters[b].key);
        if x <= y { (x, y) } else { (y, x) }
    };
    for a in 0..clusters.len() {
        for b in a + 1..clusters.len() {
            let better = match best {
                None => true,
                Some((ba, bb)) => match dist[a][b].cmp(&dist[ba][bb]) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => tie_key(a, b) < tie_key(ba, bb),
                },
            };
            if better {
                best = Some((a, b));
            }
        }
    }
    best
}

/// Folds cluster `b` into `a` (`a < b`).
fn merge(clusters: &mut Vec<Cluster>, dist: &mut Vec<Vec<BigRational>>, a: usize, b: usize, linkage: Linkage) {
    let size = |i: usize| BigRational::from_integer(BigInt::from(clusters[i].members.len()));
    let (na, nb) = (size(a), size(b));
    for k in 0..clusters.len() {
        if k == a || k == b {
            continue;
        }
        let updated = match linkage {
            Linkage::Average => (&na * &dist[k][a] + &nb * &dist[k][b]) / (&na + &nb),
            Linkage::Ward => {
                let nk = size(k);
                let total = &na + &nb + &nk;
                ((&na + &nk) * &dist[k][a] + (&nb + &nk) * &dist[k][b] - &nk * &dist[a][b]) / total
            }
        };
        dist[k][a] = updated.clone();
        dist[a][k] = updated;
    }
    for row in dist.iter_mut() {
        row.remove(b);
    }
    dist.remove(b);
    let gone = clusters.remove(b);
    let keep = &mut clusters[a];
    keep.members.extend(gone.members);
    if gone.key < keep.key {
        keep.key = gone.key;
    }
}
