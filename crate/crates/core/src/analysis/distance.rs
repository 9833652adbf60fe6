use std::fmt::Write as _;

use num_rational::Ratio;

use super::format_ratio;
use crate::error::{Error, Result};
use crate::io::OrderingSet;
use crate::par::Execution;

/// Mean positional gap between every pair of labels across a set of
/// orderings.
///
/// Stored as integer gap totals over `orderings` rows so every entry is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    totals: Vec<u64>,
    orderings: u64,
}

impl DistanceMatrix {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of orderings the distances were averaged over.
    pub fn orderings(&self) -> u64 {
        self.orderings
    }

    /// Sum of gaps between labels `i` and `j` over all orderings.
    pub fn total(&self, i: usize, j: usize) -> u64 {
        self.totals[i * self.labels.len() + j]
    }

    pub fn at(&self, i: usize, j: usize) -> Ratio<u64> {
        Ratio::new(self.total(i, j), self.orderings)
    }

    pub fn get(&self, a: &str, b: &str) -> Result<Ratio<u64>> {
        Ok(self.at(self.position(a)?, self.position(b)?))
    }

    fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    /// Tab-separated: a header row of labels, then one row per label.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            let _ = write!(out, "\t{l}");
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.labels.len() {
                let _ = write!(out, "\t{}", format_ratio(self.at(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// `positions[row][label]`
fn positions(set: &OrderingSet) -> Vec<Vec<usize>> {
    set.orderings()
        .iter()
        .map(|o| {
            let mut p = vec![0; o.len()];
            for (k, &label) in o.iter().enumerate() {
                p[label] = k;
            }
            p
        })
        .collect()
}

fn gap_total(positions: &[Vec<usize>], a: usize, b: usize) -> u64 {
    positions.iter().map(|p| p[a].abs_diff(p[b]) as u64).sum()
}

/// Mean over all orderings of the absolute difference between the positions
/// of `a` and `b`.
pub fn pair_distance(a: &str, b: &str, set: &OrderingSet) -> Result<Ratio<u64>> {
    let ia = set.index_of(a).ok_or_else(|| Error::UnknownLabel(a.into()))?;
    let ib = set.index_of(b).ok_or_else(|| Error::UnknownLabel(b.into()))?;
    Ok(Ratio::new(gap_total(&positions(set), ia, ib), set.len() as u64))
}

pub fn distance_matrix(set: &OrderingSet) -> DistanceMatrix {
    distance_matrix_with(set, Execution::default())
}

pub fn distance_matrix_with(set: &OrderingSet, exec: Execution) -> DistanceMatrix {
    let n = set.labels().len();
    let pos = positions(set);
    let rows = exec.map_range(n, |i| (0..n).map(|j| gap_total(&pos, i, j)).collect::<Vec<_>>());
    DistanceMatrix {
        labels: set.labels().to_vec(),
        totals: rows.into_iter().flatten().collect(),
        orderings: set.len() as u64,
    }
}
