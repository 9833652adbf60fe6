//! Tools for studying several alternative orderings of the same items, plus
//! the exact significance test used to compare ordering strategies.

mod cluster;
mod distance;
mod fisher;
mod kendall;

pub use cluster::{cluster_blocks, cluster_blocks_with, Clustering, Linkage, StopRule};
pub use distance::{distance_matrix, distance_matrix_with, pair_distance, DistanceMatrix};
pub use fisher::{fisher_exact_one_sided, ContingencyTable2x2, Probability};
pub use kendall::{count_unique_orderings, kendall_tau_distance};

use num_rational::Ratio;

/// Exact decimal when the denominator has only factors 2 and 5, `p/q`
/// otherwise.
pub fn format_ratio(r: Ratio<u64>) -> String {
    let (n, d) = (u128::from(*r.numer()), u128::from(*r.denom()));
    if d == 1 {
        return n.to_string();
    }
    // smallest power of ten the denominator divides, if small enough to print
    let Some(digits) = (1..=30u32).find(|&k| 10u128.pow(k) % d == 0) else {
        return format!("{n}/{d}");
    };
    let scaled = n * (10u128.pow(digits) / d);
    let s = format!("{:0>width$}", scaled, width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{int}.{}", frac.trim_end_matches('0'))
}
