//! Ordering of cross-document themes for multidocument news summarization.
//!
//! A *theme* is a set of sentences from different articles that report the
//! same piece of information; a summary says each theme once, so producing a
//! readable summary comes down to ordering themes. Three strategies are
//! provided:
//!
//! - [`majority_order`]: follow the order most input articles agree on, via a
//!   greedy linearization of the pairwise precedence graph.
//! - [`chronological_order`]: order themes by the first time any article
//!   reported them.
//! - [`augmented_order`]: chronological ordering applied to blocks of
//!   topically related themes, keeping each block together.
//!
//! The [`analysis`] module covers studying several human orderings of the same
//! items (positional distance, block clustering, agreement) and the exact
//! Fisher test for comparing strategies.
//!
//! ```
//! use themeorder::{chronological_order, io::parse_corpus};
//!
//! let corpus = parse_corpus(br#"{
//!   "documents": [
//!     {"id": "a", "published": "1999-10-05T11:35", "sentences": ["x", "y"], "segments": [0, 0]},
//!     {"id": "b", "published": "1999-10-05T10:20", "sentences": ["z"], "segments": [0]}
//!   ],
//!   "themes": [
//!     {"id": "late",  "members": [{"doc": "a", "pos": 1}]},
//!     {"id": "early", "members": [{"doc": "a", "pos": 0}, {"doc": "b", "pos": 0}]}
//!   ]
//! }"#).unwrap();
//! let result = chronological_order(&corpus).unwrap();
//! assert_eq!(result.sequence, ["early", "late"]);
//! ```
//!
//! The `parallel` feature (default) runs pairwise loops on rayon; see
//! [`par::Execution`].

pub mod analysis;
pub mod augmented;
pub mod chronological;
pub mod error;
pub mod io;
pub mod majority;
pub mod model;
pub mod par;
pub mod segment;

pub use augmented::{augmented_order, build_blocks, BlockPartition, Threshold};
pub use chronological::{chronological_order, theme_timestamp, ThemeTimeStamp};
pub use error::{Error, Result};
pub use majority::{
    brute_force_optimal, build_precedence_counts, greedy_linearize, majority_order, order_weight,
    PrecedenceGraph, TieBreak,
};
pub use model::{
    validate_corpus, Corpus, Diagnostics, Document, OrderingResult, PublicationTime, SentenceRef,
    Strategy, Theme, Violation,
};

use num_rational::Ratio;

/// Parses a non-negative rational written as an integer (`2`), a decimal
/// (`0.6`) or a fraction (`3/5`).
pub fn parse_rational(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidRational(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit())
        || frac.len() > 18
    {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}
