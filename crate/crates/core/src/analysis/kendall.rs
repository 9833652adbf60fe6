use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::io::OrderingSet;

/// Number of distinct orderings in the set.
pub fn count_unique_orderings(set: &OrderingSet) -> usize {
    set.orderings().iter().collect::<HashSet<_>>().len()
}

/// Number of item pairs that the two orderings place in opposite order.
///
/// Both orderings must be permutations of the same items.
pub fn kendall_tau_distance<T: Eq + Hash>(o1: &[T], o2: &[T]) -> Result<u64> {
    if o1.len() != o2.len() {
        return Err(Error::InventoryMismatch(format!(
            "{} items vs {} items",
            o1.len(),
            o2.len()
        )));
    }
    let rank: HashMap<&T, usize> = o2.iter().enumerate().map(|(i, x)| (x, i)).collect();
    if rank.len() != o2.len() {
        return Err(Error::InventoryMismatch("second ordering repeats an item".into()));
    }
    let mut seen = vec![false; o2.len()];
    let mut seq = Vec::with_capacity(o1.len());
    for x in o1 {
        let &r = rank
            .get(x)
            .ok_or_else(|| Error::InventoryMismatch("item missing from second ordering".into()))?;
        if std::mem::replace(&mut seen[r], true) {
            return Err(Error::InventoryMismatch("first ordering repeats an item".into()));
        }
        seq.push(r);
    }
    let mut buf = vec![0; seq.len()];
    Ok(inversions(&mut seq, &mut buf))
}

/// Merge-sort inversion count; sorts `xs`.
fn inversions(xs: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = xs.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (l, r) = xs.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        inversions(l, bl) + inversions(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if xs[i] <= xs[j] {
            buf[k] = xs[i];
            i += 1;
        } else {
            buf[k] = xs[j];
            count += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&xs[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&xs[j..n]);
    xs.copy_from_slice(&buf[..n]);
    count
}
