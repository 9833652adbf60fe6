//! One-sided Fisher exact test on a 2x2 table, in exact rational arithmetic.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `[[a, b], [c, d]]`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContingencyTable2x2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl ContingencyTable2x2 {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Self { a, b, c, d }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    /// Swaps the rows and the columns at once, which keeps `a` in the
    /// top-left role but exchanges it with `d`.
    pub fn transposed_diagonal(&self) -> Self {
        Self { a: self.d, b: self.c, c: self.b, d: self.a }
    }
}

/// An exact probability, always in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probability(BigRational);

impl Probability {
    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Numerator and denominator, if both fit in `u64`.
    pub fn as_u64_pair(&self) -> Option<(u64, u64)> {
        Some((self.0.numer().to_u64()?, self.0.denom().to_u64()?))
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

fn choose(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // each partial product is itself a binomial coefficient, so division is exact
    (1..=k).fold(BigUint::one(), |acc, i| acc * (n - k + i) / i)
}

/// `P(X >= a)` for `X` hypergeometric with the table's margins fixed: the
/// probability of a top-left cell at least as large as the one observed.
pub fn fisher_exact_one_sided(t: ContingencyTable2x2) -> Result<Probability> {
    let n = t.total();
    if n == 0 {
        return Err(Error::EmptyTable);
    }
    let row1 = t.a + t.b;
    let col1 = t.a + t.c;
    let upper = row1.min(col1);
    // P(X = x) numerators; consecutive terms differ by a rational factor
    let mut term = choose(col1, t.a) * choose(n - col1, row1 - t.a);
    let mut tail = BigUint::zero();
    for x in t.a..=upper {
        tail += &term;
        if x < upper {
            term = term * ((col1 - x) * (row1 - x)) / ((x + 1) * (n + x + 1 - col1 - row1));
        }
    }
    let p = BigRational::new(BigInt::from(tail), BigInt::from(choose(n, row1)));
    Ok(Probability(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_nontrivial_table() {
        let p = fisher_exact_one_sided(ContingencyTable2x2::new(1, 0, 0, 1)).unwrap();
        assert_eq!(p.as_u64_pair(), Some((1, 2)));
        assert_eq!(p.to_string(), "1/2");
    }

    #[test]
    fn comprehension_table() {
        let p = fisher_exact_one_sided(ContingencyTable2x2::new(9, 1, 5, 5)).unwrap();
        // 13013/184756 in lowest terms
        assert_eq!(*p.ratio(), BigRational::new(13013.into(), 184756.into()));
        assert_eq!(p.to_string(), "91/1292");
    }

    #[test]
    fn empty_table() {
        assert!(matches!(
            fisher_exact_one_sided(ContingencyTable2x2::new(0, 0, 0, 0)),
            Err(Error::EmptyTable)
        ));
    }

    #[test]
    fn least_extreme_cell_has_probability_one() {
        // a at its minimum given the margins: the whole distribution
        let p = fisher_exact_one_sided(ContingencyTable2x2::new(0, 4, 3, 2)).unwrap();
        assert_eq!(p.as_u64_pair(), Some((1, 1)));
    }

    #[test]
    fn large_margins_do_not_overflow() {
        let p = fisher_exact_one_sided(ContingencyTable2x2::new(400, 100, 300, 200)).unwrap();
        let v = p.to_f64();
        assert!(v > 0.0 && v < 1e-9, "{v}");
    }
}
