//! Compositions of an integer into positive parts, ranked in lexicographic
//! order of the part sequence.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::binomial;

/// `c₀ + … + c_{p−1} = total` with every `cᵢ ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition {
    parts: Vec<u64>,
}

impl Composition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidConstruction(format!("{parts:?} is not a composition")));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Start of each part's block of integers.
    pub fn prefix_starts(&self) -> Vec<u64> {
        let mut acc = 0;
        self.parts
            .iter()
            .map(|p| {
                let s = acc;
                acc += p;
                s
            })
            .collect()
    }

    /// Index of the block containing `x`, for `0 ≤ x < total`.
    pub fn block_of(&self, x: u64) -> Option<usize> {
        let mut acc = 0;
        for (i, p) in self.parts.iter().enumerate() {
            acc += p;
            if x < acc {
                return Some(i);
            }
        }
        None
    }

    /// The block index of every integer `0..total`.
    pub fn assignment(&self) -> Vec<usize> {
        self.parts.iter().enumerate().flat_map(|(i, &p)| std::iter::repeat_n(i, p as usize)).collect()
    }
}

/// Number of compositions of `total` into `parts` positive parts.
pub fn composition_count(total: u64, parts: u64) -> BigUint {
    if parts == 0 || total < parts {
        return BigUint::zero();
    }
    binomial(total - 1, parts - 1)
}

/// The `index`-th composition in lexicographic order.
pub fn composition_unrank(index: &BigUint, total: u64, parts: u64) -> Result<Composition> {
    let count = composition_count(total, parts);
    if index >= &count {
        return Err(Error::IndexOutOfRange { index: index.to_string(), size: count.to_string() });
    }
    let mut rest = index.clone();
    let mut remaining = total;
    let mut out = Vec::with_capacity(parts as usize);
    for left in (1..=parts).rev() {
        if left == 1 {
            out.push(remaining);
            break;
        }
        let mut c = 1;
        loop {
            let block = composition_count(remaining - c, left - 1);
            if rest < block {
                break;
            }
            rest -= block;
            c += 1;
        }
        out.push(c);
        remaining -= c;
    }
    Composition::new(out)
}

/// Inverse of [`composition_unrank`].
pub fn composition_rank(c: &Composition) -> BigUint {
    let mut rank = BigUint::zero();
    let mut remaining = c.total();
    let parts = c.parts.len() as u64;
    for (i, &p) in c.parts.iter().enumerate() {
        let left = parts - i as u64;
        if left == 1 {
            break;
        }
        for smaller in 1..p {
            rank += composition_count(remaining - smaller, left - 1);
        }
        remaining -= p;
    }
    rank
}

/// All compositions in lexicographic order, by direct recursion.
pub fn all_compositions(total: u64, parts: u64) -> Vec<Composition> {
    fn go(remaining: u64, left: u64, prefix: &mut Vec<u64>, out: &mut Vec<Composition>) {
        if left == 1 {
            prefix.push(remaining);
            out.push(Composition { parts: prefix.clone() });
            prefix.pop();
            return;
        }
        for c in 1..=remaining.saturating_sub(left - 1) {
            prefix.push(c);
            go(remaining - c, left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts >= 1 && total >= parts {
        go(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn small_unranks() {
        assert_eq!(composition_unrank(&u(0), 4, 3).unwrap().parts(), &[1, 1, 2]);
        assert_eq!(composition_unrank(&u(1), 4, 3).unwrap().parts(), &[1, 2, 1]);
        assert_eq!(composition_unrank(&u(2), 4, 3).unwrap().parts(), &[2, 1, 1]);
        assert_eq!(composition_unrank(&u(0), 9, 1).unwrap().parts(), &[9]);
        assert_eq!(composition_unrank(&u(34), 8, 5).unwrap().parts(), &[4, 1, 1, 1, 1]);
        assert!(composition_unrank(&u(35), 8, 5).is_err());
    }

    #[test]
    fn unrank_matches_recursive_enumeration() {
        for (total, parts) in [(4, 3), (8, 5), (7, 3), (16, 9)] {
            let all = all_compositions(total, parts);
            assert_eq!(BigUint::from(all.len()), composition_count(total, parts));
            let mut sorted = all.clone();
            sorted.sort();
            assert_eq!(sorted, all);
            for (i, c) in all.iter().enumerate() {
                assert_eq!(&composition_unrank(&u(i as u64), total, parts).unwrap(), c);
                assert_eq!(composition_rank(c), u(i as u64));
            }
        }
    }

    #[test]
    fn blocks() {
        let c = Composition::new(vec![2, 1, 1]).unwrap();
        assert_eq!(c.assignment(), vec![0, 0, 1, 2]);
        assert_eq!(c.prefix_starts(), vec![0, 2, 3]);
        assert_eq!(c.block_of(1), Some(0));
        assert_eq!(c.block_of(4), None);
        assert!(Composition::new(vec![1, 0]).is_err());
    }
}
