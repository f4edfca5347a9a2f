//! Enumeration of index supports (k-subsets of `0..p`).

use alloc::vec::Vec;

use crate::logsum::binomial_exact;
use crate::{Error, Result};

/// Lexicographic iterator over all size-`k` subsets of `0..p`.
pub struct Combinations {
    p: usize,
    k: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Combinations {
    pub fn new(p: usize, k: usize) -> Self {
        Combinations { p, k, current: (0..k).collect(), started: false, done: k > p }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        if self.k == 0 {
            self.done = true;
            return None;
        }
        // Advance the rightmost index that can move.
        let mut i = self.k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.current[i] < self.p - self.k + i {
                self.current[i] += 1;
                for j in (i + 1)..self.k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(self.current.clone());
            }
        }
    }
}

/// Refuses enumerations larger than `cap` supports.
pub fn check_enumeration_cap(p: u64, k: u64, cap: u64) -> Result<u64> {
    let count = binomial_exact(p, k).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::EnumerationCapExceeded { required: count, cap });
    }
    Ok(count as u64)
}

/// Number of (T, T') pairs with |T| = k1, |T'| = k2, T and T' disjoint,
/// checked against the cap.
pub fn check_pair_cap(p: u64, k1: u64, k2: u64, cap: u64) -> Result<u64> {
    let a = binomial_exact(p, k1).unwrap_or(u128::MAX);
    let b = binomial_exact(p.saturating_sub(k1), k2).unwrap_or(u128::MAX);
    let count = a.checked_mul(b).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::EnumerationCapExceeded { required: count, cap });
    }
    Ok(count as u64)
}

/// All subsets of `0..p` of size between `lo` and `hi` inclusive,
/// in order of increasing size then lexicographic.
pub fn supports_up_to(p: usize, lo: usize, hi: usize) -> impl Iterator<Item = Vec<usize>> {
    (lo..=hi.min(p)).flat_map(move |k| Combinations::new(p, k))
}

/// True if `sub` is a subset of `sup` (both strictly increasing).
pub fn is_subset(sub: &[usize], sup: &[usize]) -> bool {
    let mut it = sup.iter();
    'outer: for &x in sub {
        for &y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Elements of `a` that are not in `b` (both strictly increasing).
pub fn set_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}
