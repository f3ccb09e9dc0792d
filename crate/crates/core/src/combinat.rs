//! Subsets of `[n-1]`, compositions of `n`, and the bijection between them.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::limits::MAX_REPRESENTABLE_N;
use crate::Natural;

/// A subset `S` of `{1, .., n-1}` together with its ambient order `n`.
///
/// Position `i` is stored in bit `i - 1` of the mask, so ascending mask
/// value is the canonical iteration order over all subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DescentSubset {
    n: u32,
    mask: u64,
}

impl DescentSubset {
    /// Builds a subset from a list of positions. Positions must lie in
    /// `1..=n-1` and be strictly increasing.
    pub fn new(n: u32, positions: &[u32]) -> Result<Self> {
        check_order(n)?;
        let mut mask = 0u64;
        let mut prev = 0u32;
        for &s in positions {
            if s == 0 || s >= n {
                return Err(Error::domain(format!(
                    "position {s} outside 1..={} for n = {n}",
                    n - 1
                )));
            }
            if s <= prev {
                return Err(Error::domain(format!(
                    "positions must be strictly increasing, got {s} after {prev}"
                )));
            }
            prev = s;
            mask |= 1 << (s - 1);
        }
        Ok(DescentSubset { n, mask })
    }

    pub fn from_mask(n: u32, mask: u64) -> Result<Self> {
        check_order(n)?;
        if mask & !full_mask(n) != 0 {
            return Err(Error::domain(format!(
                "mask {mask:#b} has positions outside 1..={} for n = {n}",
                n - 1
            )));
        }
        Ok(DescentSubset { n, mask })
    }

    /// Caller guarantees `mask` lies inside `full_mask(n)`.
    pub(crate) fn from_mask_unchecked(n: u32, mask: u64) -> Self {
        debug_assert!(mask & !full_mask(n) == 0);
        DescentSubset { n, mask }
    }

    pub fn empty(n: u32) -> Result<Self> {
        Self::from_mask(n, 0)
    }

    /// The whole set `[n-1]`.
    pub fn full(n: u32) -> Result<Self> {
        check_order(n)?;
        Ok(DescentSubset {
            n,
            mask: full_mask(n),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, position: u32) -> bool {
        position >= 1 && position < self.n && self.mask & (1 << (position - 1)) != 0
    }

    pub fn positions(&self) -> Positions {
        Positions { mask: self.mask }
    }

    pub fn is_subset_of(&self, other: &DescentSubset) -> bool {
        self.n == other.n && self.mask & !other.mask == 0
    }

    pub fn union(&self, other: &DescentSubset) -> Result<Self> {
        self.same_order(other)?;
        Ok(DescentSubset {
            n: self.n,
            mask: self.mask | other.mask,
        })
    }

    pub fn intersection(&self, other: &DescentSubset) -> Result<Self> {
        self.same_order(other)?;
        Ok(DescentSubset {
            n: self.n,
            mask: self.mask & other.mask,
        })
    }

    /// `{n - s : s in S}`.
    pub fn reversed(&self) -> Self {
        let mask = self
            .positions()
            .fold(0u64, |acc, s| acc | 1 << (self.n - s - 1));
        DescentSubset { n: self.n, mask }
    }

    /// Every subset `T` of `self`, in ascending mask order.
    pub fn subsets(&self) -> impl Iterator<Item = DescentSubset> {
        let n = self.n;
        let full = self.mask;
        // Enumerate submasks from the top down, then reverse into ascending order.
        let mut subs = Vec::with_capacity(1 << self.len());
        let mut sub = full;
        loop {
            subs.push(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
        subs.into_iter()
            .rev()
            .map(move |mask| DescentSubset { n, mask })
    }

    /// Every subset of `[n-1]`, in ascending mask order.
    pub fn all(n: u32) -> Result<impl Iterator<Item = DescentSubset>> {
        check_order(n)?;
        Ok((0..=full_mask(n)).map(move |mask| DescentSubset { n, mask }))
    }

    fn same_order(&self, other: &DescentSubset) -> Result<()> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "subsets of different ambient orders {} and {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DescentSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.positions().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Ascending iterator over the positions of a [`DescentSubset`].
#[derive(Debug, Clone)]
pub struct Positions {
    mask: u64,
}

impl Iterator for Positions {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.mask == 0 {
            return None;
        }
        let bit = self.mask.trailing_zeros();
        self.mask &= self.mask - 1;
        Some(bit + 1)
    }
}

/// Mask with bits for every position `1..=n-1`.
pub fn full_mask(n: u32) -> u64 {
    if n <= 1 {
        0
    } else {
        u64::MAX >> (65 - n)
    }
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 || n > MAX_REPRESENTABLE_N {
        return Err(Error::domain(format!(
            "ambient order n = {n} must lie in 1..={MAX_REPRESENTABLE_N}"
        )));
    }
    Ok(())
}

/// An ordered sequence of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::domain("a composition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(Error::domain("composition parts must be positive"));
        }
        let total: u64 = parts.iter().map(|&c| c as u64).sum();
        if total > MAX_REPRESENTABLE_N as u64 {
            return Err(Error::domain(format!(
                "composition total {total} exceeds {MAX_REPRESENTABLE_N}"
            )));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Like [`Composition`] but zero parts are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeakComposition {
    parts: Vec<u64>,
}

impl WeakComposition {
    pub fn new(parts: Vec<u64>) -> Self {
        WeakComposition { parts }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }
}

impl From<&Composition> for WeakComposition {
    fn from(c: &Composition) -> Self {
        WeakComposition {
            parts: c.parts.iter().map(|&p| p as u64).collect(),
        }
    }
}

/// Sends `S = {s_1 < .. < s_{k-1}}` to the composition of consecutive
/// differences `(s_1 - 0, s_2 - s_1, .., n - s_{k-1})`.
pub fn co(s: &DescentSubset) -> Composition {
    let mut parts = Vec::with_capacity(s.len() as usize + 1);
    let mut prev = 0;
    for pos in s.positions() {
        parts.push(pos - prev);
        prev = pos;
    }
    parts.push(s.n() - prev);
    Composition { parts }
}

/// Inverse of [`co`]: the set of proper partial sums.
pub fn co_inv(c: &Composition) -> DescentSubset {
    let n = c.total();
    let mut mask = 0u64;
    let mut acc = 0;
    for &part in &c.parts[..c.parts.len() - 1] {
        acc += part;
        mask |= 1 << (acc - 1);
    }
    DescentSubset { n, mask }
}

/// The descent set `{i : perm[i-1] > perm[i]}` of a permutation of `1..=n`.
pub fn descent_set(perm: &[u32]) -> Result<DescentSubset> {
    let n = perm.len() as u32;
    check_order(n)?;
    let mut seen = vec![false; perm.len()];
    for &v in perm {
        if v == 0 || v > n || std::mem::replace(&mut seen[v as usize - 1], true) {
            return Err(Error::domain(format!(
                "{perm:?} is not a permutation of 1..={n}"
            )));
        }
    }
    Ok(descent_mask(perm))
}

pub(crate) fn descent_mask(perm: &[u32]) -> DescentSubset {
    let mask = perm
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > w[1])
        .fold(0u64, |acc, (i, _)| acc | 1 << i);
    DescentSubset {
        n: perm.len() as u32,
        mask,
    }
}

/// `n! / (c_1! * .. * c_k!)` computed exactly as a product of binomials.
pub fn multinomial(n: u64, c: &WeakComposition) -> Result<Natural> {
    if c.total() != n {
        return Err(Error::domain(format!(
            "parts sum to {} but n = {n}",
            c.total()
        )));
    }
    let mut result = BigUint::one();
    let mut running = 0u64;
    for &part in c.parts() {
        running += part;
        result *= binomial(running, part);
    }
    Ok(result)
}

/// `C(n, k)` by the multiplicative formula; every intermediate quotient is exact.
pub fn binomial(n: u64, k: u64) -> Natural {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> Natural {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subset(n: u32, pos: &[u32]) -> DescentSubset {
        DescentSubset::new(n, pos).unwrap()
    }

    #[test]
    fn co_examples() {
        assert_eq!(co(&subset(4, &[])).parts(), &[4]);
        assert_eq!(co(&subset(4, &[2])).parts(), &[2, 2]);
        assert_eq!(co(&subset(6, &[1, 4])).parts(), &[1, 3, 2]);
    }

    #[test]
    fn co_inv_examples() {
        let c = |p: Vec<u32>| Composition::new(p).unwrap();
        assert_eq!(co_inv(&c(vec![4])), subset(4, &[]));
        assert_eq!(co_inv(&c(vec![2, 2])), subset(4, &[2]));
        assert_eq!(co_inv(&c(vec![1, 3, 2])), subset(6, &[1, 4]));
    }

    #[test]
    fn invalid_subsets_rejected() {
        assert!(matches!(DescentSubset::new(4, &[4]), Err(Error::Domain(_))));
        assert!(matches!(DescentSubset::new(4, &[0]), Err(Error::Domain(_))));
        assert!(matches!(DescentSubset::new(4, &[2, 2]), Err(Error::Domain(_))));
        assert!(matches!(DescentSubset::new(4, &[3, 1]), Err(Error::Domain(_))));
        assert!(DescentSubset::new(0, &[]).is_err());
        assert!(DescentSubset::from_mask(3, 0b100).is_err());
    }

    #[test]
    fn composition_rejects_zero_and_empty() {
        assert!(Composition::new(vec![]).is_err());
        assert!(Composition::new(vec![2, 0, 1]).is_err());
    }

    #[test]
    fn descent_set_examples() {
        assert_eq!(descent_set(&[1, 2, 3]).unwrap(), subset(3, &[]));
        assert_eq!(descent_set(&[2, 1, 3]).unwrap(), subset(3, &[1]));
        assert_eq!(descent_set(&[3, 1, 4, 2]).unwrap(), subset(4, &[1, 3]));
        assert!(descent_set(&[1, 1, 2]).is_err());
        assert!(descent_set(&[1, 4, 2]).is_err());
    }

    #[test]
    fn multinomial_examples() {
        let w = |p: Vec<u64>| WeakComposition::new(p);
        assert_eq!(multinomial(4, &w(vec![2, 2])).unwrap(), 6u32.into());
        assert_eq!(multinomial(3, &w(vec![1, 1, 1])).unwrap(), 6u32.into());
        assert_eq!(multinomial(5, &w(vec![0, 5, 0])).unwrap(), 1u32.into());
        assert!(matches!(
            multinomial(5, &w(vec![2, 2])),
            Err(Error::Domain(_))
        ));
    }

    /// Pascal-style recurrence: multinomial(n; c) = sum_i multinomial(n-1; c - e_i).
    fn multinomial_by_recurrence(c: &mut Vec<u64>) -> BigUint {
        if c.iter().all(|&x| x == 0) {
            return BigUint::one();
        }
        let mut total = BigUint::default();
        for i in 0..c.len() {
            if c[i] > 0 {
                c[i] -= 1;
                total += multinomial_by_recurrence(c);
                c[i] += 1;
            }
        }
        total
    }

    #[test]
    fn multinomial_matches_recurrence_oracle() {
        let oracle = multinomial_by_recurrence(&mut vec![3, 3, 4]);
        assert_eq!(oracle, 4200u32.into());
        assert_eq!(
            multinomial(10, &WeakComposition::new(vec![3, 3, 4])).unwrap(),
            oracle
        );
        for parts in [vec![1, 2, 3], vec![0, 4, 2], vec![5, 1, 1, 1]] {
            let n = parts.iter().sum();
            let expected = multinomial_by_recurrence(&mut parts.clone());
            assert_eq!(
                multinomial(n, &WeakComposition::new(parts)).unwrap(),
                expected
            );
        }
    }

    #[test]
    fn subsets_ascending_and_complete() {
        let s = subset(6, &[1, 3, 5]);
        let subs: Vec<u64> = s.subsets().map(|t| t.mask()).collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.windows(2).all(|w| w[0] < w[1]));
        assert!(s.subsets().all(|t| t.is_subset_of(&s)));
    }

    #[test]
    fn reversal_and_display() {
        let s = subset(6, &[1, 4]);
        assert_eq!(s.reversed(), subset(6, &[2, 5]));
        assert_eq!(s.to_string(), "{1,4}");
        assert_eq!(co(&s).to_string(), "(1,3,2)");
    }

    #[test]
    fn full_mask_edges() {
        assert_eq!(full_mask(1), 0);
        assert_eq!(full_mask(2), 1);
        assert_eq!(full_mask(4), 0b111);
        assert_eq!(full_mask(64), u64::MAX >> 1);
    }
}
