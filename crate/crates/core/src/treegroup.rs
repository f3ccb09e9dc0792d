//! The group generated by rotating the children of each internal node of a
//! balanced `p`-ary tree with `q = p^k` leaves, acting on `q`-tuples of
//! subsets by permuting indices.
//!
//! Orbits are computed by breadth-first closure under the `(q-1)/(p-1)`
//! generators; the full group is only materialized for the closure-size check.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{Pow, Zero};
use rand::Rng;

use crate::combinat::{full_mask, DescentSubset};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::padic::{depth, valuation_signed, Prime};
use crate::powersum::term_f;
use crate::{Integer, Natural};

/// Internal node `(a, b)`: level `a` in `1..=k` (depth `k - a`), offset `b`
/// from the left in `0..p^{k-a}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeNodeIndex {
    pub a: u32,
    pub b: u32,
}

/// `p^k` as a `u32` leaf count.
fn leaves(p: Prime, k: u32) -> Result<u32> {
    p.get()
        .checked_pow(k)
        .filter(|&q| q <= 1 << 20)
        .ok_or_else(|| Error::domain(format!("{p}^{k} leaves is too many")))
}

impl TreeNodeIndex {
    pub fn new(p: Prime, k: u32, a: u32, b: u32) -> Result<Self> {
        if a == 0 || a > k {
            return Err(Error::domain(format!("level a = {a} outside 1..={k}")));
        }
        let width = leaves(p, k - a)?;
        if b >= width {
            return Err(Error::domain(format!(
                "offset b = {b} outside 0..{width} at level {a}"
            )));
        }
        Ok(TreeNodeIndex { a, b })
    }

    /// Every internal node, level by level from the bottom.
    pub fn all(p: Prime, k: u32) -> Result<Vec<TreeNodeIndex>> {
        let mut nodes = Vec::new();
        for a in 1..=k {
            for b in 0..leaves(p, k - a)? {
                nodes.push(TreeNodeIndex { a, b });
            }
        }
        Ok(nodes)
    }
}

/// A permutation of the leaves `1..=q`, stored zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafPermutation {
    images: Vec<u32>,
}

impl LeafPermutation {
    pub fn identity(q: u32) -> Self {
        LeafPermutation {
            images: (0..q).collect(),
        }
    }

    /// From one-based images `images[i - 1] = g(i)`.
    pub fn from_images(images: &[u32]) -> Result<Self> {
        let q = images.len();
        let mut seen = vec![false; q];
        let mut zero_based = Vec::with_capacity(q);
        for &v in images {
            if v == 0 || v as usize > q || std::mem::replace(&mut seen[v as usize - 1], true) {
                return Err(Error::domain(format!("{images:?} is not a bijection on 1..={q}")));
            }
            zero_based.push(v - 1);
        }
        Ok(LeafPermutation { images: zero_based })
    }

    pub fn degree(&self) -> u32 {
        self.images.len() as u32
    }

    /// Image of the one-based leaf `i`.
    pub fn apply(&self, i: u32) -> u32 {
        self.images[i as usize - 1] + 1
    }

    /// `self . other`: apply `other` first.
    pub fn compose(&self, other: &LeafPermutation) -> LeafPermutation {
        assert_eq!(self.degree(), other.degree());
        LeafPermutation {
            images: other.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn order(&self) -> u64 {
        let mut power = self.clone();
        let mut order = 1;
        while !power.is_identity() {
            power = power.compose(self);
            order += 1;
        }
        order
    }

    /// Nontrivial cycles, one-based, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.images.len()];
        let mut cycles = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i as u32 + 1);
                i = self.images[i] as usize;
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Leaves moved by the permutation, one-based.
    pub fn support(&self) -> Vec<u32> {
        (0..self.images.len())
            .filter(|&i| self.images[i] as usize != i)
            .map(|i| i as u32 + 1)
            .collect()
    }
}

impl fmt::Display for LeafPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(u32::to_string).collect();
            write!(f, "({})", body.join(","))?;
        }
        Ok(())
    }
}

/// The rotation `sigma_{a,b}`: the product over `i = 1..=p^{a-1}` of the
/// `p`-cycles `(i + b p^a, i + b p^a + p^{a-1}, .., i + b p^a + (p-1) p^{a-1})`.
pub fn sigma(p: Prime, k: u32, a: u32, b: u32) -> Result<LeafPermutation> {
    let node = TreeNodeIndex::new(p, k, a, b)?;
    Ok(sigma_at(p, k, node))
}

fn sigma_at(p: Prime, k: u32, node: TreeNodeIndex) -> LeafPermutation {
    let pp = p.get();
    let q = pp.pow(k);
    let stride = pp.pow(node.a - 1);
    let offset = node.b * pp.pow(node.a);
    let mut images: Vec<u32> = (0..q).collect();
    for i in 0..stride {
        for t in 0..pp {
            let from = offset + i + t * stride;
            let to = offset + i + ((t + 1) % pp) * stride;
            images[from as usize] = to;
        }
    }
    LeafPermutation { images }
}

/// All `(q - 1)/(p - 1)` generators.
pub fn generators(p: Prime, k: u32) -> Result<Vec<LeafPermutation>> {
    Ok(TreeNodeIndex::all(p, k)?
        .into_iter()
        .map(|node| sigma_at(p, k, node))
        .collect())
}

/// `p^{(q-1)/(p-1)}`.
pub fn group_order(p: Prime, k: u32) -> Result<Natural> {
    let q = leaves(p, k)?;
    let exponent = (q - 1) / (p.get() - 1);
    Ok(Pow::pow(BigUint::from(p.get()), exponent))
}

/// Size of the group obtained by closing the generators under composition.
/// Fails with a capacity error once more than `cap` elements are found.
pub fn group_closure_size(p: Prime, k: u32, cap: usize) -> Result<usize> {
    let q = leaves(p, k)?;
    let gens = generators(p, k)?;
    let identity = LeafPermutation::identity(q);
    let mut seen: HashSet<LeafPermutation> = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let h = s.compose(&g);
            if seen.insert(h.clone()) {
                if seen.len() > cap {
                    return Err(Error::Capacity {
                        what: "group elements",
                        requested: seen.len() as u64,
                        limit: cap as u64,
                    });
                }
                queue.push_back(h);
            }
        }
    }
    Ok(seen.len())
}

/// An ordered tuple of subsets of `[n-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetTuple {
    n: u32,
    masks: Vec<u64>,
}

impl SubsetTuple {
    pub fn new(n: u32, entries: &[DescentSubset]) -> Result<Self> {
        DescentSubset::empty(n)?;
        if let Some(t) = entries.iter().find(|t| t.n() != n) {
            return Err(Error::domain(format!("{t} is not a subset for n = {n}")));
        }
        Ok(SubsetTuple {
            n,
            masks: entries.iter().map(DescentSubset::mask).collect(),
        })
    }

    pub fn from_masks(n: u32, masks: Vec<u64>) -> Result<Self> {
        DescentSubset::empty(n)?;
        let full = full_mask(n);
        if masks.iter().any(|m| m & !full != 0) {
            return Err(Error::domain(format!("mask outside [n-1] for n = {n}")));
        }
        Ok(SubsetTuple { n, masks })
    }

    /// Uniformly random `q`-tuple.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: u32, q: usize) -> Result<Self> {
        DescentSubset::empty(n)?;
        let full = full_mask(n);
        let masks = (0..q).map(|_| rng.gen_range(0..=full)).collect();
        Ok(SubsetTuple { n, masks })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn entries(&self) -> Vec<DescentSubset> {
        self.masks
            .iter()
            .map(|&m| DescentSubset::from_mask_unchecked(self.n, m))
            .collect()
    }

    pub fn union_size(&self) -> u32 {
        self.masks.iter().fold(0u64, |a, &m| a | m).count_ones()
    }

    /// `g . x`, moving entry `i` to index `g(i)`.
    pub fn act(&self, g: &LeafPermutation) -> SubsetTuple {
        let mut masks = vec![0; self.masks.len()];
        for (i, &m) in self.masks.iter().enumerate() {
            masks[g.images[i] as usize] = m;
        }
        SubsetTuple { n: self.n, masks }
    }
}

impl fmt::Display for SubsetTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn check_length(x: &SubsetTuple, p: Prime, k: u32) -> Result<u32> {
    let q = leaves(p, k)?;
    if x.len() != q as usize {
        return Err(Error::domain(format!(
            "tuple has length {} but q = {p}^{k} = {q}",
            x.len()
        )));
    }
    Ok(q)
}

/// The orbit of `x`, sorted; the first member is the canonical representative.
pub fn orbit(x: &SubsetTuple, p: Prime, k: u32) -> Result<Vec<SubsetTuple>> {
    check_length(x, p, k)?;
    let gens = generators(p, k)?;
    let mut seen = BTreeSet::from([x.clone()]);
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(y) = queue.pop_front() {
        for g in &gens {
            let z = y.act(g);
            if !seen.contains(&z) {
                seen.insert(z.clone());
                queue.push_back(z);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// An orbit with the data the valuation bound is stated in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    pub representative: SubsetTuple,
    pub size: usize,
    pub orbit_sum: Integer,
    /// `None` when the orbit sum is zero.
    pub valuation: Option<u64>,
}

pub fn orbit_record(x: &SubsetTuple, p: Prime, k: u32) -> Result<OrbitRecord> {
    let members = orbit(x, p, k)?;
    let size = members.len();
    let sum = term_f(x.n(), &x.entries())? * Integer::from(size);
    let valuation = if sum.is_zero() {
        None
    } else {
        Some(valuation_signed(&sum, p)?)
    };
    Ok(OrbitRecord {
        representative: members.into_iter().next().expect("orbit contains x"),
        size,
        orbit_sum: sum,
        valuation,
    })
}

/// `sum_{y in Orb(x)} f(y) = |Orb(x)| f(x)`, since `f` is invariant under
/// permuting the tuple.
pub fn orbit_sum(x: &SubsetTuple, p: Prime, k: u32) -> Result<Integer> {
    Ok(orbit_record(x, p, k)?.orbit_sum)
}

/// `ceil((q - 1 + |U T_i| - q d_p(n)) / (p - 1))`, clamped at 0; requires `d_p(n) > 0`.
pub fn orbit_valuation_bound(x: &SubsetTuple, p: Prime, k: u32) -> Result<u64> {
    let q = check_length(x, p, k)? as i64;
    let d = depth(x.n() as u64, p)? as i64;
    if d == 0 {
        return Err(Error::not_applicable(format!(
            "d_{p}({}) = 0",
            x.n()
        )));
    }
    let numerator = q - 1 + x.union_size() as i64 - q * d;
    let denominator = p.get() as i64 - 1;
    Ok(num_integer::Integer::div_ceil(&numerator, &denominator).max(0) as u64)
}

/// Orbit valuation compared with its lower bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitBoundCheck {
    pub record: OrbitRecord,
    pub bound: u64,
    /// True when the orbit sum is zero (its valuation is infinite).
    pub vacuous: bool,
    pub holds: bool,
}

pub fn orbit_bound_check(x: &SubsetTuple, p: Prime, k: u32) -> Result<OrbitBoundCheck> {
    let bound = orbit_valuation_bound(x, p, k)?;
    let record = orbit_record(x, p, k)?;
    let (vacuous, holds) = match record.valuation {
        None => (true, true),
        Some(v) => (false, v >= bound),
    };
    Ok(OrbitBoundCheck {
        record,
        bound,
        vacuous,
        holds,
    })
}

/// Result of partitioning the whole tuple space into orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub n: u32,
    pub q: u32,
    pub orbit_count: usize,
    pub total_tuples: u64,
    pub size_sum: u64,
    pub disjoint: bool,
    pub sizes_are_p_powers: bool,
    pub term_sum: Integer,
    pub orbit_sum_total: Integer,
}

impl OrbitPartition {
    pub fn holds(&self) -> bool {
        self.disjoint
            && self.sizes_are_p_powers
            && self.size_sum == self.total_tuples
            && self.term_sum == self.orbit_sum_total
    }
}

pub fn is_power_of(x: u64, p: Prime) -> bool {
    let mut x = x;
    if x == 0 {
        return false;
    }
    while x % p.get() as u64 == 0 {
        x /= p.get() as u64;
    }
    x == 1
}

/// Enumerates every `q`-tuple over `[n-1]`, splits the space into orbits and
/// checks that the orbits are disjoint, cover it, and carry the same total
/// of `f` as the tuple-by-tuple sum.
pub fn orbit_partition_check(n: u32, p: Prime, k: u32, limits: &Limits) -> Result<OrbitPartition> {
    let q = leaves(p, k)?;
    limits.check_orbit(n, q as u64)?;
    DescentSubset::empty(n)?;
    let full = full_mask(n);
    let total_tuples = (full + 1).pow(q);

    let mut assigned: HashSet<Vec<u64>> = HashSet::new();
    let mut partition = OrbitPartition {
        n,
        q,
        orbit_count: 0,
        total_tuples,
        size_sum: 0,
        disjoint: true,
        sizes_are_p_powers: true,
        term_sum: Integer::zero(),
        orbit_sum_total: Integer::zero(),
    };
    let mut masks = vec![0u64; q as usize];
    loop {
        let x = SubsetTuple {
            n,
            masks: masks.clone(),
        };
        partition.term_sum += term_f(n, &x.entries())?;
        if !assigned.contains(&masks) {
            let record = orbit_record(&x, p, k)?;
            let members = orbit(&x, p, k)?;
            for y in members {
                if !assigned.insert(y.masks) {
                    partition.disjoint = false;
                }
            }
            partition.orbit_count += 1;
            partition.size_sum += record.size as u64;
            partition.sizes_are_p_powers &= is_power_of(record.size as u64, p);
            partition.orbit_sum_total += record.orbit_sum;
        }
        // odometer, last index fastest
        let mut i = masks.len();
        loop {
            if i == 0 {
                return Ok(partition);
            }
            i -= 1;
            if masks[i] < full {
                masks[i] += 1;
                break;
            }
            masks[i] = 0;
        }
    }
}
