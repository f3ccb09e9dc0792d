//! The descent statistics `alpha_n(S)` and `beta_n(S)`.
//!
//! Ad-hoc queries go through inclusion-exclusion over memoized alphas. Bulk
//! enumeration of every `beta_n(S)` uses the rank dynamic program: after
//! placing `i` values, `state[j]` counts the arrangements whose last value
//! has rank `j` among them; an ascent at position `i` turns the state into
//! prefix sums, a descent into suffix sums. The walk is depth first over the
//! positions so that subsets sharing a prefix share its work.

use std::collections::HashMap;
use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::combinat::{co, descent_mask, full_mask, DescentSubset, WeakComposition};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::{combinat, Natural};

/// Number of permutations of `[n]` whose descent set is contained in `S`.
pub fn alpha(s: &DescentSubset) -> Natural {
    let c = co(s);
    combinat::multinomial(s.n() as u64, &WeakComposition::from(&c))
        .expect("co(S) is a composition of n")
}

/// Number of permutations of `[n]` with descent set exactly `S`, by
/// inclusion-exclusion. Exponential in `|S|`.
pub fn beta(s: &DescentSubset) -> Natural {
    AlphaMemo::new(s.n()).beta(s)
}

/// Memoizes `alpha_n` for repeated inclusion-exclusion queries at fixed `n`.
#[derive(Debug, Clone)]
pub struct AlphaMemo {
    n: u32,
    cache: HashMap<u64, Natural>,
}

impl AlphaMemo {
    pub fn new(n: u32) -> Self {
        AlphaMemo {
            n,
            cache: HashMap::new(),
        }
    }

    pub fn alpha(&mut self, s: &DescentSubset) -> Natural {
        assert_eq!(s.n(), self.n, "memo built for a different n");
        self.cache
            .entry(s.mask())
            .or_insert_with(|| alpha(s))
            .clone()
    }

    /// `sum_{T subset S} (-1)^{|S - T|} alpha_n(T)`.
    pub fn beta(&mut self, s: &DescentSubset) -> Natural {
        let size = s.len();
        let mut acc = BigInt::zero();
        for t in s.subsets() {
            let a = BigInt::from(self.alpha(&t));
            if (size - t.len()) % 2 == 0 {
                acc += a;
            } else {
                acc -= a;
            }
        }
        acc.to_biguint()
            .expect("inclusion-exclusion of a count is nonnegative")
    }
}

/// `beta_n(S)` for every `S` of `[n-1]`, indexed by mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaTable {
    n: u32,
    values: Vec<Natural>,
}

impl BetaTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&self, s: &DescentSubset) -> Option<&Natural> {
        if s.n() != self.n {
            return None;
        }
        self.values.get(s.mask() as usize)
    }

    pub fn by_mask(&self, mask: u64) -> &Natural {
        &self.values[mask as usize]
    }

    /// Values in ascending mask order.
    pub fn values(&self) -> &[Natural] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (DescentSubset, &Natural)> {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .map(move |(m, v)| (DescentSubset::from_mask_unchecked(n, m as u64), v))
    }

    pub fn total(&self) -> Natural {
        self.values.iter().sum()
    }
}

/// Counts every permutation of `[n]` by descent set. Independent of the
/// dynamic program; `n!` work.
pub fn oracle_beta_by_enumeration(n: u32, limits: &Limits) -> Result<BetaTable> {
    limits.check_oracle_n(n)?;
    DescentSubset::empty(n)?;
    let mut counts = vec![0u64; 1usize << (n - 1)];
    let mut perm: Vec<u32> = (1..=n).collect();
    loop {
        counts[descent_mask(&perm).mask() as usize] += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(BetaTable {
        n,
        values: counts.into_iter().map(BigUint::from).collect(),
    })
}

/// Lexicographic successor in place; `false` once the last permutation is reached.
fn next_permutation(perm: &mut [u32]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm.iter().rposition(|&v| v > perm[i]).unwrap();
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Largest `n` for which every count in the dynamic program fits in `u128`
/// (all intermediate values are bounded by `n!`).
const U128_MAX_N: u32 = 33;

/// Depth at which the walk is cut into independent tasks.
const SPLIT_DEPTH: u32 = 8;

trait Count: Clone + Send + Sync + Zero + One + for<'a> AddAssign<&'a Self> {
    fn into_natural(self) -> Natural;
}

impl Count for u128 {
    fn into_natural(self) -> Natural {
        BigUint::from(self)
    }
}

impl Count for BigUint {
    fn into_natural(self) -> Natural {
        self
    }
}

/// Applies the step for position `i = old.len()`: ascent when `descent` is
/// false, descent otherwise. `new` is resized to `old.len() + 1`.
fn step<T: Count>(old: &[T], descent: bool, new: &mut Vec<T>) {
    let len = old.len();
    new.clear();
    new.resize(len + 1, T::zero());
    let mut running = T::zero();
    if descent {
        for j in (0..len).rev() {
            running += &old[j];
            new[j] = running.clone();
        }
    } else {
        for j in 0..len {
            running += &old[j];
            new[j + 1] = running.clone();
        }
    }
}

fn total<T: Count>(state: &[T]) -> T {
    let mut acc = T::zero();
    for v in state {
        acc += v;
    }
    acc
}

/// Visits `(mask, beta)` for every mask extending `levels[depth]`.
/// `levels[d]` holds the state after `d + 1` values have been placed.
fn descend<T: Count, F: FnMut(u64, T)>(
    n: usize,
    depth: usize,
    mask: u64,
    levels: &mut [Vec<T>],
    visit: &mut F,
) {
    if depth + 1 == n {
        visit(mask, total(&levels[depth]));
        return;
    }
    for bit in [false, true] {
        let (head, tail) = levels.split_at_mut(depth + 1);
        step(&head[depth], bit, &mut tail[0]);
        let next = if bit { mask | 1 << depth } else { mask };
        descend(n, depth + 1, next, levels, visit);
    }
}

/// Walks every mask whose low `prefix_len` bits equal `prefix`.
fn walk_prefix<T: Count, F: FnMut(u64, T)>(n: u32, prefix: u64, prefix_len: u32, visit: &mut F) {
    let n = n as usize;
    let mut levels: Vec<Vec<T>> = (0..n).map(|d| Vec::with_capacity(d + 1)).collect();
    levels[0].push(T::one());
    for d in 0..prefix_len as usize {
        let (head, tail) = levels.split_at_mut(d + 1);
        step(&head[d], prefix >> d & 1 == 1, &mut tail[0]);
    }
    descend(n, prefix_len as usize, prefix, &mut levels, visit);
}

/// Bulk enumeration of `beta_n` over all subsets, optionally split across a
/// fixed number of workers. Results never depend on the worker count.
#[derive(Debug, Clone, Copy)]
pub struct Enumerator {
    limits: Limits,
    workers: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator::new(Limits::default(), 1)
    }
}

impl Enumerator {
    pub fn new(limits: Limits, workers: usize) -> Self {
        Enumerator {
            limits,
            workers: workers.max(1),
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Folds over `(mask, beta_n(mask))` for every subset of `[n-1]`.
    ///
    /// The mask range is cut into `2^t` prefix classes; each class is folded
    /// from `identity()` and the partial results are combined with `reduce`
    /// in ascending prefix order.
    pub fn fold<A, I, F, R>(&self, n: u32, identity: I, fold: F, reduce: R) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, u64, Natural) + Sync + Send,
        R: Fn(A, A) -> A + Sync + Send,
    {
        self.limits.check_n(n)?;
        DescentSubset::empty(n)?;
        let split = SPLIT_DEPTH.min(n - 1);
        let run = |prefix: u64| -> A {
            let mut acc = identity();
            if n <= U128_MAX_N {
                walk_prefix::<u128, _>(n, prefix, split, &mut |m, v| {
                    fold(&mut acc, m, v.into_natural())
                });
            } else {
                walk_prefix::<BigUint, _>(n, prefix, split, &mut |m, v| fold(&mut acc, m, v));
            }
            acc
        };
        let prefixes: Vec<u64> = (0..1u64 << split).collect();
        let partials: Vec<A> = if self.workers == 1 {
            prefixes.into_iter().map(run).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.workers)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            pool.install(|| prefixes.into_par_iter().map(run).collect())
        };
        Ok(partials
            .into_iter()
            .reduce(reduce)
            .unwrap_or_else(identity))
    }

    /// Every `beta_n(S)`, indexed by mask.
    pub fn beta_all(&self, n: u32) -> Result<BetaTable> {
        let pairs = self.fold(
            n,
            Vec::new,
            |acc: &mut Vec<(u64, Natural)>, m, v| acc.push((m, v)),
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        )?;
        let mut values = vec![Natural::zero(); (full_mask(n) + 1) as usize];
        for (m, v) in pairs {
            values[m as usize] = v;
        }
        Ok(BetaTable { n, values })
    }
}

/// [`Enumerator::beta_all`] with default limits on one worker.
pub fn beta_all(n: u32) -> Result<BetaTable> {
    Enumerator::default().beta_all(n)
}
