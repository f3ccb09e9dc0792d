//! Power sums `A^r_n = sum_{S subset [n-1]} beta_n(S)^r` and the two tuple
//! expansions in terms of `alpha_n`.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Pow, Zero};

use crate::combinat::{full_mask, DescentSubset};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::statistic::{alpha, Enumerator};
use crate::{Integer, Natural};

/// Anything that can produce exact power sums. The CLI layers a persistent
/// cache on top of [`Engine`] through this trait.
pub trait PowerSumSource: Sync {
    fn power_sum(&self, n: u32, r: u32) -> Result<Natural>;

    /// Several exponents at one `n`; implementations may share the enumeration.
    fn power_sums(&self, n: u32, rs: &[u32]) -> Result<Vec<Natural>> {
        rs.iter().map(|&r| self.power_sum(n, r)).collect()
    }
}

/// Computes power sums by streaming the bulk `beta` enumeration, memoizing
/// every value it has produced.
#[derive(Debug)]
pub struct Engine {
    enumerator: Enumerator,
    memo: RwLock<HashMap<(u32, u32), Natural>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Limits::default(), 1)
    }
}

impl Engine {
    pub fn new(limits: Limits, workers: usize) -> Self {
        Engine {
            enumerator: Enumerator::new(limits, workers),
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn limits(&self) -> &Limits {
        self.enumerator.limits()
    }

    pub fn enumerator(&self) -> &Enumerator {
        &self.enumerator
    }

    /// Uncached evaluation of `A^r_n` for every `r` in `rs`.
    pub fn compute(&self, n: u32, rs: &[u32]) -> Result<Vec<Natural>> {
        if let Some(&r) = rs.iter().find(|&&r| r == 0) {
            return Err(Error::domain(format!("exponent r = {r} must be positive")));
        }
        let width = rs.len();
        self.enumerator.fold(
            n,
            || vec![Natural::zero(); width],
            |acc, _mask, beta| {
                for (slot, &r) in acc.iter_mut().zip(rs) {
                    *slot += Pow::pow(&beta, r);
                }
            },
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
    }
}

impl PowerSumSource for Engine {
    fn power_sum(&self, n: u32, r: u32) -> Result<Natural> {
        Ok(self.power_sums(n, &[r])?.remove(0))
    }

    fn power_sums(&self, n: u32, rs: &[u32]) -> Result<Vec<Natural>> {
        let missing: Vec<u32> = {
            let memo = self.memo.read().expect("memo lock poisoned");
            let mut m: Vec<u32> = rs
                .iter()
                .copied()
                .filter(|r| !memo.contains_key(&(n, *r)))
                .collect();
            m.sort_unstable();
            m.dedup();
            m
        };
        if !missing.is_empty() {
            let values = self.compute(n, &missing)?;
            let mut memo = self.memo.write().expect("memo lock poisoned");
            for (r, v) in missing.into_iter().zip(values) {
                memo.insert((n, r), v);
            }
        }
        let memo = self.memo.read().expect("memo lock poisoned");
        Ok(rs.iter().map(|r| memo[&(n, *r)].clone()).collect())
    }
}

/// `A^r_n` with default limits on a single worker.
pub fn power_sum(n: u32, r: u32) -> Result<Natural> {
    Ok(Engine::default().compute(n, &[r])?.remove(0))
}

/// `alpha_n(T)` for every mask, as signed values for the expansions.
fn alpha_by_mask(n: u32) -> Result<Vec<Integer>> {
    Ok(DescentSubset::all(n)?
        .map(|t| BigInt::from_biguint(Sign::Plus, alpha(&t)))
        .collect())
}

/// Calls `visit` on every `r`-tuple of masks over `[n-1]`, last index fastest.
fn for_each_tuple(n: u32, r: u32, mut visit: impl FnMut(&[u64])) {
    let top = full_mask(n);
    let mut tuple = vec![0u64; r as usize];
    loop {
        visit(&tuple);
        let mut i = tuple.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if tuple[i] < top {
                tuple[i] += 1;
                break;
            }
            tuple[i] = 0;
        }
    }
}

fn signed_alpha_product(alphas: &[Integer], tuple: &[u64]) -> Integer {
    let mut product = Integer::one();
    let mut size = 0u32;
    for &m in tuple {
        product *= &alphas[m as usize];
        size += m.count_ones();
    }
    if size % 2 == 1 {
        -product
    } else {
        product
    }
}

/// Right-hand side of the even-`r` expansion, evaluated term by term:
/// `sum (-1)^{sum |T_i|} 2^{n-1-|U T_i|} prod alpha_n(T_i)` over all `r`-tuples.
pub fn expansion_even_rhs(n: u32, r: u32, limits: &Limits) -> Result<Integer> {
    if r == 0 || r % 2 != 0 {
        return Err(Error::domain(format!("r = {r} must be positive and even")));
    }
    limits.check_expansion(n, r)?;
    let alphas = alpha_by_mask(n)?;
    let mut sum = Integer::zero();
    for_each_tuple(n, r, |tuple| {
        let union = tuple.iter().fold(0u64, |a, &m| a | m);
        let weight = n - 1 - union.count_ones();
        sum += signed_alpha_product(&alphas, tuple) << weight;
    });
    Ok(sum)
}

/// Right-hand side of the odd-`r` expansion: tuples covering `[n-1]`,
/// weighted by `(-1)^{n-1+sum |T_i|} prod alpha_n(T_i)`.
pub fn expansion_odd_rhs(n: u32, r: u32, limits: &Limits) -> Result<Integer> {
    if r % 2 != 1 {
        return Err(Error::domain(format!("r = {r} must be odd")));
    }
    limits.check_expansion(n, r)?;
    let alphas = alpha_by_mask(n)?;
    let full = full_mask(n);
    let mut sum = Integer::zero();
    for_each_tuple(n, r, |tuple| {
        if tuple.iter().fold(0u64, |a, &m| a | m) != full {
            return;
        }
        let term = signed_alpha_product(&alphas, tuple);
        if (n - 1) % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
    });
    Ok(sum)
}

fn check_tuple(n: u32, x: &[DescentSubset]) -> Result<()> {
    if let Some(t) = x.iter().find(|t| t.n() != n) {
        return Err(Error::domain(format!(
            "tuple entry {t} has ambient order {} but n = {n}",
            t.n()
        )));
    }
    Ok(())
}

/// `f(x) = (-1)^{sum |T_i|} prod alpha_n(T_i)`.
pub fn term_f(n: u32, x: &[DescentSubset]) -> Result<Integer> {
    check_tuple(n, x)?;
    let mut product = Integer::one();
    for t in x {
        product *= BigInt::from_biguint(Sign::Plus, alpha(t));
    }
    let size: u32 = x.iter().map(|t| t.len()).sum();
    Ok(if size % 2 == 1 { -product } else { product })
}

/// `g(x) = 2^{n-1-|U T_i|} f(x)`.
pub fn term_g(n: u32, x: &[DescentSubset]) -> Result<Integer> {
    let f = term_f(n, x)?;
    let union = x.iter().fold(0u64, |a, t| a | t.mask());
    Ok(f << (n - 1 - union.count_ones()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::factorial;
    use num_bigint::BigUint;

    fn nat(v: u64) -> Natural {
        BigUint::from(v)
    }

    fn s(n: u32, pos: &[u32]) -> DescentSubset {
        DescentSubset::new(n, pos).unwrap()
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum(3, 2).unwrap(), nat(10));
        assert_eq!(power_sum(4, 2).unwrap(), nat(88));
        assert_eq!(power_sum(3, 3).unwrap(), nat(18));
        for r in 1..=5 {
            assert_eq!(power_sum(1, r).unwrap(), nat(1));
        }
        for n in 1..=12 {
            assert_eq!(power_sum(n, 1).unwrap(), factorial(n as u64));
        }
    }

    #[test]
    fn power_sum_rejects_zero_exponent() {
        assert!(matches!(power_sum(3, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn power_sum_capacity() {
        let engine = Engine::new(Limits::default().with_max_n(5), 1);
        assert!(engine.power_sum(6, 2).unwrap_err().is_capacity());
    }

    #[test]
    fn engine_memo_returns_identical_values() {
        let engine = Engine::default();
        let first = engine.power_sums(7, &[2, 3, 2]).unwrap();
        assert_eq!(first[0], first[2]);
        assert_eq!(engine.power_sum(7, 3).unwrap(), first[1]);
    }

    #[test]
    fn even_expansion_examples() {
        let limits = Limits::default();
        assert_eq!(expansion_even_rhs(2, 2, &limits).unwrap(), 2.into());
        assert_eq!(expansion_even_rhs(3, 2, &limits).unwrap(), 10.into());
        assert_eq!(expansion_even_rhs(1, 2, &limits).unwrap(), 1.into());
        assert!(expansion_even_rhs(3, 3, &limits).is_err());
        assert!(expansion_even_rhs(8, 2, &limits).unwrap_err().is_capacity());
    }

    #[test]
    fn odd_expansion_examples() {
        let limits = Limits::default();
        assert_eq!(expansion_odd_rhs(2, 1, &limits).unwrap(), 2.into());
        assert_eq!(expansion_odd_rhs(3, 3, &limits).unwrap(), 18.into());
        let direct = BigInt::from(power_sum(4, 3).unwrap());
        assert_eq!(expansion_odd_rhs(4, 3, &limits).unwrap(), direct);
        assert!(expansion_odd_rhs(3, 2, &limits).is_err());
    }

    #[test]
    fn term_examples() {
        assert_eq!(term_f(3, &[s(3, &[]), s(3, &[])]).unwrap(), 1.into());
        // alpha_3({1}) = alpha_3({2}) = C(3, 1) = 3
        assert_eq!(term_f(3, &[s(3, &[1])]).unwrap(), (-3).into());
        assert_eq!(term_f(3, &[s(3, &[1]), s(3, &[2])]).unwrap(), 9.into());
        assert_eq!(term_g(3, &[s(3, &[]), s(3, &[])]).unwrap(), 4.into());
        assert_eq!(term_g(3, &[s(3, &[1]), s(3, &[2])]).unwrap(), 9.into());
        assert_eq!(term_g(2, &[s(2, &[]), s(2, &[1])]).unwrap(), (-2).into());
        assert!(term_f(3, &[s(4, &[])]).is_err());
    }

    #[test]
    fn term_g_sums_to_even_power_sum() {
        for n in 1..=3 {
            let mut total = Integer::zero();
            for_each_tuple(n, 2, |t| {
                let x: Vec<_> = t.iter().map(|&m| DescentSubset::from_mask(n, m).unwrap()).collect();
                total += term_g(n, &x).unwrap();
            });
            assert_eq!(total, BigInt::from(power_sum(n, 2).unwrap()));
        }
    }
}
