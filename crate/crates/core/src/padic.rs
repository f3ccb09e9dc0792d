//! Base-`p` digit machinery: valuations, digit sums, depths and carries,
//! together with the Lucas and Kummer theorems for multinomials.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::combinat::{co, multinomial, Composition, DescentSubset, WeakComposition};
use crate::error::{Error, Result};
use crate::Natural;

/// A prime, validated by trial division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub const TWO: Prime = Prime(2);
    pub const THREE: Prime = Prime(3);
    pub const FIVE: Prime = Prime(5);
    pub const SEVEN: Prime = Prime(7);

    pub fn new(p: u32) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::domain(format!("{p} is not prime")))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 != 2
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `e` with `p^e | x`.
pub fn valuation(x: &Natural, p: Prime) -> Result<u64> {
    if x.is_zero() {
        return Err(Error::domain("valuation of 0 is infinite"));
    }
    let p = BigUint::from(p.get());
    let mut e = 0;
    let mut x = x.clone();
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Ok(e);
        }
        x = q;
        e += 1;
    }
}

/// Valuation of `|x|`.
pub fn valuation_signed(x: &BigInt, p: Prime) -> Result<u64> {
    valuation(x.magnitude(), p)
}

/// Base-`p` digits, least significant first, without leading zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitExpansion {
    base: u32,
    digits: Vec<u32>,
}

impl DigitExpansion {
    pub fn new(mut x: u64, p: Prime) -> Self {
        let base = p.get();
        let mut digits = Vec::new();
        while x > 0 {
            digits.push((x % base as u64) as u32);
            x /= base as u64;
        }
        DigitExpansion { base, digits }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit at position `j`, zero beyond the most significant digit.
    pub fn digit(&self, j: usize) -> u32 {
        self.digits.get(j).copied().unwrap_or(0)
    }

    pub fn value(&self) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.base as u64 + d as u64)
    }

    pub fn digit_sum(&self) -> u64 {
        self.digits.iter().map(|&d| d as u64).sum()
    }
}

/// `u_p(n)`: sum of the base-`p` digits.
pub fn digit_sum(n: u64, p: Prime) -> u64 {
    DigitExpansion::new(n, p).digit_sum()
}

/// `d_p(n) = u_p(n) - 1`.
pub fn depth(n: u64, p: Prime) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("depth is defined for n >= 1"));
    }
    Ok(digit_sum(n, p) - 1)
}

pub fn comp_digit_sum(c: &Composition, p: Prime) -> u64 {
    c.parts().iter().map(|&x| digit_sum(x as u64, p)).sum()
}

pub fn comp_depth(c: &Composition, p: Prime) -> u64 {
    c.parts()
        .iter()
        .map(|&x| digit_sum(x as u64, p) - 1)
        .sum()
}

/// Number of carries when all parts are added at once in base `p`.
///
/// Each column total (including the incoming carry) contributes
/// `total / p` carries, which makes
/// `u_p(c) = (p - 1) * carries + u_p(sum c)` an identity.
pub fn carries(c: &Composition, p: Prime) -> u64 {
    carries_of_parts(c.parts().iter().map(|&x| x as u64), p)
}

pub(crate) fn carries_of_parts(parts: impl Iterator<Item = u64>, p: Prime) -> u64 {
    let base = p.get() as u64;
    let mut rest: Vec<u64> = parts.collect();
    let mut carry = 0u64;
    let mut count = 0u64;
    while carry > 0 || rest.iter().any(|&x| x > 0) {
        let mut column = carry;
        for x in rest.iter_mut() {
            column += *x % base;
            *x /= base;
        }
        carry = column / base;
        count += carry;
    }
    count
}

/// `multinomial(n; c) mod p` as the product of digit-level multinomials.
/// A column whose part digits do not sum to the digit of `n` contributes 0.
pub fn lucas_multinomial_mod_p(n: u64, c: &WeakComposition, p: Prime) -> Result<u32> {
    if c.total() != n {
        return Err(Error::domain(format!(
            "parts sum to {} but n = {n}",
            c.total()
        )));
    }
    let base = p.get() as u64;
    let n_digits = DigitExpansion::new(n, p);
    let part_digits: Vec<DigitExpansion> = c
        .parts()
        .iter()
        .map(|&x| DigitExpansion::new(x, p))
        .collect();
    let width = part_digits
        .iter()
        .map(|d| d.digits().len())
        .chain(std::iter::once(n_digits.digits().len()))
        .max()
        .unwrap_or(0);
    let mut residue = 1u64 % base;
    for j in 0..width {
        let column: Vec<u64> = part_digits.iter().map(|d| d.digit(j) as u64).collect();
        let top = n_digits.digit(j) as u64;
        if column.iter().sum::<u64>() != top {
            return Ok(0);
        }
        let factor = multinomial(top, &WeakComposition::new(column))?;
        let factor = (factor % base).to_u64().expect("residue below p");
        residue = residue * factor % base;
    }
    Ok(residue as u32)
}

/// Valuation of `multinomial(n; c)` read off as the carry count.
pub fn kummer_valuation(n: u64, c: &Composition, p: Prime) -> Result<u64> {
    if c.total() as u64 != n {
        return Err(Error::domain(format!(
            "{c} is not a composition of {n}"
        )));
    }
    Ok(carries(c, p))
}

/// `nu_p(n!) = (n - u_p(n)) / (p - 1)`.
pub fn legendre_factorial_valuation(n: u64, p: Prime) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    Ok((n - digit_sum(n, p)) / (p.get() as u64 - 1))
}

/// Carries of `co(S)` from depths: `(d_p(co S) + |S| - d_p(n)) / (p - 1)`.
pub fn carries_via_depth(s: &DescentSubset, p: Prime) -> Result<u64> {
    let c = co(s);
    let numerator =
        comp_depth(&c, p) as i64 + s.len() as i64 - depth(s.n() as u64, p)? as i64;
    let denominator = p.get() as i64 - 1;
    if numerator < 0 || numerator % denominator != 0 {
        return Err(Error::Internal(format!(
            "depth formula gives {numerator}/{denominator} for S = {s}, p = {p}"
        )));
    }
    Ok((numerator / denominator) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::factorial;

    fn comp(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn primes() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        for bad in [0, 1, 4, 9, 91] {
            assert!(matches!(Prime::new(bad), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&10u32.into(), Prime::FIVE).unwrap(), 1);
        assert_eq!(valuation(&1u32.into(), Prime::SEVEN).unwrap(), 0);
        assert_eq!(valuation(&88u32.into(), Prime::TWO).unwrap(), 3);
        assert!(valuation(&0u32.into(), Prime::TWO).is_err());
        assert_eq!(valuation_signed(&BigInt::from(-24), Prime::TWO).unwrap(), 3);
    }

    #[test]
    fn digit_sums_and_depths() {
        assert_eq!(digit_sum(14, Prime::THREE), 4);
        assert_eq!(digit_sum(81, Prime::THREE), 1);
        assert_eq!(digit_sum(6, Prime::TWO), 2);
        assert_eq!(depth(16, Prime::TWO).unwrap(), 0);
        assert_eq!(depth(14, Prime::THREE).unwrap(), 3);
        assert_eq!(depth(6, Prime::THREE).unwrap(), 1);
        assert!(depth(0, Prime::TWO).is_err());
    }

    #[test]
    fn digit_expansion_canonical() {
        let d = DigitExpansion::new(14, Prime::THREE);
        assert_eq!(d.digits(), &[2, 1, 1]);
        assert_eq!(d.value(), 14);
        assert!(DigitExpansion::new(0, Prime::FIVE).digits().is_empty());
    }

    #[test]
    fn composition_sums() {
        let ones = comp(&[1, 1, 1, 1]);
        assert_eq!((comp_digit_sum(&ones, Prime::TWO), comp_depth(&ones, Prime::TWO)), (4, 0));
        let twos = comp(&[2, 2]);
        assert_eq!((comp_digit_sum(&twos, Prime::TWO), comp_depth(&twos, Prime::TWO)), (2, 0));
        let threes = comp(&[3, 3]);
        assert_eq!((comp_digit_sum(&threes, Prime::TWO), comp_depth(&threes, Prime::TWO)), (4, 2));
    }

    #[test]
    fn carry_examples() {
        assert_eq!(carries(&comp(&[1, 1, 1, 1]), Prime::TWO), 3);
        assert_eq!(carries(&comp(&[1, 2]), Prime::THREE), 1);
        assert_eq!(carries(&comp(&[2, 2]), Prime::TWO), 1);
        // 3 + 3 = 20 in base 3: the column 1 + 1 = 2 does not overflow.
        assert_eq!(carries(&comp(&[3, 3]), Prime::THREE), 0);
        // nu_2(7!) = 4
        assert_eq!(carries(&comp(&[1; 7]), Prime::TWO), 4);
    }

    #[test]
    fn lucas_examples() {
        let w = |v: Vec<u64>| WeakComposition::new(v);
        assert_eq!(lucas_multinomial_mod_p(7, &w(vec![3, 4]), Prime::TWO).unwrap(), 1);
        assert_eq!(lucas_multinomial_mod_p(9, &w(vec![9]), Prime::THREE).unwrap(), 1);
        assert_eq!(lucas_multinomial_mod_p(4, &w(vec![2, 2]), Prime::TWO).unwrap(), 0);
        assert_eq!(lucas_multinomial_mod_p(6, &w(vec![0, 6, 0]), Prime::FIVE).unwrap(), 1);
        assert!(lucas_multinomial_mod_p(6, &w(vec![1, 2]), Prime::FIVE).is_err());
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_valuation(4, &comp(&[2, 2]), Prime::TWO).unwrap(), 1);
        assert_eq!(kummer_valuation(9, &comp(&[9]), Prime::THREE).unwrap(), 0);
        assert_eq!(kummer_valuation(4, &comp(&[1, 1, 1, 1]), Prime::TWO).unwrap(), 3);
        assert!(kummer_valuation(5, &comp(&[2, 2]), Prime::TWO).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_factorial_valuation(4, Prime::TWO).unwrap(), 3);
        assert_eq!(legendre_factorial_valuation(7, Prime::SEVEN).unwrap(), 1);
        assert_eq!(legendre_factorial_valuation(14, Prime::THREE).unwrap(), 5);
        assert_eq!(valuation(&factorial(14), Prime::THREE).unwrap(), 5);
    }

    #[test]
    fn legendre_matches_factorial_valuation() {
        for p in [Prime::TWO, Prime::THREE, Prime::FIVE, Prime::SEVEN] {
            for n in 1..=60 {
                assert_eq!(
                    legendre_factorial_valuation(n, p).unwrap(),
                    valuation(&factorial(n), p).unwrap()
                );
            }
        }
    }

    #[test]
    fn carries_via_depth_examples() {
        let s = |n, pos: &[u32]| DescentSubset::new(n, pos).unwrap();
        assert_eq!(carries_via_depth(&s(4, &[1, 2, 3]), Prime::TWO).unwrap(), 3);
        assert_eq!(carries_via_depth(&s(4, &[]), Prime::TWO).unwrap(), 0);
        // co({3}) = (3, 3); C(6, 3) = 20 is prime to 3.
        assert_eq!(carries_via_depth(&s(6, &[3]), Prime::THREE).unwrap(), 0);
        assert_eq!(valuation(&20u32.into(), Prime::THREE).unwrap(), 0);
    }

    #[test]
    fn carries_via_depth_matches_carries_exhaustively() {
        for p in [Prime::TWO, Prime::THREE, Prime::FIVE] {
            for n in 1..=10 {
                for s in DescentSubset::all(n).unwrap() {
                    assert_eq!(carries_via_depth(&s, p).unwrap(), carries(&co(&s), p));
                }
            }
        }
    }
}
