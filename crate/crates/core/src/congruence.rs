//! Congruences between power sums: the Euler shift in the exponent, the
//! linear recursion, and the transfer between orders that share the same
//! nonzero base-`p` digits (through the digit map and the non-carry power set).
//!
//! Every check computes exact power sums first and only then reduces.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_traits::{One, Pow, Zero};

use crate::combinat::{co, DescentSubset};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::padic::{carries, valuation, DigitExpansion, Prime};
use crate::powersum::PowerSumSource;
use crate::{combinat, Natural};

/// Outcome of a congruence `lhs = rhs (mod modulus)` with both residues kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceCheck {
    pub holds: bool,
    pub modulus: Natural,
    pub lhs: Natural,
    pub rhs: Natural,
}

impl CongruenceCheck {
    fn new(modulus: Natural, lhs: Natural, rhs: Natural) -> Self {
        CongruenceCheck {
            holds: lhs == rhs,
            modulus,
            lhs,
            rhs,
        }
    }
}

/// Multisets of nonzero base-`p` digits of `m` and `n` coincide.
pub fn same_nonzero_digits(m: u64, n: u64, p: Prime) -> bool {
    nonzero_digit_counts(m, p) == nonzero_digit_counts(n, p)
}

fn nonzero_digit_counts(x: u64, p: Prime) -> Vec<usize> {
    let mut counts = vec![0; p.get() as usize];
    for &d in DigitExpansion::new(x, p).digits() {
        counts[d as usize] += 1;
    }
    counts[0] = 0;
    counts
}

/// A permutation of base-`p` digit positions carrying `source` to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitMap {
    source: u64,
    target: u64,
    p: Prime,
    /// `positions[j]` is the image of position `j`; positions past the end
    /// are fixed.
    positions: Vec<usize>,
}

impl DigitMap {
    pub fn source(&self) -> u64 {
        self.source
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn position(&self, j: usize) -> usize {
        self.positions.get(j).copied().unwrap_or(j)
    }

    pub fn is_identity(&self) -> bool {
        self.positions.iter().enumerate().all(|(j, &k)| j == k)
    }

    /// `f(sum a_j p^j) = sum a_j p^{pi(j)}`.
    pub fn apply(&self, x: u64) -> Result<u64> {
        let base = self.p.get() as u64;
        let mut out = 0u64;
        for (j, &d) in DigitExpansion::new(x, self.p).digits().iter().enumerate() {
            if d == 0 {
                continue;
            }
            let term = base
                .checked_pow(self.position(j) as u32)
                .and_then(|w| w.checked_mul(d as u64))
                .and_then(|t| t.checked_add(out));
            out = term.ok_or_else(|| Error::domain(format!("f({x}) overflows u64")))?;
        }
        Ok(out)
    }
}

/// Canonical digit map: equal nonzero digits are matched in ascending
/// position order, then the zero positions below the common width likewise.
pub fn build_digit_map(m: u64, n: u64, p: Prime) -> Result<DigitMap> {
    if m == 0 || n == 0 {
        return Err(Error::domain("digit maps are defined for positive integers"));
    }
    if !same_nonzero_digits(m, n, p) {
        return Err(Error::domain(format!(
            "{m} and {n} do not share their nonzero base-{p} digits"
        )));
    }
    let dm = DigitExpansion::new(m, p);
    let dn = DigitExpansion::new(n, p);
    let width = dm.digits().len().max(dn.digits().len());
    let mut positions = vec![usize::MAX; width];
    for value in 0..p.get() {
        let from = (0..width).filter(|&j| dm.digit(j) == value);
        let to: Vec<usize> = (0..width).filter(|&j| dn.digit(j) == value).collect();
        for (j, k) in from.zip(to) {
            positions[j] = k;
        }
    }
    debug_assert!(positions.iter().all(|&k| k != usize::MAX));
    let map = DigitMap {
        source: m,
        target: n,
        p,
        positions,
    };
    if map.apply(m)? != n {
        return Err(Error::Internal(format!("digit map sends {m} to {}", map.apply(m)?)));
    }
    Ok(map)
}

/// Subsets of `[m-1]` whose composition adds up without base-`p` carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcpFamily {
    m: u32,
    p: Prime,
    members: Vec<DescentSubset>,
}

impl NcpFamily {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Members in ascending mask order.
    pub fn members(&self) -> &[DescentSubset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &DescentSubset) -> bool {
        t.n() == self.m && self.members.binary_search(t).is_ok()
    }

    /// Every subset of a member is a member.
    pub fn is_closed_under_inclusion(&self) -> bool {
        self.members
            .iter()
            .all(|t| t.subsets().all(|u| self.contains(&u)))
    }
}

pub fn is_carry_free(t: &DescentSubset, p: Prime) -> bool {
    carries(&co(t), p) == 0
}

pub fn ncp_family(m: u32, p: Prime, limits: &Limits) -> Result<NcpFamily> {
    limits.check_n(m)?;
    let members = DescentSubset::all(m)?
        .filter(|t| is_carry_free(t, p))
        .collect();
    Ok(NcpFamily { m, p, members })
}

/// `f(T) = {f(t) : t in T}` for a carry-free `T` of `[m-1]`.
pub fn ncp_map(map: &DigitMap, t: &DescentSubset) -> Result<DescentSubset> {
    if t.n() as u64 != map.source {
        return Err(Error::domain(format!(
            "{t} is a subset for n = {}, map source is {}",
            t.n(),
            map.source
        )));
    }
    if !is_carry_free(t, map.p) {
        return Err(Error::domain(format!(
            "{t} is not in the non-carry power set of {} in base {}",
            map.source, map.p
        )));
    }
    let target = u32::try_from(map.target)
        .map_err(|_| Error::domain(format!("target {} too large", map.target)))?;
    let mut image = t
        .positions()
        .map(|s| map.apply(s as u64).map(|v| v as u32))
        .collect::<Result<Vec<u32>>>()?;
    image.sort_unstable();
    DescentSubset::new(target, &image)
}

fn check_positive(what: &str, v: u32) -> Result<()> {
    if v == 0 {
        return Err(Error::domain(format!("{what} must be positive")));
    }
    Ok(())
}

/// `A^r_n = A^s_n (mod p^k)` whenever `r, s >= k` and
/// `r = s (mod p^{k-1} (p - 1))`.
pub fn euler_shift_check<S: PowerSumSource + ?Sized>(
    source: &S,
    n: u32,
    r: u32,
    s: u32,
    k: u32,
    p: Prime,
) -> Result<CongruenceCheck> {
    check_positive("k", k)?;
    let period = (p.get() as u64).pow(k - 1) * (p.get() as u64 - 1);
    if r < k || s < k {
        return Err(Error::domain(format!("need r, s >= k, got r = {r}, s = {s}, k = {k}")));
    }
    if (r as i64 - s as i64).rem_euclid(period as i64) != 0 {
        return Err(Error::domain(format!("r = {r} and s = {s} differ mod {period}")));
    }
    let modulus = BigUint::from(p.get()).pow(k);
    shift_congruence(source, n, r, s, modulus)
}

/// `A^r_n = A^s_n (mod 2^k)` for `r, s >= k >= 3` and `r = s (mod 2^{k-2})`.
pub fn euler_shift_check_2<S: PowerSumSource + ?Sized>(
    source: &S,
    n: u32,
    r: u32,
    s: u32,
    k: u32,
) -> Result<CongruenceCheck> {
    if k < 3 {
        return Err(Error::domain(format!("need k >= 3, got {k}")));
    }
    if r < k || s < k {
        return Err(Error::domain(format!("need r, s >= k, got r = {r}, s = {s}, k = {k}")));
    }
    let period = 1i64 << (k - 2);
    if (r as i64 - s as i64).rem_euclid(period) != 0 {
        return Err(Error::domain(format!("r = {r} and s = {s} differ mod {period}")));
    }
    shift_congruence(source, n, r, s, BigUint::one() << k)
}

fn shift_congruence<S: PowerSumSource + ?Sized>(
    source: &S,
    n: u32,
    r: u32,
    s: u32,
    modulus: Natural,
) -> Result<CongruenceCheck> {
    let values = source.power_sums(n, &[r, s])?;
    Ok(CongruenceCheck::new(
        modulus.clone(),
        &values[0] % &modulus,
        &values[1] % &modulus,
    ))
}

/// `sum_{j=0}^{k} (-1)^j C(k, j) A^{r - j(p-1)}_n = 0 (mod p^k)` for `r >= k p`.
pub fn power_recursion_check<S: PowerSumSource + ?Sized>(
    source: &S,
    n: u32,
    r: u32,
    k: u32,
    p: Prime,
) -> Result<CongruenceCheck> {
    check_positive("k", k)?;
    if (r as u64) < k as u64 * p.get() as u64 {
        return Err(Error::domain(format!("need r >= k p, got r = {r}, k = {k}, p = {p}")));
    }
    let exponents: Vec<u32> = (0..=k).map(|j| r - j * (p.get() - 1)).collect();
    let values = source.power_sums(n, &exponents)?;
    let mut combination = BigInt::zero();
    for (j, value) in values.into_iter().enumerate() {
        let term = BigInt::from(combinat::binomial(k as u64, j as u64) * value);
        if j % 2 == 0 {
            combination += term;
        } else {
            combination -= term;
        }
    }
    let modulus = BigUint::from(p.get()).pow(k);
    let residue = combination
        .mod_floor(&BigInt::from(modulus.clone()))
        .to_biguint()
        .expect("floor residue is nonnegative");
    Ok(CongruenceCheck::new(modulus, residue, BigUint::zero()))
}

/// `A^r_m = 2^{m-n} A^r_n (mod p)` for odd `p`, even `r`, and `m`, `n` with
/// the same nonzero base-`p` digits.
pub fn transfer_check<S: PowerSumSource + ?Sized>(
    source: &S,
    m: u32,
    n: u32,
    r: u32,
    p: Prime,
) -> Result<CongruenceCheck> {
    check_even_r_odd_p(r, p)?;
    if !same_nonzero_digits(m as u64, n as u64, p) {
        return Err(Error::domain(format!(
            "{m} and {n} do not share their nonzero base-{p} digits"
        )));
    }
    let a_m = source.power_sum(m, r)?;
    let a_n = source.power_sum(n, r)?;
    let modulus = BigUint::from(p.get());
    let two_shift = power_of_two_mod(m as i64 - n as i64, p);
    let rhs = (two_shift * a_n) % &modulus;
    Ok(CongruenceCheck::new(modulus.clone(), a_m % &modulus, rhs))
}

/// `2^e mod p` for a possibly negative `e`, using `2^{-1} = 2^{p-2}`.
fn power_of_two_mod(e: i64, p: Prime) -> Natural {
    let modulus = BigUint::from(p.get());
    let two = BigUint::from(2u32);
    if e >= 0 {
        two.modpow(&BigUint::from(e as u64), &modulus)
    } else {
        let inverse = two.modpow(&BigUint::from(p.get() - 2), &modulus);
        inverse.modpow(&BigUint::from(e.unsigned_abs()), &modulus)
    }
}

fn check_even_r_odd_p(r: u32, p: Prime) -> Result<()> {
    if r == 0 || r % 2 != 0 {
        return Err(Error::domain(format!("r = {r} must be positive and even")));
    }
    if !p.is_odd() {
        return Err(Error::domain("p must be an odd prime"));
    }
    Ok(())
}

/// `A^r_{pn} = A^r_n (mod p)` for odd `p` and even `r`.
pub fn scale_by_p_check<S: PowerSumSource + ?Sized>(
    source: &S,
    n: u32,
    r: u32,
    p: Prime,
) -> Result<CongruenceCheck> {
    check_even_r_odd_p(r, p)?;
    check_positive("n", n)?;
    let scaled = n
        .checked_mul(p.get())
        .ok_or_else(|| Error::domain("p n overflows"))?;
    let modulus = BigUint::from(p.get());
    let lhs = source.power_sum(scaled, r)? % &modulus;
    let rhs = source.power_sum(n, r)? % &modulus;
    Ok(CongruenceCheck::new(modulus, lhs, rhs))
}

/// Outcome of `p` not dividing `A^r_{p^k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonDivisibilityCheck {
    pub holds: bool,
    pub n: u32,
    pub valuation: u64,
}

pub fn prime_power_nondiv_check<S: PowerSumSource + ?Sized>(
    source: &S,
    k: u32,
    r: u32,
    p: Prime,
) -> Result<NonDivisibilityCheck> {
    check_even_r_odd_p(r, p)?;
    let n = p
        .get()
        .checked_pow(k)
        .ok_or_else(|| Error::domain("p^k overflows"))?;
    let v = valuation(&source.power_sum(n, r)?, p)?;
    Ok(NonDivisibilityCheck {
        holds: v == 0,
        n,
        valuation: v,
    })
}
