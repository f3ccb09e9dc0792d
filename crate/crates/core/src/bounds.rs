//! Lower bounds on `nu_p(A^r_n)` and their verification against exact values.
//!
//! Each bound is a rational expression in `n`, `r`, `p` and the digit sums.
//! Valuations are integers, so the effective bound is the ceiling of the raw
//! value clamped at zero. Applicability follows each statement's hypotheses
//! exactly.

use std::fmt;

use crate::error::{Error, Result};
use crate::padic::{depth, digit_sum, valuation, Prime};
use crate::powersum::PowerSumSource;

/// Which lower bound a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundName {
    /// `2^{n-1}` is the exact power of 2 when `n` is a power of 2.
    ExactTwoPower,
    /// `r - u_2(r) + n - 1 - r d_2(n)` for `d_2(n) > 0`.
    GroupTwo,
    /// `ceil((r - u_p(r) + n - 1 - r d_p(n)) / (p - 1))`, odd `r`, odd `p`, `d_p(n) > 0`.
    GroupOdd,
    /// `(n - 1 - p^k d_p(n)) / (p - 1) + k` for `r = p^k`, odd `p`, `n >= 2`.
    CyclicShift,
    /// `(n - 1 - r d_p(n)) / (p - 1)` for odd `r`.
    OddR,
    /// `n - 1 - r d_2(n)`.
    TwoAllR,
    /// `n - r d_2(n)` when `n` is not a power of 2 and `r >= 2`.
    NotTwoPower,
    /// `2^k - 1` for `r = 2` and `2^k <= n < 2^{k+1}`.
    SquareWindow,
}

impl BoundName {
    /// Every bound, in tie-breaking order for [`best_bound`].
    pub const ALL: [BoundName; 8] = [
        BoundName::ExactTwoPower,
        BoundName::GroupTwo,
        BoundName::GroupOdd,
        BoundName::CyclicShift,
        BoundName::OddR,
        BoundName::TwoAllR,
        BoundName::NotTwoPower,
        BoundName::SquareWindow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::ExactTwoPower => "exact_two_power",
            BoundName::GroupTwo => "group_two",
            BoundName::GroupOdd => "group_odd",
            BoundName::CyclicShift => "cyclic_shift",
            BoundName::OddR => "odd_r",
            BoundName::TwoAllR => "two_all_r",
            BoundName::NotTwoPower => "not_two_power",
            BoundName::SquareWindow => "square_window",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A raw bound `numerator / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawBound {
    pub numerator: i64,
    pub denominator: i64,
}

impl RawBound {
    fn integer(v: i64) -> Self {
        RawBound {
            numerator: v,
            denominator: 1,
        }
    }

    fn over(numerator: i64, denominator: i64) -> Self {
        RawBound {
            numerator,
            denominator,
        }
    }

    /// `max(0, ceil(numerator / denominator))`.
    pub fn effective(self) -> u64 {
        num_integer::Integer::div_ceil(&self.numerator, &self.denominator).max(0) as u64
    }
}

impl fmt::Display for RawBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator == 1 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

/// One bound evaluated at `(n, r, p)`, optionally compared with the true valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub n: u32,
    pub r: u32,
    pub p: Prime,
    /// `None` when no bound applies.
    pub bound: Option<BoundName>,
    pub raw: Option<RawBound>,
    pub value: u64,
    pub applicable: bool,
    pub actual_valuation: Option<u64>,
    pub holds: Option<bool>,
}

impl BoundReport {
    fn with_actual(mut self, actual: u64) -> Self {
        self.actual_valuation = Some(actual);
        if self.applicable {
            self.holds = Some(actual >= self.value);
        }
        self
    }
}

fn is_power_of(mut x: u64, base: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut k = 0;
    while x % base == 0 {
        x /= base;
        k += 1;
    }
    (x == 1).then_some(k)
}

fn check_positive(n: u32, r: u32) -> Result<()> {
    if n == 0 || r == 0 {
        return Err(Error::domain(format!("n = {n} and r = {r} must be positive")));
    }
    Ok(())
}

fn d(n: u32, p: Prime) -> i64 {
    depth(n as u64, p).expect("n >= 1") as i64
}

/// Raw value of `name` at `(n, r, p)`, or `NotApplicable` when the bound's
/// hypotheses fail.
pub fn raw_bound(name: BoundName, n: u32, r: u32, p: Prime) -> Result<RawBound> {
    check_positive(n, r)?;
    let (ni, ri, pi) = (n as i64, r as i64, p.get() as i64);
    let odd_r = r % 2 == 1;
    let na = |why: &str| Err(Error::not_applicable(format!("{name} at n={n}, r={r}, p={p}: {why}")));
    match name {
        BoundName::OddR => {
            if !odd_r {
                return na("r is even");
            }
            Ok(RawBound::over(ni - 1 - ri * d(n, p), pi - 1))
        }
        BoundName::TwoAllR => {
            if p != Prime::TWO {
                return na("p is not 2");
            }
            Ok(RawBound::integer(ni - 1 - ri * d(n, p)))
        }
        BoundName::CyclicShift => {
            if !p.is_odd() {
                return na("p is not odd");
            }
            if n < 2 {
                return na("n < 2");
            }
            let Some(k) = is_power_of(r as u64, p.get() as u64) else {
                return na("r is not a power of p");
            };
            Ok(RawBound::over(
                ni - 1 - ri * d(n, p) + k as i64 * (pi - 1),
                pi - 1,
            ))
        }
        BoundName::GroupOdd => {
            if !odd_r {
                return na("r is even");
            }
            if !p.is_odd() {
                return na("p is not odd");
            }
            if d(n, p) == 0 {
                return na("d_p(n) = 0");
            }
            let u_r = digit_sum(r as u64, p) as i64;
            Ok(RawBound::over(ri - u_r + ni - 1 - ri * d(n, p), pi - 1))
        }
        BoundName::GroupTwo => {
            if p != Prime::TWO {
                return na("p is not 2");
            }
            if d(n, p) == 0 {
                return na("d_2(n) = 0");
            }
            let u_r = digit_sum(r as u64, p) as i64;
            Ok(RawBound::integer(ri - u_r + ni - 1 - ri * d(n, p)))
        }
        BoundName::NotTwoPower => {
            if p != Prime::TWO {
                return na("p is not 2");
            }
            if n.is_power_of_two() {
                return na("n is a power of 2");
            }
            if r < 2 {
                return na("r < 2");
            }
            Ok(RawBound::integer(ni - ri * d(n, p)))
        }
        BoundName::SquareWindow => {
            if p != Prime::TWO {
                return na("p is not 2");
            }
            if r != 2 {
                return na("r is not 2");
            }
            let k = n.ilog2();
            Ok(RawBound::integer((1i64 << k) - 1))
        }
        BoundName::ExactTwoPower => {
            if p != Prime::TWO {
                return na("p is not 2");
            }
            if !n.is_power_of_two() {
                return na("n is not a power of 2");
            }
            Ok(RawBound::integer(ni - 1))
        }
    }
}

fn effective(name: BoundName, n: u32, r: u32, p: Prime) -> Result<u64> {
    raw_bound(name, n, r, p).map(RawBound::effective)
}

pub fn bound_odd_r(n: u32, r: u32, p: Prime) -> Result<u64> {
    effective(BoundName::OddR, n, r, p)
}

pub fn bound_two_all_r(n: u32, r: u32) -> Result<u64> {
    effective(BoundName::TwoAllR, n, r, Prime::TWO)
}

/// Bound for `r = p^k`.
pub fn bound_cyclic_shift(n: u32, p: Prime, k: u32) -> Result<u64> {
    let r = p
        .get()
        .checked_pow(k)
        .ok_or_else(|| Error::domain("p^k overflows"))?;
    effective(BoundName::CyclicShift, n, r, p)
}

pub fn bound_group_odd(n: u32, r: u32, p: Prime) -> Result<u64> {
    effective(BoundName::GroupOdd, n, r, p)
}

pub fn bound_group_two(n: u32, r: u32) -> Result<u64> {
    effective(BoundName::GroupTwo, n, r, Prime::TWO)
}

pub fn bound_not_two_power(n: u32, r: u32) -> Result<u64> {
    effective(BoundName::NotTwoPower, n, r, Prime::TWO)
}

/// Bound on `nu_2(A^2_n)`.
pub fn bound_square_window(n: u32) -> Result<u64> {
    effective(BoundName::SquareWindow, n, 2, Prime::TWO)
}

pub fn exact_two_power(n: u32, r: u32) -> Result<u64> {
    effective(BoundName::ExactTwoPower, n, r, Prime::TWO)
}

/// Evaluates one bound; inapplicable bounds yield a report with
/// `applicable = false` and value 0.
pub fn evaluate(name: BoundName, n: u32, r: u32, p: Prime) -> Result<BoundReport> {
    let (raw, applicable) = match raw_bound(name, n, r, p) {
        Ok(raw) => (Some(raw), true),
        Err(Error::NotApplicable(_)) => (None, false),
        Err(e) => return Err(e),
    };
    Ok(BoundReport {
        n,
        r,
        p,
        bound: Some(name),
        raw,
        value: raw.map_or(0, RawBound::effective),
        applicable,
        actual_valuation: None,
        holds: None,
    })
}

/// Every bound at `(n, r, p)`, in [`BoundName::ALL`] order.
pub fn evaluate_all(n: u32, r: u32, p: Prime) -> Result<Vec<BoundReport>> {
    BoundName::ALL
        .iter()
        .map(|&name| evaluate(name, n, r, p))
        .collect()
}

/// The strongest applicable bound; earlier names in [`BoundName::ALL`] win ties.
pub fn best_bound(n: u32, r: u32, p: Prime) -> Result<BoundReport> {
    let mut best: Option<BoundReport> = None;
    for report in evaluate_all(n, r, p)? {
        if !report.applicable {
            continue;
        }
        if best.as_ref().is_none_or(|b| report.value > b.value) {
            best = Some(report);
        }
    }
    Ok(best.unwrap_or(BoundReport {
        n,
        r,
        p,
        bound: None,
        raw: None,
        value: 0,
        applicable: false,
        actual_valuation: None,
        holds: None,
    }))
}

/// All bounds at `(n, r, p)` compared with `nu_p(A^r_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundVerification {
    pub n: u32,
    pub r: u32,
    pub p: Prime,
    pub actual_valuation: u64,
    pub reports: Vec<BoundReport>,
    pub best: BoundReport,
}

impl BoundVerification {
    /// Every applicable bound is at most the true valuation.
    pub fn holds(&self) -> bool {
        self.reports.iter().all(|r| r.holds != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundReport> {
        self.reports.iter().filter(|r| r.holds == Some(false))
    }
}

pub fn verify_bounds<S: PowerSumSource + ?Sized>(
    source: &S,
    n: u32,
    r: u32,
    p: Prime,
) -> Result<BoundVerification> {
    let reports = evaluate_all(n, r, p)?;
    let best = best_bound(n, r, p)?;
    let actual = valuation(&source.power_sum(n, r)?, p)?;
    Ok(BoundVerification {
        n,
        r,
        p,
        actual_valuation: actual,
        reports: reports.into_iter().map(|b| b.with_actual(actual)).collect(),
        best: best.with_actual(actual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powersum::Engine;

    fn not_applicable<T: std::fmt::Debug>(r: Result<T>) -> bool {
        matches!(r, Err(Error::NotApplicable(_)))
    }

    #[test]
    fn odd_r_examples() {
        assert_eq!(bound_odd_r(4, 1, Prime::TWO).unwrap(), 3);
        assert_eq!(bound_odd_r(1, 5, Prime::SEVEN).unwrap(), 0);
        assert_eq!(bound_odd_r(6, 3, Prime::THREE).unwrap(), 1);
        assert!(not_applicable(bound_odd_r(6, 2, Prime::THREE)));
    }

    #[test]
    fn two_all_r_examples() {
        for k in 0..5 {
            assert_eq!(bound_two_all_r(1 << k, 3).unwrap(), (1 << k) - 1);
        }
        assert_eq!(bound_two_all_r(3, 2).unwrap(), 0);
        assert_eq!(bound_two_all_r(6, 2).unwrap(), 3);
        assert_eq!(bound_two_all_r(7, 4).unwrap(), 0);
    }

    #[test]
    fn cyclic_shift_examples() {
        assert_eq!(bound_cyclic_shift(6, Prime::THREE, 1).unwrap(), 2);
        assert_eq!(bound_cyclic_shift(9, Prime::THREE, 2).unwrap(), 4 + 2);
        assert_eq!(bound_cyclic_shift(4, Prime::THREE, 1).unwrap(), 1);
        assert!(not_applicable(bound_cyclic_shift(4, Prime::TWO, 1)));
        assert!(not_applicable(bound_cyclic_shift(1, Prime::THREE, 1)));
        assert!(not_applicable(raw_bound(BoundName::CyclicShift, 6, 5, Prime::THREE)));
    }

    #[test]
    fn group_odd_examples() {
        assert_eq!(bound_group_odd(6, 3, Prime::THREE).unwrap(), 2);
        assert_eq!(bound_group_odd(4, 1, Prime::THREE).unwrap(), 1);
        assert_eq!(bound_group_odd(2, 1, Prime::THREE).unwrap(), 0);
        assert!(not_applicable(bound_group_odd(3, 1, Prime::THREE)));
        assert!(not_applicable(bound_group_odd(6, 2, Prime::THREE)));
    }

    #[test]
    fn group_two_examples() {
        assert_eq!(bound_group_two(3, 2).unwrap(), 1);
        for n in [3u32, 5, 6, 7, 11] {
            let d = depth(n as u64, Prime::TWO).unwrap() as u32;
            assert_eq!(bound_group_two(n, 1).unwrap(), (n - 1 - d) as u64);
        }
        assert_eq!(bound_group_two(6, 4).unwrap(), 4);
        assert!(not_applicable(bound_group_two(8, 4)));
    }

    #[test]
    fn not_two_power_examples() {
        assert_eq!(bound_not_two_power(6, 2).unwrap(), 4);
        assert_eq!(bound_not_two_power(3, 2).unwrap(), 1);
        // 12 = 1100 in base 2, d_2 = 1
        assert_eq!(bound_not_two_power(12, 3).unwrap(), 9);
        assert!(not_applicable(bound_not_two_power(8, 2)));
        assert!(not_applicable(bound_not_two_power(6, 1)));
    }

    #[test]
    fn square_window_examples() {
        assert_eq!(bound_square_window(8).unwrap(), 7);
        assert_eq!(bound_square_window(1).unwrap(), 0);
        assert_eq!(bound_square_window(13).unwrap(), 7);
        assert_eq!(bound_square_window(15).unwrap(), 7);
        assert_eq!(bound_square_window(16).unwrap(), 15);
    }

    #[test]
    fn exact_two_power_examples() {
        assert_eq!(exact_two_power(4, 2).unwrap(), 3);
        assert_eq!(exact_two_power(1, 5).unwrap(), 0);
        assert_eq!(exact_two_power(8, 3).unwrap(), 7);
        assert!(not_applicable(exact_two_power(6, 2)));
    }

    #[test]
    fn best_bound_examples() {
        let b = best_bound(4, 2, Prime::TWO).unwrap();
        assert_eq!((b.bound, b.value), (Some(BoundName::ExactTwoPower), 3));
        let b = best_bound(3, 2, Prime::TWO).unwrap();
        assert_eq!((b.bound, b.value), (Some(BoundName::GroupTwo), 1));
        let b = best_bound(5, 2, Prime::THREE).unwrap();
        assert_eq!((b.bound, b.value, b.applicable), (None, 0, false));
    }

    #[test]
    fn verify_examples() {
        let engine = Engine::default();
        let v = verify_bounds(&engine, 4, 2, Prime::TWO).unwrap();
        assert!(v.holds());
        assert_eq!((v.actual_valuation, v.best.value), (3, 3));
        let v = verify_bounds(&engine, 3, 2, Prime::TWO).unwrap();
        assert!(v.holds());
        assert_eq!((v.actual_valuation, v.best.value), (1, 1));
        let v = verify_bounds(&engine, 6, 3, Prime::THREE).unwrap();
        assert!(v.holds());
        assert!(v.actual_valuation >= 2);
    }

    #[test]
    fn raw_bound_ceiling() {
        assert_eq!(RawBound::over(-3, 2).effective(), 0);
        assert_eq!(RawBound::over(3, 2).effective(), 2);
        assert_eq!(RawBound::over(4, 2).effective(), 2);
        assert_eq!(RawBound::over(-1, 1).effective(), 0);
    }
}
