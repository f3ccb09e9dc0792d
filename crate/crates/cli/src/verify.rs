//! The verification harness behind `descent verify`.
//!
//! Each suite evaluates a grid of checks from `descent_core` and collects one
//! [`CheckRecord`] per check. The report is JSON; a one-line summary per
//! check family goes to stderr.

use std::collections::BTreeMap;

use descent_core::bounds::{raw_bound, verify_bounds, BoundName};
use descent_core::combinat::factorial;
use descent_core::congruence::{
    euler_shift_check, euler_shift_check_2, power_recursion_check, prime_power_nondiv_check,
    same_nonzero_digits, scale_by_p_check, transfer_check,
};
use descent_core::padic::depth;
use descent_core::powersum::{expansion_even_rhs, expansion_odd_rhs};
use descent_core::treegroup::{
    group_closure_size, group_order, is_power_of, orbit_bound_check, orbit_partition_check,
    orbit_record, sigma, SubsetTuple,
};
use descent_core::{Integer, Limits, PowerSumSource, Prime};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::ENGINE_VERSION;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma,
    Congruence,
    Bounds,
    Orbit,
    All,
}

impl Suite {
    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Lemma, Suite::Congruence, Suite::Bounds, Suite::Orbit],
            s => vec![s],
        }
    }
}

/// Grid limits for a verification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyLimits {
    pub n_max: u32,
    pub r_max: u32,
    #[serde(serialize_with = "primes_as_numbers")]
    pub primes: Vec<Prime>,
}

fn primes_as_numbers<S: serde::Serializer>(primes: &[Prime], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(primes.iter().map(|p| p.get()))
}

impl VerifyLimits {
    pub const DEFAULT_N_MAX: u32 = 16;
    pub const EXTENDED_N_MAX: u32 = 20;
    pub const DEFAULT_R_MAX: u32 = 9;

    pub fn new(extended: bool) -> Self {
        VerifyLimits {
            n_max: if extended {
                Self::EXTENDED_N_MAX
            } else {
                Self::DEFAULT_N_MAX
            },
            r_max: Self::DEFAULT_R_MAX,
            primes: vec![Prime::TWO, Prime::THREE, Prime::FIVE],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    pub params: Value,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub engine_version: &'static str,
    pub limits: VerifyLimits,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckRecord>,
    /// Comparisons recorded for inspection; they do not affect the outcome.
    pub observations: Vec<CheckRecord>,
}

impl Report {
    pub fn holds(&self) -> bool {
        self.failed == 0
    }

    /// `check: passed/total` per check family, in first-seen order.
    pub fn summary(&self) -> String {
        let mut order = Vec::new();
        let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for c in &self.checks {
            let entry = tally.entry(c.check).or_insert_with(|| {
                order.push(c.check);
                (0, 0)
            });
            entry.0 += c.holds as usize;
            entry.1 += 1;
        }
        let mut out = String::new();
        for name in order {
            let (ok, total) = tally[name];
            let mark = if ok == total { "ok  " } else { "FAIL" };
            out.push_str(&format!("{mark} {name}: {ok}/{total}\n"));
        }
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.passed + self.failed,
            self.failed
        ));
        out
    }
}

#[derive(Default)]
struct Recorder {
    checks: Vec<CheckRecord>,
    observations: Vec<CheckRecord>,
}

impl Recorder {
    fn check(&mut self, check: &'static str, params: Value, holds: bool, detail: Option<String>) {
        self.checks.push(CheckRecord {
            check,
            params,
            holds,
            detail,
        });
    }
}

pub fn run<S: PowerSumSource + ?Sized>(
    source: &S,
    suite: Suite,
    limits: &VerifyLimits,
    core_limits: &Limits,
) -> Result<Report> {
    let mut rec = Recorder::default();
    for part in suite.parts() {
        match part {
            Suite::Lemma => lemma(source, limits, core_limits, &mut rec)?,
            Suite::Congruence => congruence(source, limits, &mut rec)?,
            Suite::Bounds => bounds(source, limits, &mut rec)?,
            Suite::Orbit => orbit(limits, core_limits, &mut rec)?,
            Suite::All => unreachable!("expanded by parts()"),
        }
    }
    let failed = rec.checks.iter().filter(|c| !c.holds).count();
    Ok(Report {
        suite,
        engine_version: ENGINE_VERSION,
        limits: limits.clone(),
        passed: rec.checks.len() - failed,
        failed,
        checks: rec.checks,
        observations: rec.observations,
    })
}

/// Fills the source with every `A^r_n` on the grid, one enumeration per `n`.
fn prefetch<S: PowerSumSource + ?Sized>(source: &S, limits: &VerifyLimits) -> Result<()> {
    let rs: Vec<u32> = (1..=limits.r_max).collect();
    for n in 1..=limits.n_max {
        source.power_sums(n, &rs)?;
    }
    Ok(())
}

fn lemma<S: PowerSumSource + ?Sized>(
    source: &S,
    limits: &VerifyLimits,
    core_limits: &Limits,
    rec: &mut Recorder,
) -> Result<()> {
    for n in 1..=limits.n_max {
        let value = source.power_sum(n, 1)?;
        let expected = factorial(n as u64);
        rec.check(
            "factorial",
            json!({"n": n}),
            value == expected,
            (value != expected).then(|| format!("A^1_{n} = {value}, {n}! = {expected}")),
        );
    }
    for r in 1..=limits.r_max {
        for n in 1..=limits.n_max {
            if (n - 1) * r > core_limits.max_expansion_bits {
                break;
            }
            let (check, rhs) = if r % 2 == 0 {
                ("expansion_even", expansion_even_rhs(n, r, core_limits)?)
            } else {
                ("expansion_odd", expansion_odd_rhs(n, r, core_limits)?)
            };
            let lhs = Integer::from(source.power_sum(n, r)?);
            rec.check(
                check,
                json!({"n": n, "r": r}),
                lhs == rhs,
                (lhs != rhs).then(|| format!("A = {lhs}, expansion = {rhs}")),
            );
        }
    }
    Ok(())
}

fn congruence<S: PowerSumSource + ?Sized>(
    source: &S,
    limits: &VerifyLimits,
    rec: &mut Recorder,
) -> Result<()> {
    prefetch(source, limits)?;
    let detail = |lhs: &dyn std::fmt::Display, rhs: &dyn std::fmt::Display, m: &dyn std::fmt::Display| {
        format!("{lhs} != {rhs} mod {m}")
    };
    let (n_max, r_max) = (limits.n_max, limits.r_max);
    for &p in &limits.primes {
        let pp = p.get();
        for n in 1..=n_max {
            for r in 1..=r_max {
                for s in r + 1..=r_max {
                    for k in 1..=r {
                        let period = pp.pow(k - 1) * (pp - 1);
                        if (s - r) % period == 0 {
                            let c = euler_shift_check(source, n, r, s, k, p)?;
                            rec.check(
                                "euler_shift",
                                json!({"n": n, "r": r, "s": s, "k": k, "p": pp}),
                                c.holds,
                                (!c.holds).then(|| detail(&c.lhs, &c.rhs, &c.modulus)),
                            );
                        }
                        if pp == 2 && k >= 3 && (s - r) % (1 << (k - 2)) == 0 {
                            let c = euler_shift_check_2(source, n, r, s, k)?;
                            rec.check(
                                "euler_shift_2",
                                json!({"n": n, "r": r, "s": s, "k": k}),
                                c.holds,
                                (!c.holds).then(|| detail(&c.lhs, &c.rhs, &c.modulus)),
                            );
                        }
                    }
                }
            }
            for k in 1..=r_max / pp {
                for r in k * pp..=r_max {
                    let c = power_recursion_check(source, n, r, k, p)?;
                    rec.check(
                        "power_recursion",
                        json!({"n": n, "r": r, "k": k, "p": pp}),
                        c.holds,
                        (!c.holds).then(|| detail(&c.lhs, &c.rhs, &c.modulus)),
                    );
                }
            }
        }
        if !p.is_odd() {
            continue;
        }
        for r in (2..=r_max).step_by(2) {
            for m in 1..=n_max {
                for n in 1..=n_max {
                    if m != n && same_nonzero_digits(m as u64, n as u64, p) {
                        let c = transfer_check(source, m, n, r, p)?;
                        rec.check(
                            "transfer",
                            json!({"m": m, "n": n, "r": r, "p": pp}),
                            c.holds,
                            (!c.holds).then(|| detail(&c.lhs, &c.rhs, &c.modulus)),
                        );
                    }
                }
            }
            for n in (1..=n_max).take_while(|n| n * pp <= n_max) {
                let c = scale_by_p_check(source, n, r, p)?;
                rec.check(
                    "scale_by_p",
                    json!({"n": n, "r": r, "p": pp}),
                    c.holds,
                    (!c.holds).then(|| detail(&c.lhs, &c.rhs, &c.modulus)),
                );
            }
            for k in (0..).take_while(|&k| pp.pow(k) <= n_max) {
                let c = prime_power_nondiv_check(source, k, r, p)?;
                rec.check(
                    "prime_power_nondiv",
                    json!({"k": k, "n": c.n, "r": r, "p": pp}),
                    c.holds,
                    (!c.holds).then(|| format!("nu_{pp}(A^{r}_{}) = {}", c.n, c.valuation)),
                );
            }
        }
    }
    Ok(())
}

fn bounds<S: PowerSumSource + ?Sized>(
    source: &S,
    limits: &VerifyLimits,
    rec: &mut Recorder,
) -> Result<()> {
    prefetch(source, limits)?;
    for &p in &limits.primes {
        for n in 1..=limits.n_max {
            for r in 1..=limits.r_max {
                let v = verify_bounds(source, n, r, p)?;
                let failures: Vec<String> = v
                    .failures()
                    .map(|b| format!("{} = {} > {}", b.bound.expect("named"), b.value, v.actual_valuation))
                    .collect();
                rec.check(
                    "bounds",
                    json!({
                        "n": n,
                        "r": r,
                        "p": p.get(),
                        "valuation": v.actual_valuation,
                        "best": v.best.bound.map(|b| b.as_str()),
                        "best_value": v.best.value,
                    }),
                    v.holds(),
                    (!failures.is_empty()).then(|| failures.join("; ")),
                );
                if let (Ok(odd), Ok(cyclic)) = (
                    raw_bound(BoundName::GroupOdd, n, r, p),
                    raw_bound(BoundName::CyclicShift, n, r, p),
                ) {
                    rec.observations.push(CheckRecord {
                        check: "group_odd_vs_cyclic_shift",
                        params: json!({"n": n, "r": r, "p": p.get()}),
                        holds: odd.effective() >= cyclic.effective(),
                        detail: Some(format!("group_odd {odd}, cyclic_shift {cyclic}")),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Fixed seed so reports are reproducible.
const ORBIT_SEED: u64 = 0x5eed_0b17;
const ORBIT_SAMPLES: usize = 200;

fn orbit(limits: &VerifyLimits, core_limits: &Limits, rec: &mut Recorder) -> Result<()> {
    for (p, k) in [
        (Prime::TWO, 1),
        (Prime::TWO, 2),
        (Prime::TWO, 3),
        (Prime::THREE, 1),
        (Prime::THREE, 2),
    ] {
        let size = group_closure_size(p, k, 1 << 16)?;
        let order = group_order(p, k)?;
        rec.check(
            "group_closure",
            json!({"p": p.get(), "k": k}),
            order == size.into(),
            Some(format!("closure {size}, expected {order}")),
        );
    }
    let cycles = sigma(Prime::THREE, 3, 2, 1)?.to_string();
    let expected = "(10,13,16)(11,14,17)(12,15,18)";
    rec.check(
        "sigma_cycles",
        json!({"p": 3, "k": 3, "a": 2, "b": 1}),
        cycles == expected,
        Some(cycles),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(ORBIT_SEED);
    for (p, k) in [(Prime::TWO, 2), (Prime::THREE, 1), (Prime::THREE, 2)] {
        let q = p.get().pow(k) as usize;
        for n in 1..=limits.n_max.min(5) {
            let with_depth = depth(n as u64, p)? > 0;
            let (mut sizes_ok, mut bounds_ok, mut vacuous) = (true, true, 0);
            let mut first_failure = None;
            for _ in 0..ORBIT_SAMPLES {
                let x = SubsetTuple::random(&mut rng, n, q)?;
                let record = orbit_record(&x, p, k)?;
                if !is_power_of(record.size as u64, p) {
                    sizes_ok = false;
                    first_failure.get_or_insert(format!("{x}: orbit size {}", record.size));
                }
                if with_depth {
                    let c = orbit_bound_check(&x, p, k)?;
                    vacuous += c.vacuous as usize;
                    if !c.holds {
                        bounds_ok = false;
                        first_failure.get_or_insert(format!(
                            "{x}: valuation {:?} < bound {}",
                            c.record.valuation, c.bound
                        ));
                    }
                }
            }
            let params = json!({"p": p.get(), "k": k, "n": n, "samples": ORBIT_SAMPLES});
            rec.check("orbit_sizes", params.clone(), sizes_ok, first_failure.clone());
            if with_depth {
                rec.check(
                    "orbit_bound",
                    json!({"p": p.get(), "k": k, "n": n, "samples": ORBIT_SAMPLES, "vacuous": vacuous}),
                    bounds_ok,
                    first_failure,
                );
            }
        }
    }

    for (n, p, k) in [(2, Prime::TWO, 1), (3, Prime::THREE, 1), (3, Prime::TWO, 2)] {
        let part = orbit_partition_check(n, p, k, core_limits)?;
        rec.check(
            "orbit_partition",
            json!({"n": n, "p": p.get(), "q": part.q}),
            part.holds(),
            Some(format!(
                "{} orbits covering {} of {} tuples",
                part.orbit_count, part.size_sum, part.total_tuples
            )),
        );
    }
    Ok(())
}
