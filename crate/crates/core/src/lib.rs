//! Exact computation of the descent set statistic `beta_n(S)`, the power
//! sums `A^r_n = sum_S beta_n(S)^r`, and the p-adic valuations of both.
//!
//! Modules mirror the layers of the engine:
//!
//! * [`combinat`] and [`statistic`]: subsets of `[n-1]`, compositions,
//!   multinomials, `alpha_n`, `beta_n` and the bulk enumerator.
//! * [`padic`]: digit sums, depths, carries, Lucas and Kummer.
//! * [`powersum`]: `A^r_n` and the naive tuple expansions it is checked against.
//! * [`congruence`]: congruences between power sums, the digit map and the
//!   non-carry power set.
//! * [`bounds`]: lower bounds on `nu_p(A^r_n)` and their verification.
//! * [`treegroup`]: the rotation group of the balanced p-ary tree and
//!   orbits of subset tuples.

pub mod bounds;
pub mod combinat;
pub mod congruence;
pub mod error;
pub mod limits;
pub mod padic;
pub mod powersum;
pub mod statistic;
pub mod treegroup;

/// Arbitrary precision nonnegative integer.
pub type Natural = num_bigint::BigUint;
/// Arbitrary precision signed integer.
pub type Integer = num_bigint::BigInt;

pub use combinat::{co, co_inv, descent_set, multinomial, Composition, DescentSubset, WeakComposition};
pub use error::{Error, Result};
pub use limits::Limits;
pub use padic::Prime;
pub use powersum::{Engine, PowerSumSource};
pub use statistic::{alpha, beta, beta_all, oracle_beta_by_enumeration, BetaTable, Enumerator};
