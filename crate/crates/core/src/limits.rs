use crate::error::{Error, Result};

/// Largest ambient order representable by the 64-bit subset masks.
pub const MAX_REPRESENTABLE_N: u32 = 64;

/// Enumeration caps shared by every exponential-time operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which all `2^(n-1)` subsets are enumerated.
    pub max_n: u32,
    /// Largest `n` for the `n!` permutation oracle.
    pub max_oracle_n: u32,
    /// Cap on `(n-1)*r`, the bit width of the tuple space walked by the
    /// naive expansion evaluators.
    pub max_expansion_bits: u32,
    /// Cap on `(n-1)*q` for exhaustive orbit partitioning.
    pub max_orbit_bits: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_n: 22,
            max_oracle_n: 10,
            max_expansion_bits: 12,
            max_orbit_bits: 16,
        }
    }
}

impl Limits {
    pub fn with_max_n(mut self, max_n: u32) -> Self {
        self.max_n = max_n.min(MAX_REPRESENTABLE_N);
        self
    }

    pub(crate) fn check_n(&self, n: u32) -> Result<()> {
        check("n", n as u64, self.max_n as u64)
    }

    pub(crate) fn check_oracle_n(&self, n: u32) -> Result<()> {
        check("n (permutation oracle)", n as u64, self.max_oracle_n as u64)
    }

    pub(crate) fn check_expansion(&self, n: u32, r: u32) -> Result<()> {
        let bits = (n.saturating_sub(1) as u64) * r as u64;
        check("(n-1)*r", bits, self.max_expansion_bits as u64)
    }

    pub(crate) fn check_orbit(&self, n: u32, q: u64) -> Result<()> {
        let bits = (n.saturating_sub(1) as u64).saturating_mul(q);
        check("(n-1)*q", bits, self.max_orbit_bits as u64)
    }
}

fn check(what: &'static str, requested: u64, limit: u64) -> Result<()> {
    if requested > limit {
        Err(Error::Capacity {
            what,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}
