//! Candidate accounting for exhaustive searches.

use crate::error::{Error, Result};

/// Default number of candidate evaluations a single search may spend.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Counts candidate evaluations against a fixed limit.
///
/// Searches call [`Meter::reserve`] with the size of a space before walking it
/// and [`Meter::charge`] as they go, so an exhausted budget is always reported
/// as [`Error::BudgetExceeded`] and never as a negative verdict.
#[derive(Debug, Clone)]
pub struct Meter {
    limit: u64,
    used: u64,
}

impl Meter {
    pub fn new(limit: u64) -> Self {
        Meter { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Meter::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.used)
    }

    /// Fails without charging when `needed` candidates would not fit.
    pub fn reserve(&self, needed: u128, what: &str) -> Result<()> {
        if needed > self.remaining() as u128 {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                needed,
                budget: self.limit,
            });
        }
        Ok(())
    }

    pub fn charge(&mut self, n: u64, what: &str) -> Result<()> {
        match self.used.checked_add(n) {
            Some(total) if total <= self.limit => {
                self.used = total;
                Ok(())
            }
            _ => Err(Error::BudgetExceeded {
                what: what.to_string(),
                needed: self.used as u128 + n as u128,
                budget: self.limit,
            }),
        }
    }

    /// True when `needed` candidates would fit in what is left.
    pub fn affords(&self, needed: u128) -> bool {
        needed <= self.remaining() as u128
    }
}

impl Default for Meter {
    fn default() -> Self {
        Meter::new(DEFAULT_BUDGET)
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub fn space_size(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}
