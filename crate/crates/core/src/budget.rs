//! Step budgets for the exponential searches (isomorphism, embedding
//! enumeration, partition enumeration).

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget of {limit} steps exceeded")]
pub struct BudgetExceeded {
    pub limit: u64,
}

/// A countdown of search steps. Searches charge one step per node they
/// expand and fail hard once the limit is reached; results are never
/// silently truncated.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub const DEFAULT_LIMIT: u64 = 50_000_000;

    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn step(&mut self) -> Result<(), BudgetExceeded> {
        self.charge(1)
    }

    pub fn charge(&mut self, steps: u64) -> Result<(), BudgetExceeded> {
        self.used = self.used.saturating_add(steps);
        if self.used > self.limit {
            Err(BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_LIMIT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fails_after_limit() {
        let mut b = Budget::new(2);
        assert!(b.step().is_ok());
        assert!(b.step().is_ok());
        assert_eq!(b.step(), Err(BudgetExceeded { limit: 2 }));
    }

    #[test]
    fn charge_saturates() {
        let mut b = Budget::unlimited();
        b.charge(u64::MAX).unwrap();
        assert!(b.step().is_ok());
    }
}
