use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const DEFAULT_PRIME_FLOOR: u64 = 3;

/// Work budget and prime floor shared by every enumerating operation.
///
/// The budget counts evaluation steps of a single count; an operation whose
/// estimated work exceeds it refuses up front.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub budget: u64,
    pub prime_floor: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            budget: DEFAULT_BUDGET,
            prime_floor: DEFAULT_PRIME_FLOOR,
        }
    }
}

impl Limits {
    pub fn with_floor(prime_floor: u64) -> Self {
        Limits {
            prime_floor,
            ..Limits::default()
        }
    }

    pub fn check_prime(&self, p: u64) -> Result<()> {
        if !crate::residue::is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if p < self.prime_floor {
            return Err(Error::invalid(format!(
                "prime {p} is below the configured floor {}",
                self.prime_floor
            )));
        }
        Ok(())
    }

    /// Refuses when `p^exp` enumeration steps exceed the budget.
    pub fn check_enumeration(&self, p: u64, exp: u64) -> Result<u64> {
        if exp as f64 * (p as f64).log2() > 64.0 {
            return Err(Error::Budget {
                required: format!("{p}^{exp}"),
                allowed: self.budget,
            });
        }
        let required = BigUint::from(p).pow(exp as u32);
        match required.to_u64() {
            Some(r) if r <= self.budget => Ok(r),
            _ => Err(Error::Budget {
                required: format!("{p}^{exp} = {required}"),
                allowed: self.budget,
            }),
        }
    }
}
