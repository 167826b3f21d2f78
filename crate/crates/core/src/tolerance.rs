use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable that overrides [`Tolerances::eps_eq`].
pub const TOL_EQ_ENV: &str = "RELKIT_TOL_EQ";

/// Numerical thresholds threaded through every subspace decision.
///
/// `eps_rank` is a relative singular-value cutoff, `eps_orth` bounds the
/// drift of orthonormal bases and `eps_eq` bounds projector or matrix
/// residuals when two objects are declared equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps_rank: f64,
    pub eps_orth: f64,
    pub eps_eq: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_rank: 1e-10,
            eps_orth: 1e-12,
            eps_eq: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(eps_rank: f64, eps_orth: f64, eps_eq: f64) -> Result<Self> {
        let tol = Self {
            eps_rank,
            eps_orth,
            eps_eq,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_rank, self.eps_orth, self.eps_eq];
        if all.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be finite and strictly positive: {self:?}"
            )));
        }
        if self.eps_rank > self.eps_eq {
            return Err(Error::InvalidInput(format!(
                "eps_rank ({}) must not exceed eps_eq ({})",
                self.eps_rank, self.eps_eq
            )));
        }
        Ok(())
    }

    /// Defaults with `eps_eq` taken from `RELKIT_TOL_EQ` when it is set.
    pub fn from_env() -> Result<Self> {
        let mut tol = Self::default();
        if let Ok(raw) = std::env::var(TOL_EQ_ENV) {
            tol.eps_eq = raw.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("{TOL_EQ_ENV}={raw:?} is not a number"))
            })?;
        }
        tol.validate()?;
        Ok(tol)
    }

    pub fn with_eps_eq(mut self, eps_eq: f64) -> Result<Self> {
        self.eps_eq = eps_eq;
        self.validate()?;
        Ok(self)
    }

    pub fn with_eps_rank(mut self, eps_rank: f64) -> Result<Self> {
        self.eps_rank = eps_rank;
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let tol = Tolerances::default();
        tol.validate().unwrap();
        assert_eq!(tol.eps_rank, 1e-10);
        assert_eq!(tol.eps_orth, 1e-12);
        assert_eq!(tol.eps_eq, 1e-8);
    }

    #[test]
    fn rejects_nonpositive_and_inverted() {
        assert!(Tolerances::new(0.0, 1e-12, 1e-8).is_err());
        assert!(Tolerances::new(1e-10, -1.0, 1e-8).is_err());
        assert!(Tolerances::new(1e-6, 1e-12, 1e-8).is_err());
        assert!(Tolerances::new(f64::NAN, 1e-12, 1e-8).is_err());
    }
}
