use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Family of random instances drawn per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationClass {
    Generic,
    Hermitian,
    SelfAdjoint,
    Additive,
    GammaAdmissible,
    /// Every other class, each on its own key.
    All,
}

impl RelationClass {
    pub const CONCRETE: [RelationClass; 5] = [
        RelationClass::Generic,
        RelationClass::Hermitian,
        RelationClass::SelfAdjoint,
        RelationClass::Additive,
        RelationClass::GammaAdmissible,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationClass::Generic => "generic",
            RelationClass::Hermitian => "hermitian",
            RelationClass::SelfAdjoint => "self_adjoint",
            RelationClass::Additive => "additive",
            RelationClass::GammaAdmissible => "gamma_admissible",
            RelationClass::All => "all",
        }
    }

    /// The classes a run with this setting covers.
    pub fn expand(self) -> Vec<RelationClass> {
        match self {
            RelationClass::All => Self::CONCRETE.to_vec(),
            c => vec![c],
        }
    }

    /// Position in [`Self::CONCRETE`]; mixes into the RNG key so a class
    /// draws the same instances alone or inside `all`.
    pub(crate) fn key_index(self) -> u64 {
        Self::CONCRETE.iter().position(|&c| c == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::CONCRETE
            .into_iter()
            .chain([RelationClass::All])
            .find(|c| c.name() == norm)
            .ok_or_else(|| Error::InvalidInput(format!("unknown relation class {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Dimension of `X = Y`.
    pub dim: usize,
    /// Dimension of the multivalued part `S(0)`.
    pub mul_dim: usize,
    /// Graph dimension; `None` picks the class default.
    pub graph_dim: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub class: RelationClass,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            dim: 6,
            mul_dim: 2,
            graph_dim: None,
            seed: 0,
            trials: 200,
            class: RelationClass::All,
        }
    }
}

impl GeneratorConfig {
    /// Graph dimension used for `class`. Hermitian instances default to one
    /// below `dim` so that they are Hermitian but not self-adjoint; the
    /// self-adjoint, additive and admissible classes always fill `dim`.
    pub fn graph_dim_for(&self, class: RelationClass) -> usize {
        match class {
            RelationClass::Generic | RelationClass::All => self.graph_dim.unwrap_or(self.dim),
            RelationClass::Hermitian => self
                .graph_dim
                .unwrap_or_else(|| self.dim.saturating_sub(1).max(self.mul_dim)),
            _ => self.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.dim == 0 {
            return bad("dim must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.mul_dim > self.dim {
            return bad(format!("mul_dim {} exceeds dim {}", self.mul_dim, self.dim));
        }
        let Some(g) = self.graph_dim else {
            return Ok(());
        };
        for class in self.class.expand() {
            let (lo, hi) = match class {
                RelationClass::Generic => (self.mul_dim, self.dim + self.mul_dim),
                RelationClass::Hermitian => (self.mul_dim, self.dim),
                _ => (self.dim, self.dim),
            };
            if g < lo || g > hi {
                return bad(format!("graph_dim {g} is outside [{lo}, {hi}] for class {class}"));
            }
        }
        Ok(())
    }
}
