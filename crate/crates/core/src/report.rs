//! Per-check result records shared by every verification routine.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisViolated,
}

/// One verified identity or inequality.
///
/// `residual` is the largest identity residual or inequality violation
/// observed (zero when an inequality holds); `slack` is the smallest
/// `rhs − lhs` over all inequality instances and is absent for identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub paper_ref: String,
    pub status: Status,
    pub residual: f64,
    pub slack: Option<f64>,
    pub details: Value,
}

impl CheckReport {
    /// An identity check: passes when `residual ≤ tolerance`.
    pub fn identity(check_id: &str, paper_ref: &str, residual: f64, tolerance: f64) -> Self {
        let status = if residual.is_finite() && residual <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            check_id: check_id.into(),
            paper_ref: paper_ref.into(),
            status,
            residual: finite_or_max(residual),
            slack: None,
            details: Value::Object(Map::new()),
        }
    }

    /// An inequality check from its worst slack `min(rhs − lhs)`: passes
    /// when the slack is at least `−tolerance`.
    pub fn inequality(check_id: &str, paper_ref: &str, slack: f64, tolerance: f64) -> Self {
        let status = if slack.is_finite() && slack >= -tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            check_id: check_id.into(),
            paper_ref: paper_ref.into(),
            status,
            residual: finite_or_max((-slack).max(0.0)),
            slack: Some(finite_or_max(slack)),
            details: Value::Object(Map::new()),
        }
    }

    /// A boolean property that was recomputed rather than measured.
    pub fn predicate(check_id: &str, paper_ref: &str, holds: bool) -> Self {
        Self {
            check_id: check_id.into(),
            paper_ref: paper_ref.into(),
            status: if holds { Status::Pass } else { Status::Fail },
            residual: if holds { 0.0 } else { 1.0 },
            slack: None,
            details: Value::Object(Map::new()),
        }
    }

    pub fn hypothesis_violated(check_id: &str, paper_ref: &str, reason: &str) -> Self {
        let mut details = Map::new();
        details.insert("reason".into(), Value::String(reason.into()));
        Self {
            check_id: check_id.into(),
            paper_ref: paper_ref.into(),
            status: Status::HypothesisViolated,
            residual: 0.0,
            slack: None,
            details: Value::Object(details),
        }
    }

    /// Converts a check error into a record; hypothesis violations keep
    /// their own status, anything else counts as a failure.
    pub fn from_error(check_id: &str, paper_ref: &str, err: &Error) -> Self {
        match err {
            Error::HypothesisViolated(reason) => Self::hypothesis_violated(check_id, paper_ref, reason),
            other => {
                let mut r = Self::predicate(check_id, paper_ref, false);
                r.details = serde_json::json!({ "error": other.to_string() });
                r
            }
        }
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        if let Value::Object(map) = &mut self.details {
            map.insert(key.into(), value.into());
        }
        self
    }

    /// Combines several records into one under a new id: the worst status
    /// wins, residuals take the maximum and slacks the minimum.
    pub fn merge(check_id: &str, paper_ref: &str, parts: &[CheckReport]) -> Self {
        let status = if parts.iter().any(|p| p.status == Status::Fail) {
            Status::Fail
        } else if parts.iter().any(|p| p.status == Status::HypothesisViolated) {
            Status::HypothesisViolated
        } else {
            Status::Pass
        };
        let residual = parts.iter().map(|p| p.residual).fold(0.0, f64::max);
        let slack = parts
            .iter()
            .filter_map(|p| p.slack)
            .reduce(f64::min);
        let details = parts
            .iter()
            .map(|p| (p.check_id.clone(), serde_json::to_value(p).unwrap_or(Value::Null)))
            .collect::<Map<_, _>>();
        Self {
            check_id: check_id.into(),
            paper_ref: paper_ref.into(),
            status,
            residual,
            slack,
            details: Value::Object(details),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn finite_or_max(x: f64) -> f64 {
    if x.is_nan() {
        f64::MAX
    } else {
        x.clamp(f64::MIN, f64::MAX)
    }
}

/// Largest entry of `lhs − rhs` over paired slices, padding with zeros.
pub(crate) fn max_excess(lhs: &[f64], rhs: &[f64]) -> f64 {
    let n = lhs.len().max(rhs.len());
    (0..n)
        .map(|i| lhs.get(i).copied().unwrap_or(0.0) - rhs.get(i).copied().unwrap_or(0.0))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_inequality_status() {
        assert!(CheckReport::identity("a", "r", 1e-12, 1e-8).passed());
        assert!(!CheckReport::identity("a", "r", 1e-3, 1e-8).passed());
        assert!(!CheckReport::identity("a", "r", f64::NAN, 1e-8).passed());
        let ok = CheckReport::inequality("b", "r", 0.25, 1e-8);
        assert!(ok.passed());
        assert_eq!(ok.residual, 0.0);
        let bad = CheckReport::inequality("b", "r", -0.5, 1e-8);
        assert_eq!(bad.status, Status::Fail);
        assert_eq!(bad.residual, 0.5);
    }

    #[test]
    fn merge_takes_worst() {
        let parts = [
            CheckReport::identity("a", "r", 1e-12, 1e-8),
            CheckReport::inequality("b", "r", -1.0, 1e-8),
            CheckReport::hypothesis_violated("c", "r", "why"),
        ];
        let m = CheckReport::merge("all", "r", &parts);
        assert_eq!(m.status, Status::Fail);
        assert_eq!(m.residual, 1.0);
        assert_eq!(m.slack, Some(-1.0));
    }

    #[test]
    fn status_serializes_snake_case() {
        let r = CheckReport::hypothesis_violated("x", "y", "z");
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "hypothesis_violated");
        assert_eq!(v["details"]["reason"], "z");
    }

    #[test]
    fn max_excess_pads_with_zero() {
        assert_eq!(max_excess(&[1.0, 0.5], &[2.0]), 0.5);
    }
}
