//! One-shot comparison of two relations.

use serde::Serialize;

use crate::arens::in_resolvent_set;
use crate::error::Result;
use crate::perturbation::{
    check_flip_isometry, check_resolvent_criterion, check_resolvent_product_identities, projection_gap,
    reduce_to_operator_parts, PerturbationScenario, DEFAULT_LAMBDAS,
};
use crate::relation::LinearRelation;
use crate::report::{CheckReport, Status};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub dim_x: usize,
    pub dim_y: usize,
    pub gap_norm: f64,
    pub gap_trace_norm: f64,
    pub gap_singular_values: Vec<f64>,
    pub checks: Vec<CheckReport>,
}

impl PairReport {
    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }
}

/// Projection gap of `(S, T)` plus every check that applies to the pair:
/// the sup-distance and flip identities, and for relations on `X²` the
/// resolvent criterion at the sample points in `ρ(S) ∩ ρ(T)`, the
/// operator part reduction and the resolvent product identities.
pub fn verify_pair(s: &LinearRelation, t: &LinearRelation, tol: &Tolerances) -> Result<PairReport> {
    let gap = projection_gap(s, t)?;
    let mut checks = vec![gap.check_sup_distance(tol), check_flip_isometry(s, t, tol)?];
    if s.dim_x() == s.dim_y() {
        let sc = PerturbationScenario::new(s.clone(), t.clone(), None, tol)?;
        let mut lambdas = Vec::new();
        for &l in &DEFAULT_LAMBDAS {
            if in_resolvent_set(s, l, tol)? && in_resolvent_set(t, l, tol)? {
                lambdas.push(l);
            }
        }
        checks.push(if lambdas.is_empty() {
            CheckReport::hypothesis_violated("resolvent_criterion", "Theorem 3.4", "no sample point in ρ(S) ∩ ρ(T)")
        } else {
            check_resolvent_criterion(&sc, &lambdas, tol)
                .unwrap_or_else(|e| CheckReport::from_error("resolvent_criterion", "Theorem 3.4", &e))
        });
        checks.push(reduce_to_operator_parts(&sc, tol));
        let l = DEFAULT_LAMBDAS[0];
        checks.push(check_resolvent_product_identities(&sc, l, tol));
    }
    Ok(PairReport {
        dim_x: s.dim_x(),
        dim_y: s.dim_y(),
        gap_norm: gap.norm(),
        gap_trace_norm: gap.trace_norm(),
        gap_singular_values: gap.spectrum.values.clone(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::from_real_rows;

    #[test]
    fn identical_relations_have_zero_gap() {
        let t = LinearRelation::from_matrix(&from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]));
        let r = verify_pair(&t, &t, &Tolerances::default()).unwrap();
        assert!(r.gap_norm < 1e-12);
        assert!(!r.has_failures(), "{:#?}", r.checks);
    }

    #[test]
    fn rectangular_pairs_skip_resolvent_checks() {
        let s = LinearRelation::from_matrix(&from_real_rows(&[&[0.0], &[0.0]]));
        let t = LinearRelation::from_matrix(&from_real_rows(&[&[1.0], &[0.0]]));
        let r = verify_pair(&s, &t, &Tolerances::default()).unwrap();
        assert_eq!(r.checks.len(), 2);
        assert!(r.gap_norm > 0.1);
    }
}
