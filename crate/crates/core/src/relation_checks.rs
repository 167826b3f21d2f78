//! Structural identities of the relation algebra as report-producing
//! checks.

use num_complex::Complex64;

use crate::error::Result;
use crate::relation::LinearRelation;
use crate::report::CheckReport;
use crate::tolerance::Tolerances;

/// `T** = T` and `(T⁻¹)* = (T*)⁻¹`.
pub fn check_adjoint_involution(t: &LinearRelation, tol: &Tolerances) -> CheckReport {
    let adj = t.adjoint(tol);
    let twice = adj.adjoint(tol).graph_gap(t);
    let swapped = t.inverse().adjoint(tol).graph_gap(&adj.inverse());
    CheckReport::identity("adjoint_involution", "Section 2, adjoint relation", twice.max(swapped), tol.eps_eq)
        .with_detail("double_adjoint_gap", twice)
        .with_detail("inverse_adjoint_gap", swapped)
}

/// `dim T = dim D(T) + dim T(0) = dim R(T) + dim ker T`.
pub fn check_rank_nullity(t: &LinearRelation, tol: &Tolerances) -> CheckReport {
    let (d, m) = (t.domain(tol).dim(), t.mul_part_space(tol).dim());
    let (r, k) = (t.range(tol).dim(), t.kernel(tol).dim());
    CheckReport::predicate("graph_rank_nullity", "Section 2, linear relations", d + m == t.dim() && r + k == t.dim())
        .with_detail("graph_dim", t.dim())
        .with_detail("domain_dim", d)
        .with_detail("mul_part_dim", m)
        .with_detail("range_dim", r)
        .with_detail("kernel_dim", k)
}

/// `S = (S − T) + T` exactly when `D(S) ⊂ D(T)` and `T(0) ⊂ S(0)`; both
/// sides are recomputed and must agree.
pub fn check_sum_recovery(s: &LinearRelation, t: &LinearRelation, tol: &Tolerances) -> Result<CheckReport> {
    let recovered = s.sub(t, tol)?.add(t, tol)?;
    let equal = recovered.equals(s, tol);
    let domain_ok = s.domain(tol).is_subset_of(&t.domain(tol), tol);
    let mul_ok = t.mul_part_space(tol).is_subset_of(&s.mul_part_space(tol), tol);
    Ok(CheckReport::predicate("difference_sum_recovery", "Lemma 2.1", equal == (domain_ok && mul_ok))
        .with_detail("recovered", equal)
        .with_detail("domain_contained", domain_ok)
        .with_detail("mul_part_contained", mul_ok))
}

/// `T⁻¹ − S⁻¹ = T⁻¹(S − T)S⁻¹` when `S(0) ⊂ T(0)` and `D(S) ⊂ D(T)`.
pub fn check_inverse_difference(t: &LinearRelation, s: &LinearRelation, tol: &Tolerances) -> Result<CheckReport> {
    const ID: &str = "inverse_difference";
    const REF: &str = "Lemma 2.2";
    if !s.mul_part_space(tol).is_subset_of(&t.mul_part_space(tol), tol) {
        return Ok(CheckReport::hypothesis_violated(ID, REF, "S(0) ⊄ T(0)"));
    }
    if !s.domain(tol).is_subset_of(&t.domain(tol), tol) {
        return Ok(CheckReport::hypothesis_violated(ID, REF, "D(S) ⊄ D(T)"));
    }
    let (ti, si) = (t.inverse(), s.inverse());
    let lhs = ti.sub(&si, tol)?;
    let rhs = ti.compose(&s.sub(t, tol)?.compose(&si, tol)?, tol)?;
    Ok(CheckReport::identity(ID, REF, lhs.graph_gap(&rhs), tol.eps_eq))
}

/// `αT` followed by `α⁻¹` returns `T` for `α ≠ 0`; a cheap consistency
/// probe for scaled spans.
pub fn check_scaling_roundtrip(t: &LinearRelation, alpha: Complex64, tol: &Tolerances) -> CheckReport {
    let back = t.scalar_mul(alpha, tol).scalar_mul(alpha.inv(), tol);
    CheckReport::identity("scaling_roundtrip", "Section 2, relation arithmetic", back.graph_gap(t), tol.eps_eq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{self, from_real_rows};
    use crate::report::Status;
    use crate::subspace::Subspace;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn multivalued() -> LinearRelation {
        LinearRelation::from_parts(
            &Subspace::coordinate(3, &[0, 1]),
            &from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]),
            &Subspace::coordinate(3, &[2]),
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn structural_checks_pass_on_a_multivalued_relation() {
        let t = multivalued();
        assert!(check_adjoint_involution(&t, &tol()).passed());
        let r = check_rank_nullity(&t, &tol());
        assert!(r.passed());
        assert_eq!(r.details["domain_dim"], 2);
        assert!(check_scaling_roundtrip(&t, matrix::c64(0.0, 3.0), &tol()).passed());
    }

    #[test]
    fn sum_recovery_both_ways() {
        let t = LinearRelation::from_matrix(&matrix::identity(3));
        let s = multivalued();
        // D(S) ⊂ D(T) = X and T(0) = {0}: recovered.
        let r = check_sum_recovery(&s, &t, &tol()).unwrap();
        assert!(r.passed());
        assert_eq!(r.details["recovered"], true);
        // D(T) = X ⊄ D(S): not recovered, and the predicate still agrees.
        let r = check_sum_recovery(&t, &s, &tol()).unwrap();
        assert!(r.passed());
        assert_eq!(r.details["recovered"], false);
    }

    #[test]
    fn inverse_difference_on_matrices() {
        let t = LinearRelation::from_matrix(&from_real_rows(&[&[2.0, 1.0], &[0.0, 1.0]]));
        let s = LinearRelation::from_matrix(&from_real_rows(&[&[1.0, 0.0], &[1.0, 3.0]]));
        assert!(check_inverse_difference(&t, &s, &tol()).unwrap().passed());
    }

    #[test]
    fn inverse_difference_hypotheses() {
        let t = LinearRelation::from_matrix(&matrix::identity(3));
        let s = multivalued();
        let r = check_inverse_difference(&t, &s, &tol()).unwrap();
        assert_eq!(r.status, Status::HypothesisViolated);
        let r = check_inverse_difference(&s, &t, &tol()).unwrap();
        assert_eq!(r.status, Status::HypothesisViolated);
        let r = check_inverse_difference(&multivalued(), &multivalued(), &tol()).unwrap();
        assert!(r.passed());
    }
}
