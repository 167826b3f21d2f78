use crate::arens::ArensDecomposition;
use crate::error::{Error, Result};
use crate::matrix;
use crate::report::CheckReport;
use crate::schatten::SingularSpectrum;
use crate::tolerance::Tolerances;

use super::scenario::PerturbationScenario;

const ID: &str = "operator_part_gap_reduction";
const REF: &str = "Theorem 3.5, Eq (3.21)";

/// With `S(0) = T(0) = M` and both domains in `M^⊥`:
/// `(P_T − P_S)(x, y) = (P_{T_s} − P_{S_s})(x₁, y₁)` where `x₁, y₁` are the
/// components in `M^⊥`, and the gap of the operator parts on `(M^⊥)²`
/// has the same nonzero singular values as `P_T − P_S`.
pub fn reduce_to_operator_parts(sc: &PerturbationScenario, tol: &Tolerances) -> CheckReport {
    match reduce(sc, tol) {
        Ok(r) => r,
        Err(e) => CheckReport::from_error(ID, REF, &e),
    }
}

fn reduce(sc: &PerturbationScenario, tol: &Tolerances) -> Result<CheckReport> {
    let flags = sc.flags();
    if !flags.equal_mul_parts {
        return Err(Error::HypothesisViolated("S(0) ≠ T(0)".into()));
    }
    if !flags.domains_in_mul_perp {
        return Err(Error::HypothesisViolated("D(S) ∪ D(T) is not inside T(0)^⊥".into()));
    }
    let (s, t) = (sc.s(), sc.t());
    if s.dim_x() != s.dim_y() {
        return Err(Error::mismatch("operator part reduction on X²", s.dim_x(), s.dim_y()));
    }
    let ds = ArensDecomposition::new(s, tol)?;
    let dt = ArensDecomposition::new(t, tol)?;
    let perp = ds.mul_space().complement(tol);
    let p_perp = perp.projection_matrix();
    let cut = matrix::block_diag(&p_perp, &p_perp);

    let gap = t.graph_projection() - s.graph_projection();
    let op_gap = dt.op_part.graph_projection() - ds.op_part.graph_projection();
    let pointwise = matrix::op_norm(&(&gap - op_gap * cut));

    let s_r = ds.op_part.restrict(&perp, &perp, tol)?;
    let t_r = dt.op_part.restrict(&perp, &perp, tol)?;
    let reduced_gap = t_r.graph_projection() - s_r.graph_projection();
    let full = SingularSpectrum::from_values(matrix::singular_values(&gap));
    let reduced = SingularSpectrum::from_values(matrix::singular_values(&reduced_gap));
    let n = full.values.len().max(reduced.values.len());
    let sv_residual = (1..=n)
        .map(|k| (full.s(k) - reduced.s(k)).abs())
        .fold(0.0, f64::max);
    let trace_residual = (full.trace_norm - reduced.trace_norm).abs();
    Ok(CheckReport::identity(ID, REF, pointwise.max(sv_residual).max(trace_residual), tol.eps_eq)
        .with_detail("pointwise_residual", pointwise)
        .with_detail("singular_value_residual", sv_residual)
        .with_detail("trace_norm", full.trace_norm)
        .with_detail("reduced_trace_norm", reduced.trace_norm)
        .with_detail("reduced_dim", perp.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, from_real_rows};
    use crate::relation::LinearRelation;
    use crate::report::Status;
    use crate::subspace::Subspace;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// `{(x, Hx + m)}` with `x ∈ M^⊥`, `m ∈ M = span{e_last}`, for a
    /// Hermitian `H` supported on `M^⊥`.
    fn with_mul_part(h: &[&[f64]]) -> LinearRelation {
        let k = h.len();
        let mut m = matrix::zeros(k + 1, k + 1);
        m.view_mut((0, 0), (k, k)).copy_from(&from_real_rows(h));
        let domain = Subspace::coordinate(k + 1, &(0..k).collect::<Vec<_>>());
        LinearRelation::from_parts(&domain, &m, &Subspace::coordinate(k + 1, &[k]), &tol()).unwrap()
    }

    #[test]
    fn purely_multivalued_pair_has_zero_gaps() {
        let s = LinearRelation::pure_multivalued(3, &Subspace::full(3));
        let sc = PerturbationScenario::new(s.clone(), s, None, &tol()).unwrap();
        let r = reduce_to_operator_parts(&sc, &tol());
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.details["trace_norm"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn common_mul_part_reduces() {
        let s = with_mul_part(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let t = with_mul_part(&[&[1.0, 0.5], &[0.5, -1.0]]);
        let sc = PerturbationScenario::new(s, t, None, &tol()).unwrap();
        assert!(sc.flags().equal_mul_parts);
        let r = reduce_to_operator_parts(&sc, &tol());
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.details["reduced_dim"], 2);
        assert!(r.details["trace_norm"].as_f64().unwrap() > 0.1);
    }

    #[test]
    fn different_mul_parts_violate_the_hypothesis() {
        let s = with_mul_part(&[&[1.0]]);
        let t = LinearRelation::from_matrix(&(matrix::identity(2) * c64(2.0, 0.0)));
        let sc = PerturbationScenario::new(s, t, None, &tol()).unwrap();
        assert_eq!(reduce_to_operator_parts(&sc, &tol()).status, Status::HypothesisViolated);
    }
}
