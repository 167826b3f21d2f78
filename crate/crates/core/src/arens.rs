//! Arens decomposition `T = T_s ⊕ T_∞` and pointwise resolvent tests.

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix};
use crate::relation::{LinearRelation, OperatorOnSubspace};
use crate::report::CheckReport;
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

/// Orthogonal splitting of a relation into its operator part and its
/// purely multivalued part `{0} × T(0)`.
#[derive(Debug, Clone)]
pub struct ArensDecomposition {
    pub op_part: LinearRelation,
    pub op_part_matrix: OperatorOnSubspace,
    pub mul_part: LinearRelation,
    mul_space: Subspace,
}

impl ArensDecomposition {
    pub fn new(t: &LinearRelation, tol: &Tolerances) -> Result<Self> {
        let mul_space = t.mul_part_space(tol);
        let mul_part = LinearRelation::pure_multivalued(t.dim_x(), &mul_space);
        let op_graph = t.graph().perp_within(mul_part.graph(), tol)?;
        let op_part = LinearRelation::new(t.dim_x(), t.dim_y(), op_graph)?;
        let op_part_matrix = op_part.as_operator(tol)?;
        Ok(Self {
            op_part,
            op_part_matrix,
            mul_part,
            mul_space,
        })
    }

    /// `T(0)`.
    pub fn mul_space(&self) -> &Subspace {
        &self.mul_space
    }

    /// `‖P_T − (P_{T_s} + P_{T_∞})‖`.
    pub fn reconstruction_residual(&self, t: &LinearRelation) -> f64 {
        let split = self.op_part.graph_projection() + self.mul_part.graph_projection();
        matrix::op_norm(&(t.graph_projection() - split))
    }

    /// `‖P_{T_s}·P_{T_∞}‖`, zero when the two parts are orthogonal.
    pub fn orthogonality_residual(&self) -> f64 {
        matrix::op_norm(&(self.op_part.graph_projection() * self.mul_part.graph_projection()))
    }

    /// The operator part as a relation on `(T(0)^⊥)²`, in the coordinates
    /// of an orthonormal basis of `T(0)^⊥`. Returns the relation and the
    /// basis subspace. Any part of `T_s` whose domain leaves `T(0)^⊥` is
    /// dropped, which never happens for Hermitian `T`.
    pub fn restricted_op_part(&self, tol: &Tolerances) -> Result<(LinearRelation, Subspace)> {
        let perp = self.mul_space.complement(tol);
        let restricted = self.op_part.restrict(&perp, &perp, tol)?;
        Ok((restricted, perp))
    }
}

/// Shorthand for [`ArensDecomposition::new`].
pub fn arens(t: &LinearRelation, tol: &Tolerances) -> Result<ArensDecomposition> {
    ArensDecomposition::new(t, tol)
}

/// `P_T = P_{T_s} + P_{T_∞}` with orthogonal summands and a single-valued
/// `T_s`.
pub fn check_arens_reconstruction(t: &LinearRelation, tol: &Tolerances) -> Result<CheckReport> {
    let dec = ArensDecomposition::new(t, tol)?;
    let recon = dec.reconstruction_residual(t);
    let orth = dec.orthogonality_residual();
    let single = dec.op_part.is_single_valued(tol);
    let residual = if single { recon.max(orth) } else { f64::INFINITY };
    Ok(CheckReport::identity("arens_reconstruction", "Section 2, Arens decomposition", residual, tol.eps_eq)
        .with_detail("reconstruction_residual", recon)
        .with_detail("orthogonality_residual", orth)
        .with_detail("operator_part_single_valued", single)
        .with_detail("mul_part_dim", dec.mul_space().dim()))
}

/// For self-adjoint `T`: every eigenvalue of the operator part on
/// `T(0)^⊥` lies in `σ(T)`, and the points `μ ± i` next to it lie in
/// `ρ(T)`.
pub fn check_eigenvalues_in_spectrum(t: &LinearRelation, tol: &Tolerances) -> Result<CheckReport> {
    let eigs = operator_part_eigenvalues(t, tol)?;
    let mut missed = Vec::new();
    for &mu in &eigs {
        let on = in_resolvent_set(t, Complex64::new(mu, 0.0), tol)?;
        let off = in_resolvent_set(t, Complex64::new(mu, 1.0), tol)? && in_resolvent_set(t, Complex64::new(mu, -1.0), tol)?;
        if on || !off {
            missed.push(mu);
        }
    }
    Ok(CheckReport::predicate("operator_part_eigenvalues_in_spectrum", "Lemma 2.4, Eq (2.5)", missed.is_empty())
        .with_detail("eigenvalues", eigs.len())
        .with_detail("misplaced", missed))
}

fn require_square(t: &LinearRelation) -> Result<()> {
    if t.dim_x() != t.dim_y() {
        return Err(Error::mismatch("resolvent of non-square relation", t.dim_x(), t.dim_y()));
    }
    Ok(())
}

/// `λ ∈ ρ(T)`: `(λI − T)⁻¹` is single-valued and defined on all of `X`,
/// i.e. `ker(T − λ) = {0}` and `R(T − λ) = X`.
pub fn in_resolvent_set(t: &LinearRelation, lambda: Complex64, tol: &Tolerances) -> Result<bool> {
    require_square(t)?;
    let shifted = t.shift_scalar(lambda, tol)?;
    Ok(shifted.kernel(tol).is_zero() && shifted.range(tol).dim() == t.dim_x())
}

/// `(T − λI)⁻¹` as a matrix.
pub fn shifted_inverse(t: &LinearRelation, lambda: Complex64, tol: &Tolerances) -> Result<CMatrix> {
    require_square(t)?;
    let shifted = t.shift_scalar(lambda, tol)?;
    if !(shifted.kernel(tol).is_zero() && shifted.range(tol).dim() == t.dim_x()) {
        return Err(Error::NotInResolventSet(format!("{lambda}")));
    }
    shifted.inverse().to_matrix(tol)
}

/// The resolvent `(λI − T)⁻¹`.
pub fn resolvent_operator(t: &LinearRelation, lambda: Complex64, tol: &Tolerances) -> Result<CMatrix> {
    Ok(-shifted_inverse(t, lambda, tol)?)
}

/// Eigenvalues of the operator part of a self-adjoint relation, taken on
/// `T(0)^⊥`.
pub fn operator_part_eigenvalues(t: &LinearRelation, tol: &Tolerances) -> Result<Vec<f64>> {
    if !t.is_self_adjoint(tol)? {
        return Err(Error::HypothesisViolated("relation is not self-adjoint".into()));
    }
    let (restricted, _) = ArensDecomposition::new(t, tol)?.restricted_op_part(tol)?;
    if restricted.dim_x() == 0 {
        return Ok(Vec::new());
    }
    let m = restricted.to_matrix(tol)?;
    let (mut values, _) = matrix::hermitian_eigen(&m);
    values.reverse();
    Ok(values)
}

/// For Hermitian `T`: compares `λ ∈ ρ(T)` with `λ ∈ ρ(T_s)` (operator part
/// on `(T(0)^⊥)²`) at every sample point. Fails on any disagreement.
pub fn spectrum_identities(t: &LinearRelation, sample: &[Complex64], tol: &Tolerances) -> Result<CheckReport> {
    const ID: &str = "resolvent_set_of_operator_part";
    const REF: &str = "Lemma 2.4, Eq (2.5)";
    if !t.is_hermitian(tol)? {
        return Err(Error::HypothesisViolated("relation is not Hermitian".into()));
    }
    let dec = ArensDecomposition::new(t, tol)?;
    let (restricted, _) = dec.restricted_op_part(tol)?;
    let mut mismatches = Vec::new();
    let mut in_rho = 0usize;
    for &lambda in sample {
        let full = in_resolvent_set(t, lambda, tol)?;
        let part = if restricted.dim_x() == 0 {
            true
        } else {
            in_resolvent_set(&restricted, lambda, tol)?
        };
        in_rho += usize::from(full);
        if full != part {
            mismatches.push(json!([lambda.re, lambda.im]));
        }
    }
    let mul_only = LinearRelation::pure_multivalued(dec.mul_space().dim(), &Subspace::full(dec.mul_space().dim()));
    let mul_spectrum_empty = sample
        .iter()
        .all(|&l| dec.mul_space().is_zero() || in_resolvent_set(&mul_only, l, tol).unwrap_or(false));
    let report = CheckReport::predicate(ID, REF, mismatches.is_empty() && mul_spectrum_empty)
        .with_detail("samples", sample.len())
        .with_detail("in_resolvent_set", in_rho)
        .with_detail("mismatches", mismatches)
        .with_detail("multivalued_part_spectrum_empty", mul_spectrum_empty);
    Ok(report)
}

/// For Hermitian `T`: `T_s = T ∩ (T(0)^⊥)²` and `T_∞ = T ∩ T(0)²`, plus
/// `D(T) = T*(0)^⊥` (a diagnostic recorded in the details).
pub fn check_hermitian_split(t: &LinearRelation, tol: &Tolerances) -> Result<CheckReport> {
    if !t.is_hermitian(tol)? {
        return Err(Error::HypothesisViolated("relation is not Hermitian".into()));
    }
    let dec = ArensDecomposition::new(t, tol)?;
    let m = dec.mul_space();
    let perp = m.complement(tol);
    let perp_box = Subspace::from_orthonormal(matrix::block_diag(perp.basis(), perp.basis()));
    let mul_box = Subspace::from_orthonormal(matrix::block_diag(m.basis(), m.basis()));
    let op_from_cut = t.graph().intersect(&perp_box, tol)?;
    let mul_from_cut = t.graph().intersect(&mul_box, tol)?;
    let r_op = op_from_cut.gap(dec.op_part.graph())?;
    let r_mul = mul_from_cut.gap(dec.mul_part.graph())?;
    let adj_mul = t.adjoint(tol).mul_part_space(tol);
    let density_gap = t.domain(tol).gap(&adj_mul.complement(tol))?;
    Ok(CheckReport::identity(
        "hermitian_split_by_mul_part",
        "Lemma 2.4, Eq (2.4)",
        r_op.max(r_mul),
        tol.eps_eq,
    )
    .with_detail("operator_part_residual", r_op)
    .with_detail("multivalued_part_residual", r_mul)
    .with_detail("domain_vs_adjoint_mul_perp_gap", density_gap))
}

/// For Hermitian `T`: `T` is self-adjoint exactly when its operator part is
/// self-adjoint on `T(0)^⊥`.
pub fn check_self_adjoint_equivalence(t: &LinearRelation, tol: &Tolerances) -> Result<CheckReport> {
    if !t.is_hermitian(tol)? {
        return Err(Error::HypothesisViolated("relation is not Hermitian".into()));
    }
    let whole = t.is_self_adjoint(tol)?;
    let (restricted, _) = ArensDecomposition::new(t, tol)?.restricted_op_part(tol)?;
    let part = restricted.dim_x() == 0 || restricted.is_self_adjoint(tol)?;
    Ok(CheckReport::predicate("self_adjoint_iff_operator_part", "Lemma 2.3", whole == part)
        .with_detail("relation_self_adjoint", whole)
        .with_detail("operator_part_self_adjoint", part))
}
