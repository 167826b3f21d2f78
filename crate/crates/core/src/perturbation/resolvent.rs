use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::arens::{in_resolvent_set, shifted_inverse};
use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix};
use crate::relation::{LinearRelation, OperatorOnSubspace};
use crate::report::CheckReport;
use crate::schatten::trace_norm;
use crate::tolerance::Tolerances;

use super::relative_residual;
use super::scenario::PerturbationScenario;
use super::shift::shift_constant;

/// Each condition for `A ∈ Γ(S, T)`, recomputed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaMembership {
    pub domains_in_a_domain: bool,
    /// `D(A) = X`. Recorded only: every subspace is closed here, so
    /// density is not part of membership.
    pub a_domain_dense: bool,
    /// `ker(S − A) = {0}`, i.e. `(S − A)⁻¹` is single-valued.
    pub s_shift_injective: bool,
    /// `R(S − A) = Y`, i.e. `(S − A)⁻¹` is defined on all of `Y`.
    pub s_shift_surjective: bool,
    pub t_shift_injective: bool,
    pub t_shift_surjective: bool,
}

impl GammaMembership {
    pub fn is_member(&self) -> bool {
        self.domains_in_a_domain
            && self.s_shift_injective
            && self.s_shift_surjective
            && self.t_shift_injective
            && self.t_shift_surjective
    }
}

pub fn gamma_membership(
    s: &LinearRelation,
    t: &LinearRelation,
    a: &OperatorOnSubspace,
    tol: &Tolerances,
) -> Result<GammaMembership> {
    let ss = s.shift_by_operator(a, -1.0, tol)?;
    let ts = t.shift_by_operator(a, -1.0, tol)?;
    let full_range = |r: &LinearRelation| r.range(tol).dim() == r.dim_y();
    Ok(GammaMembership {
        domains_in_a_domain: ss.domain_contained && ts.domain_contained,
        a_domain_dense: a.domain().dim() == a.dim_x(),
        s_shift_injective: ss.relation.kernel(tol).is_zero(),
        s_shift_surjective: full_range(&ss.relation),
        t_shift_injective: ts.relation.kernel(tol).is_zero(),
        t_shift_surjective: full_range(&ts.relation),
    })
}

/// `A ∈ Γ(S, T)`; false on mismatched shapes.
pub fn is_in_gamma_set(s: &LinearRelation, t: &LinearRelation, a: &OperatorOnSubspace, tol: &Tolerances) -> bool {
    gamma_membership(s, t, a, tol).is_ok_and(|m| m.is_member())
}

/// The pieces of `P_{(T−A)⁻¹} − P_{(S−A)⁻¹}` on `Y × X`.
///
/// `r_t = (T − A)⁻¹ : Y → X`; its adjoint `r_tᴴ` is `(T* − A*)⁻¹`.
/// `f = (I + rᴴr)⁻¹` acts on `Y` and `h = (I + rrᴴ)⁻¹` on `X`. The block
/// matrix is ordered with `Y` first: `p11 : Y → Y`, `p12 : X → Y`,
/// `p21 : Y → X`, `p22 : X → X`.
#[derive(Debug, Clone)]
pub struct ResolventBlocks {
    pub r_t: CMatrix,
    pub r_s: CMatrix,
    pub f_t: CMatrix,
    pub f_s: CMatrix,
    pub h_t: CMatrix,
    pub h_s: CMatrix,
    pub p11: CMatrix,
    pub p12: CMatrix,
    pub p21: CMatrix,
    pub p22: CMatrix,
    /// `W = (T − A)⁻¹ − (S − A)⁻¹`.
    pub w: CMatrix,
}

impl ResolventBlocks {
    pub fn assembled(&self) -> CMatrix {
        matrix::vstack(
            &matrix::hstack(&self.p11, &self.p12),
            &matrix::hstack(&self.p21, &self.p22),
        )
    }

    fn block_trace_norms(&self) -> [f64; 4] {
        [
            trace_norm(&self.p11),
            trace_norm(&self.p12),
            trace_norm(&self.p21),
            trace_norm(&self.p22),
        ]
    }
}

fn require_operator(sc: &PerturbationScenario) -> Result<&OperatorOnSubspace> {
    sc.a()
        .ok_or_else(|| Error::NotInGammaSet("scenario has no operator A".into()))
}

fn shifted(r: &LinearRelation, a: &OperatorOnSubspace, tol: &Tolerances) -> Result<LinearRelation> {
    Ok(r.shift_by_operator(a, -1.0, tol)?.relation)
}

pub fn resolvent_blocks(sc: &PerturbationScenario, tol: &Tolerances) -> Result<ResolventBlocks> {
    let a = require_operator(sc)?;
    let membership = gamma_membership(sc.s(), sc.t(), a, tol)?;
    if !membership.is_member() {
        return Err(Error::NotInGammaSet(
            serde_json::to_string(&membership).unwrap_or_default(),
        ));
    }
    let r_t = shifted(sc.t(), a, tol)?.inverse().to_matrix(tol)?;
    let r_s = shifted(sc.s(), a, tol)?.inverse().to_matrix(tol)?;
    let (ny, nx) = (r_t.ncols(), r_t.nrows());
    let f = |r: &CMatrix| matrix::inverse(&(matrix::identity(ny) + r.adjoint() * r));
    let h = |r: &CMatrix| matrix::inverse(&(matrix::identity(nx) + r * r.adjoint()));
    let (f_t, f_s, h_t, h_s) = (f(&r_t)?, f(&r_s)?, h(&r_t)?, h(&r_s)?);
    let p11 = &f_t - &f_s;
    let p21 = &r_t * &f_t - &r_s * &f_s;
    let p12 = r_t.adjoint() * &h_t - r_s.adjoint() * &h_s;
    let p22 = &r_t * r_t.adjoint() * &h_t - &r_s * r_s.adjoint() * &h_s;
    let w = &r_t - &r_s;
    Ok(ResolventBlocks {
        r_t,
        r_s,
        f_t,
        f_s,
        h_t,
        h_s,
        p11,
        p12,
        p21,
        p22,
        w,
    })
}

/// Largest amount by which the spectrum of a Hermitian matrix leaves
/// `(0, 1]`, or 0.
fn unit_interval_excess(m: &CMatrix) -> f64 {
    let (values, _) = matrix::hermitian_eigen(m);
    let hi = values.first().copied().unwrap_or(1.0);
    let lo = values.last().copied().unwrap_or(1.0);
    let asymmetry = matrix::op_norm(&(m - m.adjoint()));
    (hi - 1.0).max(-lo).max(asymmetry).max(0.0)
}

/// The assembled block matrix against `P_{(T−A)⁻¹} − P_{(S−A)⁻¹}`
/// obtained by flipping the coordinates of `P_{T−A} − P_{S−A}`, and the
/// block trace norm bounds `‖P_ij‖₁ ≤ ‖P‖₁ ≤ Σ ‖P_ij‖₁`.
pub fn check_block_assembly(sc: &PerturbationScenario, rb: &ResolventBlocks, tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let a = require_operator(sc)?;
    let flip = matrix::swap_matrix(sc.s().dim_x(), sc.s().dim_y());
    let flipped = |r: &LinearRelation| &flip * r.graph_projection() * flip.transpose();
    let direct = flipped(&shifted(sc.t(), a, tol)?) - flipped(&shifted(sc.s(), a, tol)?);
    let assembled = rb.assembled();
    let residual = matrix::op_norm(&(&assembled - &direct));
    let spectral = [&rb.f_t, &rb.f_s, &rb.h_t, &rb.h_s]
        .into_iter()
        .map(unit_interval_excess)
        .fold(0.0, f64::max);
    let assembly = CheckReport::identity(
        "resolvent_block_assembly",
        "Proposition 3.2, Eqs (3.13)-(3.17)",
        residual.max(spectral),
        tol.eps_eq,
    )
    .with_detail("assembly_residual", residual)
    .with_detail("f_h_spectrum_excess", spectral);

    let total = trace_norm(&direct);
    let blocks = rb.block_trace_norms();
    let sum: f64 = blocks.iter().sum();
    let largest = blocks.iter().copied().fold(0.0, f64::max);
    let bounds = CheckReport::inequality(
        "resolvent_block_trace_bounds",
        "Proposition 3.2 with Proposition 2.1",
        (sum - total).min(total - largest),
        tol.eps_eq,
    )
    .with_detail("trace_norm", total)
    .with_detail("block_trace_norms", blocks.to_vec());
    Ok(vec![assembly, bounds])
}

/// The algebraic identities linking `W` to the blocks, each as a relative
/// matrix residual.
pub fn check_w_identities(rb: &ResolventBlocks, tol: &Tolerances) -> CheckReport {
    let (r_t, r_s, w) = (&rb.r_t, &rb.r_s, &rb.w);
    let ny = r_t.ncols();
    let f_t_inv = matrix::identity(ny) + r_t.adjoint() * r_t;
    let l1 = r_s.adjoint() * r_s - r_t.adjoint() * r_t;
    let l1_alt = -(r_s.adjoint() * w) - w.adjoint() * r_t;
    let l2 = r_s * r_s.adjoint() - r_t * r_t.adjoint();
    let l2_alt = -(r_s * w.adjoint()) - w * r_t.adjoint();
    let h_diff = &rb.h_t - &rb.h_s;
    let l3 = &l2 * &rb.h_t;
    let cases: [(&str, CMatrix, CMatrix); 8] = [
        ("w_from_blocks", w.clone(), -((r_s * &rb.p11 - &rb.p21) * &f_t_inv)),
        ("l1_two_forms", l1.clone(), l1_alt),
        ("p11_factorization", rb.p11.clone(), &rb.f_t * &l1 * &rb.f_s),
        ("p21_from_p11", rb.p21.clone(), r_s * &rb.p11 + w * &rb.f_t),
        ("l2_two_forms", l2.clone(), l2_alt),
        ("h_difference_factorization", h_diff.clone(), &rb.h_t * &l2 * &rb.h_s),
        ("p12_from_h_difference", rb.p12.clone(), r_s.adjoint() * &h_diff + w.adjoint() * &rb.h_t),
        ("p22_from_h_difference", rb.p22.clone(), r_s * r_s.adjoint() * &h_diff - l3),
    ];
    let parts: Vec<CheckReport> = cases
        .iter()
        .map(|(id, lhs, rhs)| CheckReport::identity(id, "Eqs (3.18)-(3.20)", relative_residual(lhs, rhs), tol.eps_eq))
        .collect();
    CheckReport::merge("w_identities", "Proposition 3.2, Eqs (3.18)-(3.20)", &parts)
}

/// Two-sided trace norm comparison between `W` and the graph gaps.
///
/// With `c = ‖R_S‖ + ‖R_T‖`, the block formulas give
/// `‖W‖₁ ≤ (‖R_S‖‖P11‖₁ + ‖P21‖₁)(1 + ‖R_T‖²)` and
/// `‖P_{T−A} − P_{S−A}‖₁ ≤ ‖W‖₁ (2 + c(2 + 2‖R_S‖ + ‖R_S‖²))`; summing
/// the shifted singular value chain adds `γ` on both sides for `P_T − P_S`.
pub fn check_trace_class_equivalence(sc: &PerturbationScenario, rb: &ResolventBlocks, tol: &Tolerances) -> Result<CheckReport> {
    let a = require_operator(sc)?;
    let gamma = shift_constant(a);
    let w_norm = trace_norm(&rb.w);
    let (ns, nt) = (matrix::op_norm(&rb.r_s), matrix::op_norm(&rb.r_t));
    let [t11, _, t21, _] = rb.block_trace_norms();
    let shifted_gap = trace_norm(&rb.assembled());
    let gap = trace_norm(&(sc.t().graph_projection() - sc.s().graph_projection()));
    let necessity = (ns * t11 + t21) * (1.0 + nt * nt);
    let c = ns + nt;
    let sufficiency = w_norm * (2.0 + c * (2.0 + 2.0 * ns + ns * ns));
    let slack = [
        necessity - w_norm,
        sufficiency - shifted_gap,
        gamma * shifted_gap - gap,
        gamma * gap - shifted_gap,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    Ok(CheckReport::inequality(
        "resolvent_trace_class_equivalence",
        "Proposition 3.2; Theorem 3.3",
        slack,
        tol.eps_eq,
    )
    .with_detail("w_trace_norm", w_norm)
    .with_detail("shifted_gap_trace_norm", shifted_gap)
    .with_detail("gap_trace_norm", gap)
    .with_detail("necessity_bound", necessity)
    .with_detail("sufficiency_bound", sufficiency)
    .with_detail("gamma", gamma))
}

/// Resolvent-side criterion at each `λ ∈ ρ(S) ∩ ρ(T)` of `lambdas`: runs
/// the block checks with `A = λI`, cross-checks `W` against the resolvents
/// computed directly, and reports `‖(T−λ)⁻¹ − (S−λ)⁻¹‖₁` per point with
/// the spread between points.
pub fn check_resolvent_criterion(sc: &PerturbationScenario, lambdas: &[Complex64], tol: &Tolerances) -> Result<CheckReport> {
    const REF: &str = "Theorem 3.4";
    let (s, t) = (sc.s(), sc.t());
    if s.dim_x() != s.dim_y() {
        return Err(Error::mismatch("resolvent criterion on X²", s.dim_x(), s.dim_y()));
    }
    let mut parts = Vec::new();
    let mut norms = Vec::new();
    for (k, &lambda) in lambdas.iter().enumerate() {
        if !(in_resolvent_set(s, lambda, tol)? && in_resolvent_set(t, lambda, tol)?) {
            return Err(Error::NotInResolventSet(format!("{lambda} is not in ρ(S) ∩ ρ(T)")));
        }
        let at = sc.with_operator(Some(OperatorOnSubspace::scalar(s.dim_x(), lambda)), tol)?;
        let rb = resolvent_blocks(&at, tol)?;
        let direct = shifted_inverse(t, lambda, tol)? - shifted_inverse(s, lambda, tol)?;
        let cross = CheckReport::identity(
            "w_matches_resolvents",
            REF,
            relative_residual(&rb.w, &direct),
            tol.eps_eq,
        );
        let mut local = check_block_assembly(&at, &rb, tol)?;
        local.push(check_w_identities(&rb, tol));
        local.push(check_trace_class_equivalence(&at, &rb, tol)?);
        local.push(cross);
        let w_norm = trace_norm(&rb.w);
        norms.push(w_norm);
        parts.push(
            CheckReport::merge(&format!("lambda_{k}"), REF, &local)
                .with_detail("lambda", json!([lambda.re, lambda.im]))
                .with_detail("w_trace_norm", w_norm),
        );
    }
    let gap = trace_norm(&(t.graph_projection() - s.graph_projection()));
    let hi = norms.iter().copied().fold(0.0, f64::max);
    let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if lo > tol.eps_eq { json!(hi / lo) } else { json!(null) };
    Ok(CheckReport::merge("resolvent_criterion", REF, &parts)
        .with_detail("gap_trace_norm", gap)
        .with_detail("w_trace_norms", norms)
        .with_detail("w_trace_norm_spread", spread))
}
