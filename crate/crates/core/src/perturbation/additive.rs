use num_complex::Complex64;
use serde_json::json;

use crate::arens::{in_resolvent_set, shifted_inverse, ArensDecomposition};
use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix};
use crate::relation::LinearRelation;
use crate::report::CheckReport;
use crate::schatten::trace_norm;
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

use super::relative_residual;
use super::scenario::{AdditiveScenario, PerturbationScenario};

fn guard(id: &str, reference: &str, checks: &[(bool, &str)]) -> Option<CheckReport> {
    checks
        .iter()
        .find(|(holds, _)| !holds)
        .map(|(_, reason)| CheckReport::hypothesis_violated(id, reference, reason))
}

fn or_report(id: &str, reference: &str, r: Result<CheckReport>) -> CheckReport {
    r.unwrap_or_else(|e| CheckReport::from_error(id, reference, &e))
}

struct Parts {
    s: ArensDecomposition,
    t: ArensDecomposition,
    a: ArensDecomposition,
    domain: Subspace,
}

impl Parts {
    fn new(sc: &AdditiveScenario, tol: &Tolerances) -> Result<Self> {
        Ok(Self {
            s: ArensDecomposition::new(sc.s(), tol)?,
            t: ArensDecomposition::new(sc.t(), tol)?,
            a: ArensDecomposition::new(sc.a(), tol)?,
            domain: sc.s().domain(tol),
        })
    }

    /// Operator part matrices restricted to a basis of `D`.
    fn on_domain(&self) -> (CMatrix, CMatrix, CMatrix) {
        let q = self.domain.basis();
        let m = |d: &ArensDecomposition| d.op_part_matrix.canonical_matrix() * q;
        (m(&self.t), m(&self.s), m(&self.a))
    }
}

/// The chain for `T = S + A` with `D(S) = D(T) ⊂ D(A)`: domains and ranges
/// of the operator parts, `T_s = P_{T(0)^⊥}(S_s + A_s)` on `D`, the reduced
/// form `T_s = S_s + P_{S(0)^⊥}A_s` when `A(0) ⊂ S(0)`, and, for
/// self-adjoint `S` with Hermitian `T` and `A`, `A(0) ⊂ S(0) = T(0)` and
/// (when `S(0)^⊥ ⊂ D(A)`) self-adjointness of `T`.
pub fn additive_build(sc: &AdditiveScenario, tol: &Tolerances) -> Vec<CheckReport> {
    const IDS: [(&str, &str); 3] = [
        ("operator_part_domains_and_ranges", "Eqs (3.25)-(3.26)"),
        ("operator_part_of_sum", "Lemma 3.2, Eq (3.24)"),
        ("operator_part_of_sum_reduced", "Proposition 3.3, Eq (3.27)"),
    ];
    let f = sc.flags();
    let chain = if f.domains_equal_in_a_domain {
        sum_chain(sc, &IDS, tol)
    } else {
        Err(Error::HypothesisViolated("D(S) = D(T) ⊂ D(A) fails".into()))
    };
    let mut out = chain.unwrap_or_else(|e| {
        IDS.iter()
            .map(|(id, reference)| CheckReport::from_error(id, reference, &e))
            .collect()
    });

    let hermitian_regime = [
        (f.domains_equal_in_a_domain, "D(S) = D(T) ⊂ D(A) fails"),
        (f.s_self_adjoint, "S is not self-adjoint"),
        (f.t_hermitian, "T is not Hermitian"),
        (f.a_hermitian, "A is not Hermitian"),
    ];
    const L34: (&str, &str) = ("sum_keeps_mul_part", "Lemma 3.4, Eq (3.37)");
    out.push(
        guard(L34.0, L34.1, &hermitian_regime).unwrap_or_else(|| {
            CheckReport::predicate(L34.0, L34.1, f.a_mul_in_s_mul && f.equal_mul_parts)
                .with_detail("a_mul_in_s_mul", f.a_mul_in_s_mul)
                .with_detail("equal_mul_parts", f.equal_mul_parts)
        }),
    );
    const C33: (&str, &str) = ("sum_stays_self_adjoint", "Corollary 3.3");
    let mut c33 = hermitian_regime.to_vec();
    c33.push((f.s_mul_perp_in_a_domain, "S(0)^⊥ ⊄ D(A)"));
    out.push(guard(C33.0, C33.1, &c33).unwrap_or_else(|| {
        CheckReport::predicate(C33.0, C33.1, f.a_mul_in_s_mul && f.t_self_adjoint)
            .with_detail("t_self_adjoint", f.t_self_adjoint)
    }));
    out
}

fn sum_chain(sc: &AdditiveScenario, ids: &[(&str, &str); 3], tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let p = Parts::new(sc, tol)?;
    let ranges = domains_and_ranges(sc, &p, tol)?;
    let (mt, ms, ma) = p.on_domain();
    let t_perp = p.t.mul_space().complement(tol).projection_matrix();
    let rhs24 = t_perp * (&ms + &ma);
    let sum = CheckReport::identity(ids[1].0, ids[1].1, relative_residual(&mt, &rhs24), tol.eps_eq);
    let reduced = if sc.flags().a_mul_in_s_mul {
        let s_perp = p.s.mul_space().complement(tol).projection_matrix();
        let rhs27 = &ms + s_perp * &ma;
        CheckReport::identity(ids[2].0, ids[2].1, relative_residual(&mt, &rhs27), tol.eps_eq)
    } else {
        CheckReport::hypothesis_violated(ids[2].0, ids[2].1, "A(0) ⊄ S(0)")
    };
    Ok(vec![ranges, sum, reduced])
}

fn domains_and_ranges(sc: &AdditiveScenario, p: &Parts, tol: &Tolerances) -> Result<CheckReport> {
    let d = &p.domain;
    let dom = |x: &ArensDecomposition| x.op_part.domain(tol);
    let perp_of_range = |x: &ArensDecomposition| -> Result<bool> {
        let range = x.op_part.range(tol);
        let cross = x.mul_space().basis().adjoint() * range.basis();
        Ok(matrix::op_norm(&cross) <= tol.eps_eq)
    };
    let domains = dom(&p.t).equals(d, tol) && dom(&p.s).equals(d, tol) && dom(&p.a).equals(&sc.a().domain(tol), tol);
    let ranges = perp_of_range(&p.t)? && perp_of_range(&p.s)? && perp_of_range(&p.a)?;
    Ok(CheckReport::predicate("operator_part_domains_and_ranges", "Eqs (3.25)-(3.26)", domains && ranges)
        .with_detail("domains", domains)
        .with_detail("ranges", ranges))
}

/// `(T−λ)⁻¹(T−S) = (T_s−λ)⁻¹(T_s−S_s)` and
/// `(T−λ)⁻¹ − (S−λ)⁻¹ = −(T_s−λ)⁻¹(T_s−S_s)(S−λ)⁻¹` as relations, when
/// `S(0) = T(0)` and `D(S) = D(T) ⊂ S(0)^⊥`. Holds for every `λ`.
pub fn check_resolvent_product_identities(sc: &PerturbationScenario, lambda: Complex64, tol: &Tolerances) -> CheckReport {
    const ID: &str = "resolvent_product_identities";
    const REF: &str = "Lemma 3.3, Eq (3.28); Proposition 3.4, Eq (3.34)";
    let f = sc.flags();
    let hyps = [
        (f.equal_mul_parts, "S(0) ≠ T(0)"),
        (f.equal_domains, "D(S) ≠ D(T)"),
        (f.domains_in_mul_perp, "D(S) ⊄ S(0)^⊥"),
    ];
    if let Some(hv) = guard(ID, REF, &hyps) {
        return hv;
    }
    or_report(ID, REF, product_identities(sc, lambda, tol))
}

fn product_identities(sc: &PerturbationScenario, lambda: Complex64, tol: &Tolerances) -> Result<CheckReport> {
    let (s, t) = (sc.s(), sc.t());
    let minus_one = Complex64::new(-1.0, 0.0);
    let t_s = ArensDecomposition::new(t, tol)?.op_part;
    let s_s = ArensDecomposition::new(s, tol)?.op_part;
    let inv_shift = |r: &LinearRelation| -> Result<LinearRelation> { Ok(r.shift_scalar(lambda, tol)?.inverse()) };
    let (rt, rs, rts) = (inv_shift(t)?, inv_shift(s)?, inv_shift(&t_s)?);
    let op_diff = t_s.sub(&s_s, tol)?;

    let u1 = rt.compose(&t.sub(s, tol)?, tol)?;
    let u2 = rts.compose(&op_diff, tol)?;
    let r28 = CheckReport::identity("resolvent_times_difference", "Lemma 3.3, Eq (3.28)", u1.graph_gap(&u2), tol.eps_eq);

    let v1 = rt.sub(&rs, tol)?;
    let v2 = rts.compose(&op_diff.compose(&rs, tol)?, tol)?.scalar_mul(minus_one, tol);
    let r34 = CheckReport::identity(
        "resolvent_difference_factorization",
        "Proposition 3.4, Eq (3.34)",
        v1.graph_gap(&v2),
        tol.eps_eq,
    );
    let in_rho = in_resolvent_set(s, lambda, tol)? && in_resolvent_set(t, lambda, tol)?;
    Ok(
        CheckReport::merge("resolvent_product_identities", "Lemma 3.3, Eq (3.28); Proposition 3.4, Eq (3.34)", &[r28, r34])
            .with_detail("lambda", json!([lambda.re, lambda.im]))
            .with_detail("lambda_in_common_resolvent_set", in_rho),
    )
}

/// For Hermitian `S`, `A` and `T = S + A` with `A(0) ⊂ S(0)` and
/// `S(0)^⊥ ⊂ D(A)`, at `λ ∈ ρ(S) ∩ ρ(T)`:
/// `(T−λ)⁻¹ − (S−λ)⁻¹ = −(T_s−λ)⁻¹ C (S−λ)⁻¹` where `C` is the compression
/// of `A_s` to `S(0)^⊥`. Also checks the trace norm estimate
/// `‖(T−λ)⁻¹ − (S−λ)⁻¹‖₁ ≤ ‖(T_s−λ)⁻¹‖ ‖C‖₁ ‖(S−λ)⁻¹‖` and
/// `rank((T−λ)⁻¹ − (S−λ)⁻¹) ≤ rank C`.
pub fn check_compressed_resolvent_difference(
    sc: &AdditiveScenario,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    let f = sc.flags();
    let hyps = [
        (f.s_hermitian, "S is not Hermitian"),
        (f.t_hermitian, "T is not Hermitian"),
        (f.a_hermitian, "A is not Hermitian"),
        (f.domains_equal_in_a_domain, "D(S) = D(T) ⊂ D(A) fails"),
        (f.a_mul_in_s_mul, "A(0) ⊄ S(0)"),
        (f.s_mul_perp_in_a_domain, "S(0)^⊥ ⊄ D(A)"),
    ];
    if let Some((_, reason)) = hyps.iter().find(|(holds, _)| !holds) {
        return Err(Error::HypothesisViolated((*reason).into()));
    }
    let (s, t) = (sc.s(), sc.t());
    if !(in_resolvent_set(s, lambda, tol)? && in_resolvent_set(t, lambda, tol)?) {
        return Err(Error::NotInResolventSet(format!("{lambda} is not in ρ(S) ∩ ρ(T)")));
    }
    let r_t = shifted_inverse(t, lambda, tol)?;
    let r_s = shifted_inverse(s, lambda, tol)?;
    let lhs = &r_t - &r_s;

    let ds = ArensDecomposition::new(s, tol)?;
    let dt = ArensDecomposition::new(t, tol)?;
    let da = ArensDecomposition::new(sc.a(), tol)?;
    let perp = ds.mul_space().complement(tol);
    let q = perp.basis();
    let k = perp.dim();
    let compressed = q.adjoint() * da.op_part_matrix.canonical_matrix() * q;
    let g = if k == 0 {
        matrix::zeros(0, 0)
    } else {
        shifted_inverse(&dt.op_part.restrict(&perp, &perp, tol)?, lambda, tol)?
    };
    let rhs = -(q * &g * &compressed * q.adjoint() * &r_s);

    let lambda_detail = json!([lambda.re, lambda.im]);
    let identity = CheckReport::identity(
        "compressed_resolvent_difference",
        "Theorem 3.6, Eq (3.36)",
        relative_residual(&lhs, &rhs),
        tol.eps_eq,
    )
    .with_detail("lambda", lambda_detail.clone());

    let lhs_norm = trace_norm(&lhs);
    let c_norm = trace_norm(&compressed);
    let bound = matrix::op_norm(&g) * c_norm * matrix::op_norm(&r_s);
    let estimate = CheckReport::inequality(
        "compressed_resolvent_trace_bound",
        "Theorem 3.6 with Lemma 2.6",
        bound - lhs_norm,
        tol.eps_eq,
    )
    .with_detail("difference_trace_norm", lhs_norm)
    .with_detail("compression_trace_norm", c_norm)
    .with_detail("bound", bound);

    // Ranks use cutoffs on the scale of the inputs so round-off in a zero
    // difference is not counted.
    let rank_above = |m: &CMatrix, scale: f64| matrix::singular_values(m).iter().filter(|&&v| v > tol.eps_eq * scale.max(1.0)).count();
    let resolvent_scale = matrix::op_norm(&r_t).max(matrix::op_norm(&r_s));
    let diff_rank = rank_above(&lhs, resolvent_scale);
    let c_rank = rank_above(&compressed, da.op_part_matrix.norm());
    let rank = CheckReport::predicate("resolvent_difference_rank", "Theorem 3.6(ii)", diff_rank <= c_rank)
        .with_detail("difference_rank", diff_rank)
        .with_detail("compression_rank", c_rank)
        .with_detail("a_domain_full", sc.a().domain(tol).dim() == sc.a().dim_x());
    Ok(vec![identity, estimate, rank])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, from_real_rows};
    use crate::report::Status;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// Self-adjoint `S = graph(H on M^⊥) ⊕ ({0} × M)` with `M = span{e3}`.
    fn self_adjoint_with_mul() -> LinearRelation {
        let mut h = matrix::zeros(3, 3);
        h.view_mut((0, 0), (2, 2))
            .copy_from(&from_real_rows(&[&[1.0, 0.5], &[0.5, -2.0]]));
        LinearRelation::from_parts(
            &Subspace::coordinate(3, &[0, 1]),
            &h,
            &Subspace::coordinate(3, &[2]),
            &tol(),
        )
        .unwrap()
    }

    fn hermitian_operator() -> LinearRelation {
        LinearRelation::from_matrix(&from_real_rows(&[&[0.3, 0.1, 0.7], &[0.1, -0.4, 0.2], &[0.7, 0.2, 1.0]]))
    }

    #[test]
    fn zero_perturbation_keeps_operator_part() {
        let s = self_adjoint_with_mul();
        let a = LinearRelation::from_matrix(&matrix::zeros(3, 3));
        let sc = AdditiveScenario::new(s, a, &tol()).unwrap();
        for r in additive_build(&sc, &tol()) {
            assert!(r.passed(), "{r:?}");
        }
        for r in check_compressed_resolvent_difference(&sc, c64(0.0, 1.0), &tol()).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn hermitian_operator_perturbation() {
        let sc = AdditiveScenario::new(self_adjoint_with_mul(), hermitian_operator(), &tol()).unwrap();
        assert!(sc.flags().t_self_adjoint);
        for r in additive_build(&sc, &tol()) {
            assert!(r.passed(), "{r:?}");
        }
        let pair = sc.pair(&tol()).unwrap();
        for lambda in [c64(0.0, 1.0), c64(0.0, -1.0), c64(1.0, 1.0), c64(0.5, 0.0)] {
            let r = check_resolvent_product_identities(&pair, lambda, &tol());
            assert!(r.passed(), "{lambda}: {r:?}");
        }
        for r in check_compressed_resolvent_difference(&sc, c64(1.0, 1.0), &tol()).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn commuting_hermitian_graphs_match_matrix_resolvents() {
        let s = LinearRelation::from_matrix(&from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]));
        let a = LinearRelation::from_matrix(&from_real_rows(&[&[0.5, 0.0], &[0.0, -1.0]]));
        let sc = AdditiveScenario::new(s, a, &tol()).unwrap();
        let checks = check_compressed_resolvent_difference(&sc, c64(0.0, 1.0), &tol()).unwrap();
        assert!(checks.iter().all(CheckReport::passed));
        // diag(1/(1.5 − i) − 1/(1 − i), 1/(1 − i) − 1/(2 − i)) has trace norm
        // equal to the sum of the moduli.
        let i = c64(0.0, 1.0);
        let d1 = (c64(1.5, 0.0) - i).inv() - (c64(1.0, 0.0) - i).inv();
        let d2 = (c64(1.0, 0.0) - i).inv() - (c64(2.0, 0.0) - i).inv();
        let got = checks[1].details["difference_trace_norm"].as_f64().unwrap();
        assert!((got - d1.norm() - d2.norm()).abs() < 1e-12);
    }

    #[test]
    fn rank_one_perturbation_has_rank_one_difference() {
        let v = from_real_rows(&[&[0.6], &[0.8], &[0.0]]);
        let a = LinearRelation::from_matrix(&(&v * v.adjoint() * c64(2.0, 0.0)));
        let sc = AdditiveScenario::new(self_adjoint_with_mul(), a, &tol()).unwrap();
        let checks = check_compressed_resolvent_difference(&sc, c64(0.0, -1.0), &tol()).unwrap();
        assert!(checks.iter().all(CheckReport::passed), "{checks:?}");
        assert_eq!(checks[2].details["difference_rank"], 1);
    }

    #[test]
    fn multivalued_perturbation_inside_s_mul() {
        // A = {(x, a x₁ e1 + m) : m ∈ span{e3}}, Hermitian with A(0) ⊂ S(0).
        let mut op = matrix::zeros(3, 3);
        op[(0, 0)] = c64(0.7, 0.0);
        let a = LinearRelation::from_parts(
            &Subspace::coordinate(3, &[0, 1]),
            &op,
            &Subspace::coordinate(3, &[2]),
            &tol(),
        )
        .unwrap();
        let sc = AdditiveScenario::new(self_adjoint_with_mul(), a, &tol()).unwrap();
        assert!(sc.flags().a_mul_in_s_mul);
        for r in additive_build(&sc, &tol()) {
            assert!(r.passed(), "{r:?}");
        }
        let pair = sc.pair(&tol()).unwrap();
        assert!(check_resolvent_product_identities(&pair, c64(0.0, 1.0), &tol()).passed());
    }

    #[test]
    fn foreign_mul_part_skips_the_reduced_form() {
        // S = graph(diag(1, 2)), A = {0} × span{e1}: T = S + A gains a
        // multivalued part, so A(0) ⊄ S(0).
        let s = LinearRelation::from_matrix(&from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]));
        let a = LinearRelation::from_parts(
            &Subspace::full(2),
            &matrix::zeros(2, 2),
            &Subspace::coordinate(2, &[0]),
            &tol(),
        )
        .unwrap();
        let sc = AdditiveScenario::new(s, a, &tol()).unwrap();
        let reports = additive_build(&sc, &tol());
        let by_id = |id: &str| reports.iter().find(|r| r.check_id == id).unwrap();
        assert!(by_id("operator_part_of_sum").passed());
        assert_eq!(by_id("operator_part_of_sum_reduced").status, Status::HypothesisViolated);
        let r = check_compressed_resolvent_difference(&sc, c64(0.0, 1.0), &tol());
        assert!(matches!(r, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn product_identities_require_common_mul_part() {
        let s = self_adjoint_with_mul();
        let t = hermitian_operator();
        let pair = PerturbationScenario::new(s, t, None, &tol()).unwrap();
        let r = check_resolvent_product_identities(&pair, c64(0.0, 1.0), &tol());
        assert_eq!(r.status, Status::HypothesisViolated);
    }
}
