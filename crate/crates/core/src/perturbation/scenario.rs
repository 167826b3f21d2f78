use num_complex::Complex64;
use serde::Serialize;

use crate::arens::in_resolvent_set;
use crate::error::{Error, Result};
use crate::matrix;
use crate::relation::{LinearRelation, OperatorOnSubspace};
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

/// Default λ sample for pointwise resolvent identities. The nonreal points
/// lie in the resolvent set of every self-adjoint relation.
pub const DEFAULT_LAMBDAS: [Complex64; 4] = [
    Complex64::new(0.0, 1.0),
    Complex64::new(0.0, -1.0),
    Complex64::new(1.0, 1.0),
    Complex64::new(2.0, 0.0),
];

/// Which standing hypotheses hold for a pair `(S, T)` and an optional
/// bounded `A`. Always recomputed from the relations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisFlags {
    /// `D(S) ∪ D(T) ⊂ D(A)`; absent without `A`.
    pub domains_in_a_domain: Option<bool>,
    /// `S(0) = T(0)`.
    pub equal_mul_parts: bool,
    /// `D(S) = D(T)`.
    pub equal_domains: bool,
    /// `D(S) ∪ D(T) ⊂ S(0)^⊥ ∩ T(0)^⊥`.
    pub domains_in_mul_perp: bool,
    pub s_hermitian: Option<bool>,
    pub t_hermitian: Option<bool>,
    pub s_self_adjoint: Option<bool>,
    pub t_self_adjoint: Option<bool>,
    /// First point of [`DEFAULT_LAMBDAS`] in `ρ(S) ∩ ρ(T)`.
    pub resolvent_witness: Option<Complex64>,
}

/// A pair `(S, T)` and an optional bounded operator `A`.
#[derive(Debug, Clone)]
pub struct PerturbationScenario {
    s: LinearRelation,
    t: LinearRelation,
    a: Option<OperatorOnSubspace>,
    flags: HypothesisFlags,
}

/// `space ⊂ other^⊥`.
fn is_orthogonal_to(space: &Subspace, other: &Subspace, tol: &Tolerances) -> bool {
    matrix::op_norm(&(other.basis().adjoint() * space.basis())) <= tol.eps_eq
}

impl PerturbationScenario {
    pub fn new(s: LinearRelation, t: LinearRelation, a: Option<OperatorOnSubspace>, tol: &Tolerances) -> Result<Self> {
        if s.dim_x() != t.dim_x() || s.dim_y() != t.dim_y() {
            return Err(Error::mismatch("scenario relations", s.dim_x(), t.dim_x()));
        }
        if let Some(a) = &a {
            if a.dim_x() != s.dim_x() || a.dim_y() != s.dim_y() {
                return Err(Error::mismatch("scenario operator", s.dim_x(), a.dim_x()));
            }
        }
        let flags = Self::compute_flags(&s, &t, a.as_ref(), tol)?;
        Ok(Self { s, t, a, flags })
    }

    fn compute_flags(
        s: &LinearRelation,
        t: &LinearRelation,
        a: Option<&OperatorOnSubspace>,
        tol: &Tolerances,
    ) -> Result<HypothesisFlags> {
        let (ds, dt) = (s.domain(tol), t.domain(tol));
        let (ms, mt) = (s.mul_part_space(tol), t.mul_part_space(tol));
        let domains = ds.sum(&dt, tol)?;
        let domains_in_a_domain = a.map(|a| domains.is_subset_of(a.domain(), tol));
        let domains_in_mul_perp = is_orthogonal_to(&domains, &ms, tol) && is_orthogonal_to(&domains, &mt, tol);
        let square = s.dim_x() == s.dim_y();
        let (mut s_herm, mut t_herm, mut s_sa, mut t_sa, mut witness) = (None, None, None, None, None);
        if square {
            s_herm = Some(s.is_hermitian(tol)?);
            t_herm = Some(t.is_hermitian(tol)?);
            s_sa = Some(s.is_self_adjoint(tol)?);
            t_sa = Some(t.is_self_adjoint(tol)?);
            for &lambda in &DEFAULT_LAMBDAS {
                if in_resolvent_set(s, lambda, tol)? && in_resolvent_set(t, lambda, tol)? {
                    witness = Some(lambda);
                    break;
                }
            }
        }
        Ok(HypothesisFlags {
            domains_in_a_domain,
            equal_mul_parts: ms.equals(&mt, tol),
            equal_domains: ds.equals(&dt, tol),
            domains_in_mul_perp,
            s_hermitian: s_herm,
            t_hermitian: t_herm,
            s_self_adjoint: s_sa,
            t_self_adjoint: t_sa,
            resolvent_witness: witness,
        })
    }

    pub fn s(&self) -> &LinearRelation {
        &self.s
    }

    pub fn t(&self) -> &LinearRelation {
        &self.t
    }

    pub fn a(&self) -> Option<&OperatorOnSubspace> {
        self.a.as_ref()
    }

    pub fn flags(&self) -> &HypothesisFlags {
        &self.flags
    }

    /// The same pair with a different operator.
    pub fn with_operator(&self, a: Option<OperatorOnSubspace>, tol: &Tolerances) -> Result<Self> {
        Self::new(self.s.clone(), self.t.clone(), a, tol)
    }
}

/// Hypotheses of the additive setting `T = S + A`, recomputed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditiveFlags {
    /// `D(S) = D(T) ⊂ D(A)`.
    pub domains_equal_in_a_domain: bool,
    /// `A(0) ⊂ S(0)`.
    pub a_mul_in_s_mul: bool,
    /// `S(0)^⊥ ⊂ D(A)`.
    pub s_mul_perp_in_a_domain: bool,
    /// `S(0) = T(0)`.
    pub equal_mul_parts: bool,
    /// `D(S) ⊂ S(0)^⊥`.
    pub domain_in_s_mul_perp: bool,
    pub s_hermitian: bool,
    pub s_self_adjoint: bool,
    pub t_hermitian: bool,
    pub t_self_adjoint: bool,
    pub a_hermitian: bool,
}

/// `S`, a relation `A` and the computed sum `T = S + A` on a common space.
#[derive(Debug, Clone)]
pub struct AdditiveScenario {
    s: LinearRelation,
    a: LinearRelation,
    t: LinearRelation,
    flags: AdditiveFlags,
}

impl AdditiveScenario {
    pub fn new(s: LinearRelation, a: LinearRelation, tol: &Tolerances) -> Result<Self> {
        if s.dim_x() != s.dim_y() {
            return Err(Error::mismatch("additive scenario on X²", s.dim_x(), s.dim_y()));
        }
        if a.dim_x() != s.dim_x() || a.dim_y() != s.dim_y() {
            return Err(Error::mismatch("additive perturbation", s.dim_x(), a.dim_x()));
        }
        let t = s.add(&a, tol)?;
        let (ds, dt, da) = (s.domain(tol), t.domain(tol), a.domain(tol));
        let (ms, mt, ma) = (s.mul_part_space(tol), t.mul_part_space(tol), a.mul_part_space(tol));
        let s_perp = ms.complement(tol);
        let flags = AdditiveFlags {
            domains_equal_in_a_domain: ds.equals(&dt, tol) && ds.is_subset_of(&da, tol),
            a_mul_in_s_mul: ma.is_subset_of(&ms, tol),
            s_mul_perp_in_a_domain: s_perp.is_subset_of(&da, tol),
            equal_mul_parts: ms.equals(&mt, tol),
            domain_in_s_mul_perp: ds.is_subset_of(&s_perp, tol),
            s_hermitian: s.is_hermitian(tol)?,
            s_self_adjoint: s.is_self_adjoint(tol)?,
            t_hermitian: t.is_hermitian(tol)?,
            t_self_adjoint: t.is_self_adjoint(tol)?,
            a_hermitian: a.is_hermitian(tol)?,
        };
        Ok(Self { s, a, t, flags })
    }

    pub fn s(&self) -> &LinearRelation {
        &self.s
    }

    pub fn a(&self) -> &LinearRelation {
        &self.a
    }

    pub fn t(&self) -> &LinearRelation {
        &self.t
    }

    pub fn flags(&self) -> &AdditiveFlags {
        &self.flags
    }

    /// The pair `(S, T)` without the perturbation.
    pub fn pair(&self, tol: &Tolerances) -> Result<PerturbationScenario> {
        PerturbationScenario::new(self.s.clone(), self.t.clone(), None, tol)
    }
}
