//! Seeded random subspaces, relations and scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{c64, CMatrix};
use crate::perturbation::{is_in_gamma_set, AdditiveScenario};
use crate::relation::{LinearRelation, OperatorOnSubspace};
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

use super::config::{GeneratorConfig, RelationClass};

pub type TrialRng = ChaCha8Rng;

/// Generator for one trial: the seed picks the key and the trial index
/// picks an independent stream, so trials can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Entries `(a + ib)/√2` with `a, b` standard normal.
pub fn gaussian(rows: usize, cols: usize, rng: &mut TrialRng) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re * scale, im * scale)
    })
}

pub fn random_hermitian(n: usize, rng: &mut TrialRng) -> CMatrix {
    let g = gaussian(n, n, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-distributed `r`-dimensional subspace of `C^dim`.
pub fn random_subspace(dim: usize, r: usize, rng: &mut TrialRng) -> Result<Subspace> {
    if r > dim {
        return Err(Error::InvalidInput(format!("subspace of dimension {r} in C^{dim}")));
    }
    let tol = Tolerances::default();
    for _ in 0..8 {
        let s = Subspace::span(&gaussian(dim, r, rng), &tol)?;
        if s.dim() == r {
            return Ok(s);
        }
    }
    Err(Error::InvalidInput("gaussian columns kept coming out dependent".into()))
}

/// Random `r`-dimensional subspace of `parent`.
pub fn random_subspace_in(parent: &Subspace, r: usize, rng: &mut TrialRng) -> Result<Subspace> {
    let inner = random_subspace(parent.dim(), r, rng)?;
    Ok(Subspace::from_orthonormal(parent.basis() * inner.basis()))
}

/// Gaussian operator on `domain`, zero on its complement.
pub fn random_operator_on(domain: &Subspace, dim_y: usize, rng: &mut TrialRng) -> OperatorOnSubspace {
    let m = gaussian(dim_y, domain.ambient_dim(), rng) * domain.projection_matrix();
    OperatorOnSubspace::new(domain.clone(), m).expect("shapes agree by construction")
}

/// `{(x, Bx + m) : x ∈ D, m ∈ M}` with Gaussian `B`.
pub fn generic_relation(dim: usize, domain_dim: usize, mul_dim: usize, rng: &mut TrialRng) -> Result<LinearRelation> {
    let d = random_subspace(dim, domain_dim, rng)?;
    let m = random_subspace(dim, mul_dim, rng)?;
    LinearRelation::from_parts(&d, &gaussian(dim, dim, rng), &m, &Tolerances::default())
}

/// `{(x, Hx + m) : x ∈ D, m ∈ M}` with `H` Hermitian on `M^⊥` and
/// `D ⊂ M^⊥`; Hermitian, and self-adjoint exactly when `D = M^⊥`.
pub fn hermitian_relation_on(mul: &Subspace, domain: &Subspace, rng: &mut TrialRng) -> Result<LinearRelation> {
    let tol = Tolerances::default();
    let q = mul.complement(&tol);
    let h = random_hermitian(q.dim(), rng);
    let op = q.basis() * h * q.basis().adjoint();
    LinearRelation::from_parts(domain, &op, mul, &tol)
}

/// Self-adjoint relation `graph(H) ⊕ ({0} × M)` with `H` Hermitian on
/// `M^⊥`.
pub fn self_adjoint_relation(mul: &Subspace, rng: &mut TrialRng) -> Result<LinearRelation> {
    let perp = mul.complement(&Tolerances::default());
    hermitian_relation_on(mul, &perp, rng)
}

fn invariant(holds: bool, what: &str) -> Result<()> {
    if holds {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("generated instance is not {what}")))
    }
}

/// One relation of the configured class, with the class predicate
/// recomputed before it is returned. The `additive` class returns `S`;
/// use [`random_additive`] for the triple.
pub fn random_relation(cfg: &GeneratorConfig, rng: &mut TrialRng) -> Result<LinearRelation> {
    cfg.validate()?;
    let tol = Tolerances::default();
    let (d, m) = (cfg.dim, cfg.mul_dim);
    match cfg.class {
        RelationClass::Generic | RelationClass::All => {
            let g = cfg.graph_dim_for(RelationClass::Generic);
            let t = generic_relation(d, g - m, m, rng)?;
            invariant(t.dim() == g && t.mul_part_space(&tol).dim() == m, "of the requested dimensions")?;
            Ok(t)
        }
        RelationClass::GammaAdmissible => {
            let t = generic_relation(d, d - m, m, rng)?;
            invariant(t.dim() == d, "of the requested dimensions")?;
            Ok(t)
        }
        RelationClass::Hermitian => {
            let mul = random_subspace(d, m, rng)?;
            let perp = mul.complement(&tol);
            let k = cfg.graph_dim_for(RelationClass::Hermitian) - m;
            let domain = random_subspace_in(&perp, k, rng)?;
            let t = hermitian_relation_on(&mul, &domain, rng)?;
            invariant(t.is_hermitian(&tol)?, "Hermitian")?;
            Ok(t)
        }
        RelationClass::SelfAdjoint | RelationClass::Additive => {
            let mul = random_subspace(d, m, rng)?;
            let t = self_adjoint_relation(&mul, rng)?;
            invariant(t.is_self_adjoint(&tol)?, "self-adjoint")?;
            Ok(t)
        }
    }
}

/// Shapes of the perturbation in additive scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditiveVariant {
    /// Hermitian matrix defined everywhere.
    HermitianOperator,
    /// Hermitian relation with `A(0) ⊂ S(0)` and `D(A) = A(0)^⊥`.
    HermitianMultivalued,
    /// Rank-one Hermitian matrix.
    FiniteRank,
    /// Non-Hermitian `S` and a relation `A` whose multivalued part leaves
    /// `S(0)`.
    Generic,
}

impl AdditiveVariant {
    pub const ALL: [AdditiveVariant; 4] = [
        AdditiveVariant::HermitianOperator,
        AdditiveVariant::HermitianMultivalued,
        AdditiveVariant::FiniteRank,
        AdditiveVariant::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdditiveVariant::HermitianOperator => "hermitian_operator",
            AdditiveVariant::HermitianMultivalued => "hermitian_multivalued",
            AdditiveVariant::FiniteRank => "finite_rank",
            AdditiveVariant::Generic => "generic",
        }
    }
}

/// `(S, A, T = S + A)` with `D(S) = D(T) ⊂ D(A)` checked after
/// construction.
pub fn random_additive(cfg: &GeneratorConfig, variant: AdditiveVariant, rng: &mut TrialRng) -> Result<AdditiveScenario> {
    cfg.validate()?;
    let tol = Tolerances::default();
    let (d, m) = (cfg.dim, cfg.mul_dim);
    let mul = random_subspace(d, m, rng)?;
    let (s, a) = match variant {
        AdditiveVariant::HermitianOperator => {
            let s = self_adjoint_relation(&mul, rng)?;
            (s, LinearRelation::from_matrix(&random_hermitian(d, rng)))
        }
        AdditiveVariant::HermitianMultivalued => {
            let s = self_adjoint_relation(&mul, rng)?;
            let n = random_subspace_in(&mul, m / 2 + m % 2, rng)?;
            (s, self_adjoint_relation(&n, rng)?)
        }
        AdditiveVariant::FiniteRank => {
            let s = self_adjoint_relation(&mul, rng)?;
            let v = random_subspace(d, 1, rng)?;
            let weight: f64 = rng.random_range(0.5..2.0);
            let a = v.projection_matrix() * c64(weight, 0.0);
            (s, LinearRelation::from_matrix(&a))
        }
        AdditiveVariant::Generic => {
            let s = generic_relation(d, d - m, m, rng)?;
            let extra = random_subspace(d, 1.min(d), rng)?;
            let a = LinearRelation::from_parts(&Subspace::full(d), &gaussian(d, d, rng), &extra, &tol)?;
            (s, a)
        }
    };
    let sc = AdditiveScenario::new(s, a, &tol)?;
    invariant(sc.flags().domains_equal_in_a_domain, "an additive scenario with D(S) = D(T) ⊂ D(A)")?;
    if variant != AdditiveVariant::Generic {
        let f = sc.flags();
        invariant(f.s_self_adjoint && f.a_hermitian && f.a_mul_in_s_mul, "a Hermitian additive scenario")?;
    }
    Ok(sc)
}

/// `(S, T, A)` with `A ∈ Γ(S, T)`: two relations with `dim T = dim X`
/// and a Gaussian `A` defined everywhere.
pub fn random_gamma_triple(
    cfg: &GeneratorConfig,
    rng: &mut TrialRng,
) -> Result<(LinearRelation, LinearRelation, OperatorOnSubspace)> {
    let gcfg = GeneratorConfig {
        class: RelationClass::GammaAdmissible,
        ..cfg.clone()
    };
    let tol = Tolerances::default();
    for _ in 0..8 {
        let s = random_relation(&gcfg, rng)?;
        let t = random_relation(&gcfg, rng)?;
        let a = OperatorOnSubspace::everywhere(gaussian(cfg.dim, cfg.dim, rng));
        if is_in_gamma_set(&s, &t, &a, &tol) {
            return Ok((s, t, a));
        }
    }
    Err(Error::InvalidInput("no admissible operator found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(class: RelationClass) -> GeneratorConfig {
        GeneratorConfig {
            class,
            ..GeneratorConfig::default()
        }
    }

    #[test]
    fn subspace_dimensions() {
        let mut rng = trial_rng(1, 0);
        assert!(random_subspace(4, 0, &mut rng).unwrap().is_zero());
        assert_eq!(random_subspace(4, 4, &mut rng).unwrap().dim(), 4);
        assert!(matches!(random_subspace(3, 4, &mut rng), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn independent_small_subspaces_meet_trivially() {
        let mut rng = trial_rng(2, 0);
        let tol = Tolerances::default();
        for _ in 0..20 {
            let a = random_subspace(6, 2, &mut rng).unwrap();
            let b = random_subspace(6, 3, &mut rng).unwrap();
            assert!(a.intersect(&b, &tol).unwrap().is_zero());
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = gaussian(2, 2, &mut trial_rng(9, 3));
        let b = gaussian(2, 2, &mut trial_rng(9, 3));
        let c = gaussian(2, 2, &mut trial_rng(9, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn classes_satisfy_their_predicates() {
        let tol = Tolerances::default();
        let mut rng = trial_rng(5, 0);
        let g = random_relation(&cfg(RelationClass::Generic), &mut rng).unwrap();
        assert_eq!(g.dim(), 6);
        let h = random_relation(&cfg(RelationClass::Hermitian), &mut rng).unwrap();
        assert!(h.is_hermitian(&tol).unwrap());
        assert!(!h.is_self_adjoint(&tol).unwrap());
        let s = random_relation(&cfg(RelationClass::SelfAdjoint), &mut rng).unwrap();
        assert!(s.is_self_adjoint(&tol).unwrap());
        assert_eq!(s.mul_part_space(&tol).dim(), 2);
    }

    #[test]
    fn operator_graph_when_graph_fills_x() {
        let c = GeneratorConfig {
            mul_dim: 0,
            ..cfg(RelationClass::Generic)
        };
        let t = random_relation(&c, &mut trial_rng(0, 0)).unwrap();
        let tol = Tolerances::default();
        assert!(t.is_single_valued(&tol));
        assert_eq!(t.domain(&tol).dim(), 6);
    }

    #[test]
    fn additive_variants_hold_their_flags() {
        let c = cfg(RelationClass::Additive);
        for (k, v) in AdditiveVariant::ALL.into_iter().enumerate() {
            let sc = random_additive(&c, v, &mut trial_rng(7, k as u64)).unwrap();
            assert!(sc.flags().domains_equal_in_a_domain);
            if v == AdditiveVariant::Generic {
                assert!(!sc.flags().a_mul_in_s_mul);
            }
        }
    }

    #[test]
    fn gamma_triples_are_admissible() {
        let c = cfg(RelationClass::GammaAdmissible);
        let (s, t, a) = random_gamma_triple(&c, &mut trial_rng(3, 0)).unwrap();
        assert!(is_in_gamma_set(&s, &t, &a, &Tolerances::default()));
    }
}
