//! Per-trial check routing and report assembly.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arens::{
    check_arens_reconstruction, check_eigenvalues_in_spectrum, check_hermitian_split, check_self_adjoint_equivalence,
    in_resolvent_set, operator_part_eigenvalues, spectrum_identities,
};
use crate::error::{Error, Result};
use crate::matrix::{self, c64, CVector};
use crate::perturbation::{
    additive_build, check_block_assembly, check_compressed_resolvent_difference, check_flip_isometry,
    check_resolvent_criterion, check_resolvent_product_identities, check_shift_gap_bounds, check_shift_sv_bounds,
    check_trace_class_equivalence, check_w_identities, gamma_membership, projection_gap, reduce_to_operator_parts,
    resolvent_blocks, PerturbationScenario, DEFAULT_LAMBDAS,
};
use crate::relation::{LinearRelation, OperatorOnSubspace};
use crate::relation_checks::{
    check_adjoint_involution, check_inverse_difference, check_rank_nullity, check_scaling_roundtrip, check_sum_recovery,
};
use crate::report::{CheckReport, Status};
use crate::schatten::{check_block_sv_bounds, check_block_trace_bounds, trace_norm_algebra_checks, BlockOperator};
use crate::tolerance::Tolerances;

use super::config::{GeneratorConfig, RelationClass};
use super::generate::{
    gaussian, hermitian_relation_on, random_additive, random_gamma_triple, random_relation, random_subspace,
    random_subspace_in, self_adjoint_relation, trial_rng, AdditiveVariant, TrialRng,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Slack allowed on the block singular value inequalities.
pub const BLOCK_SLACK: f64 = 1e-10;

/// Probe vectors per block operator for `‖Q_ij x‖ ≤ ‖P_j x‖`.
pub const BLOCK_PROBES: usize = 50;

/// Nonreal sample points for the resolvent identities.
pub const RESOLVENT_POINTS: [Complex64; 3] = [
    Complex64::new(0.0, 1.0),
    Complex64::new(0.0, -1.0),
    Complex64::new(1.0, 1.0),
];

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub class: RelationClass,
    pub trial: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub hypothesis_violated: usize,
    /// Largest residual among pass/fail records.
    pub max_residual: f64,
}

impl CheckTally {
    fn add(&mut self, r: &CheckReport) {
        self.total += 1;
        match r.status {
            Status::Pass => self.passed += 1,
            Status::Fail => self.failed += 1,
            Status::HypothesisViolated => self.hypothesis_violated += 1,
        }
        if r.status != Status::HypothesisViolated {
            self.max_residual = self.max_residual.max(r.residual);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(flatten)]
    pub overall: CheckTally,
    pub by_check: BTreeMap<String, CheckTally>,
    /// Largest `ratio/γ` seen by the shift gap bounds; informational.
    pub max_shift_ratio_over_gamma: Option<f64>,
    /// Only filled on request, since it breaks byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub schema: u32,
    pub version: String,
    pub config: GeneratorConfig,
    pub tolerances: Tolerances,
    pub trials: Vec<TrialResult>,
    pub summary: Summary,
}

impl ConformanceReport {
    fn assemble(cfg: &GeneratorConfig, tol: &Tolerances, trials: Vec<TrialResult>) -> Self {
        let mut overall = CheckTally::default();
        let mut by_check: BTreeMap<String, CheckTally> = BTreeMap::new();
        let mut ratio: Option<f64> = None;
        for r in trials.iter().flat_map(|t| &t.checks) {
            overall.add(r);
            by_check.entry(r.check_id.clone()).or_default().add(r);
            if r.check_id == "shift_gap_bounds" {
                if let Some(x) = r.details.get("ratio_over_gamma").and_then(|v| v.as_f64()) {
                    ratio = Some(ratio.map_or(x, |m| m.max(x)));
                }
            }
        }
        Self {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            tolerances: *tol,
            trials,
            summary: Summary {
                overall,
                by_check,
                max_shift_ratio_over_gamma: ratio,
                wall_time_seconds: None,
            },
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.overall.failed > 0
    }

    /// Every record with the given id, in trial order.
    pub fn records<'a>(&'a self, check_id: &'a str) -> impl Iterator<Item = &'a CheckReport> + 'a {
        self.trials.iter().flat_map(|t| &t.checks).filter(move |r| r.check_id == check_id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

fn jobs(cfg: &GeneratorConfig) -> Vec<(RelationClass, usize)> {
    cfg.class
        .expand()
        .into_iter()
        .flat_map(|c| (0..cfg.trials).map(move |k| (c, k)))
        .collect()
}

fn class_seed(seed: u64, class: RelationClass) -> u64 {
    seed.wrapping_add(class.key_index().wrapping_mul(GOLDEN))
}

/// Runs every applicable check on every trial, in parallel when the
/// `parallel` feature is on.
pub fn run_suite(cfg: &GeneratorConfig, tol: &Tolerances) -> Result<ConformanceReport> {
    #[cfg(feature = "parallel")]
    {
        run_suite_parallel(cfg, tol)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_suite_sequential(cfg, tol)
    }
}

pub fn run_suite_sequential(cfg: &GeneratorConfig, tol: &Tolerances) -> Result<ConformanceReport> {
    cfg.validate()?;
    tol.validate()?;
    let trials = jobs(cfg).into_iter().map(|(c, k)| run_trial(cfg, c, k, tol)).collect();
    Ok(ConformanceReport::assemble(cfg, tol, trials))
}

#[cfg(feature = "parallel")]
pub fn run_suite_parallel(cfg: &GeneratorConfig, tol: &Tolerances) -> Result<ConformanceReport> {
    use rayon::prelude::*;
    cfg.validate()?;
    tol.validate()?;
    let trials = jobs(cfg).into_par_iter().map(|(c, k)| run_trial(cfg, c, k, tol)).collect();
    Ok(ConformanceReport::assemble(cfg, tol, trials))
}

/// One trial of one class. Generation errors become a failed
/// `instance_generation` record.
pub fn run_trial(cfg: &GeneratorConfig, class: RelationClass, trial: usize, tol: &Tolerances) -> TrialResult {
    let mut rng = trial_rng(class_seed(cfg.seed, class), trial as u64);
    let ccfg = GeneratorConfig {
        class,
        ..cfg.clone()
    };
    let mut variant = None;
    let outcome = match class {
        RelationClass::Generic | RelationClass::All => generic_trial(&ccfg, &mut rng, tol),
        RelationClass::Hermitian => hermitian_trial(&ccfg, &mut rng, tol),
        RelationClass::SelfAdjoint => self_adjoint_trial(&ccfg, &mut rng, tol),
        RelationClass::Additive => {
            let v = AdditiveVariant::ALL[trial % AdditiveVariant::ALL.len()];
            variant = Some(v.name().to_string());
            additive_trial(&ccfg, v, &mut rng, tol)
        }
        RelationClass::GammaAdmissible => gamma_trial(&ccfg, &mut rng, tol),
    };
    let checks = outcome.unwrap_or_else(|e| vec![CheckReport::from_error("instance_generation", "generator", &e)]);
    TrialResult {
        class,
        trial,
        variant,
        checks,
    }
}

fn attempt(id: &str, reference: &str, r: Result<CheckReport>) -> CheckReport {
    r.unwrap_or_else(|e| CheckReport::from_error(id, reference, &e))
}

fn attempt_many(id: &str, reference: &str, r: Result<Vec<CheckReport>>) -> Vec<CheckReport> {
    r.unwrap_or_else(|e| vec![CheckReport::from_error(id, reference, &e)])
}

fn at_lambda(r: CheckReport, lambda: Complex64) -> CheckReport {
    r.with_detail("lambda", json!([lambda.re, lambda.im]))
}

fn product_identities(sc: &PerturbationScenario, tol: &Tolerances) -> Vec<CheckReport> {
    RESOLVENT_POINTS
        .iter()
        .map(|&l| at_lambda(check_resolvent_product_identities(sc, l, tol), l))
        .collect()
}

fn random_unit_scalar(rng: &mut TrialRng) -> Complex64 {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r: f64 = rng.random_range(0.5..2.0);
    Complex64::from_polar(r, theta)
}

fn random_block(dim: usize, rng: &mut TrialRng) -> Result<(BlockOperator, Vec<CVector>)> {
    let b = BlockOperator::new(
        gaussian(dim, dim, rng),
        gaussian(dim, dim, rng),
        gaussian(dim, dim, rng),
        gaussian(dim, dim, rng),
    )?;
    let probes = (0..BLOCK_PROBES).map(|_| gaussian(2 * dim, 1, rng).column(0).into_owned()).collect();
    Ok((b, probes))
}

fn generic_trial(cfg: &GeneratorConfig, rng: &mut TrialRng, tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let t = random_relation(cfg, rng)?;
    let s = random_relation(cfg, rng)?;
    let (dt, mt) = (t.domain(tol), t.mul_part_space(tol));
    let mut out = vec![
        check_arens_reconstruction(&t, tol)?,
        check_adjoint_involution(&t, tol),
        check_rank_nullity(&t, tol),
        check_scaling_roundtrip(&t, random_unit_scalar(rng), tol),
    ];

    out.push(attempt("difference_sum_recovery", "Lemma 2.1", check_sum_recovery(&s, &t, tol)));
    // D(S) ⊂ D(T) and T(0) ⊂ S(0), so S − T + T recovers S.
    let extra = random_subspace(cfg.dim, 1, rng)?;
    let recoverable = LinearRelation::from_parts(
        &random_subspace_in(&dt, dt.dim().saturating_sub(1), rng)?,
        &gaussian(cfg.dim, cfg.dim, rng),
        &mt.sum(&extra, tol)?,
        tol,
    )?;
    out.push(
        attempt("difference_sum_recovery", "Lemma 2.1", check_sum_recovery(&recoverable, &t, tol))
            .with_detail("constructed", true),
    );
    // S(0) ⊂ T(0) and D(S) ⊂ D(T).
    let nested = LinearRelation::from_parts(
        &random_subspace_in(&dt, dt.dim().saturating_sub(1), rng)?,
        &gaussian(cfg.dim, cfg.dim, rng),
        &random_subspace_in(&mt, mt.dim().saturating_sub(1), rng)?,
        tol,
    )?;
    out.push(attempt("inverse_difference", "Lemma 2.2", check_inverse_difference(&t, &nested, tol)));

    out.push(projection_gap(&s, &t)?.check_sup_distance(tol));
    out.push(attempt("inverse_gap_is_flipped_gap", "Proposition 3.2 proof", check_flip_isometry(&s, &t, tol)));

    let a = OperatorOnSubspace::everywhere(gaussian(cfg.dim, cfg.dim, rng));
    let sc = PerturbationScenario::new(s, t, Some(a), tol)?;
    out.push(check_shift_gap_bounds(&sc, tol));
    out.push(check_shift_sv_bounds(&sc, tol));

    let (b, probes) = random_block(cfg.dim, rng)?;
    out.extend(check_block_sv_bounds(&b, &probes, BLOCK_SLACK));
    out.extend(check_block_trace_bounds(&b, BLOCK_SLACK));
    out.push(trace_norm_algebra_checks(&b.q11, &b.q12, BLOCK_SLACK));
    Ok(out)
}

fn hermitian_trial(cfg: &GeneratorConfig, rng: &mut TrialRng, tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let t = random_relation(cfg, rng)?;
    let s = hermitian_relation_on(&t.mul_part_space(tol), &t.domain(tol), rng)?;
    let mut out = vec![
        check_arens_reconstruction(&t, tol)?,
        check_hermitian_split(&t, tol)?,
        spectrum_identities(&t, &DEFAULT_LAMBDAS, tol)?,
        check_self_adjoint_equivalence(&t, tol)?,
        check_adjoint_involution(&t, tol),
    ];
    let sc = PerturbationScenario::new(s, t, None, tol)?;
    out.push(reduce_to_operator_parts(&sc, tol));
    out.extend(product_identities(&sc, tol));
    Ok(out)
}

fn self_adjoint_trial(cfg: &GeneratorConfig, rng: &mut TrialRng, tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let t = random_relation(cfg, rng)?;
    let s = self_adjoint_relation(&t.mul_part_space(tol), rng)?;
    let mut sample = DEFAULT_LAMBDAS.to_vec();
    sample.extend(operator_part_eigenvalues(&t, tol)?.into_iter().map(|e| c64(e, 0.0)));
    let mut out = vec![
        check_arens_reconstruction(&t, tol)?,
        check_self_adjoint_equivalence(&t, tol)?,
        check_hermitian_split(&t, tol)?,
        spectrum_identities(&t, &sample, tol)?,
        check_eigenvalues_in_spectrum(&t, tol)?,
    ];
    let nonreal_in_rho = RESOLVENT_POINTS
        .iter()
        .map(|&l| Ok(in_resolvent_set(&t, l, tol)? && in_resolvent_set(&s, l, tol)?))
        .collect::<Result<Vec<bool>>>()?;
    out.push(CheckReport::predicate(
        "nonreal_points_in_resolvent_set",
        "Lemma 2.4",
        nonreal_in_rho.iter().all(|&b| b),
    ));
    let sc = PerturbationScenario::new(s, t, None, tol)?;
    out.push(reduce_to_operator_parts(&sc, tol));
    out.push(attempt(
        "resolvent_criterion",
        "Theorem 3.4",
        check_resolvent_criterion(&sc, &RESOLVENT_POINTS, tol),
    ));
    out.extend(product_identities(&sc, tol));
    Ok(out)
}

fn additive_trial(
    cfg: &GeneratorConfig,
    variant: AdditiveVariant,
    rng: &mut TrialRng,
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    let sc = random_additive(cfg, variant, rng)?;
    let mut out = additive_build(&sc, tol);
    let pair = sc.pair(tol)?;
    out.extend(product_identities(&pair, tol));
    for &l in &RESOLVENT_POINTS {
        let reports = attempt_many(
            "compressed_resolvent_difference",
            "Theorem 3.6",
            check_compressed_resolvent_difference(&sc, l, tol),
        );
        out.extend(reports.into_iter().map(|r| at_lambda(r, l)));
    }
    Ok(out)
}

/// `(T − A)⁻¹` is an everywhere defined operator exactly when the `Y`
/// rows of an orthonormal basis of `graph(T − A)` form an invertible
/// square matrix.
fn shifted_inverse_is_bounded(t: &LinearRelation, a: &OperatorOnSubspace, tol: &Tolerances) -> Result<bool> {
    let shifted = t.shift_by_operator(a, -1.0, tol)?.relation;
    let basis = shifted.graph().basis();
    if basis.ncols() != t.dim_y() {
        return Ok(false);
    }
    let y_rows = basis.rows(t.dim_x(), t.dim_y()).into_owned();
    let sv = matrix::singular_values(&y_rows);
    Ok(sv.last().is_none_or(|&s| s > tol.eps_rank.sqrt()))
}

fn gamma_trial(cfg: &GeneratorConfig, rng: &mut TrialRng, tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let (s, t, a) = random_gamma_triple(cfg, rng)?;
    let member = gamma_membership(&s, &t, &a, tol)?.is_member();
    let oracle = a.domain().dim() == a.dim_x()
        && shifted_inverse_is_bounded(&s, &a, tol)?
        && shifted_inverse_is_bounded(&t, &a, tol)?;
    let mut out = vec![CheckReport::predicate("gamma_membership", "Definition of Γ(S, T)", member && oracle)
        .with_detail("membership", member)
        .with_detail("rank_oracle", oracle)];
    let sc = PerturbationScenario::new(s, t, Some(a), tol)?;
    match resolvent_blocks(&sc, tol) {
        Ok(rb) => {
            out.extend(attempt_many(
                "resolvent_block_assembly",
                "Proposition 3.2, Eqs (3.13)-(3.17)",
                check_block_assembly(&sc, &rb, tol),
            ));
            out.push(check_w_identities(&rb, tol));
            out.push(attempt(
                "resolvent_trace_class_equivalence",
                "Proposition 3.2",
                check_trace_class_equivalence(&sc, &rb, tol),
            ));
        }
        Err(e) => out.push(CheckReport::from_error("resolvent_block_assembly", "Proposition 3.2", &e)),
    }
    out.push(check_shift_gap_bounds(&sc, tol));
    out.push(check_shift_sv_bounds(&sc, tol));
    let mut lambdas = Vec::new();
    for &l in &DEFAULT_LAMBDAS {
        if in_resolvent_set(sc.s(), l, tol)? && in_resolvent_set(sc.t(), l, tol)? {
            lambdas.push(l);
        }
    }
    let criterion = if lambdas.is_empty() {
        CheckReport::hypothesis_violated("resolvent_criterion", "Theorem 3.4", "no sample point in ρ(S) ∩ ρ(T)")
    } else {
        attempt("resolvent_criterion", "Theorem 3.4", check_resolvent_criterion(&sc, &lambdas, tol))
    };
    out.push(criterion);
    Ok(out)
}

/// Like [`run_trial`] but surfaces the generation error instead of
/// recording it.
pub fn try_run_trial(cfg: &GeneratorConfig, class: RelationClass, trial: usize, tol: &Tolerances) -> Result<TrialResult> {
    let r = run_trial(cfg, class, trial, tol);
    match r.checks.first() {
        Some(c) if c.check_id == "instance_generation" => Err(Error::InvalidInput(c.details.to_string())),
        _ => Ok(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(class: RelationClass, trials: usize) -> GeneratorConfig {
        GeneratorConfig {
            dim: 4,
            mul_dim: 1,
            graph_dim: None,
            seed: 42,
            trials,
            class,
        }
    }

    #[test]
    fn every_class_runs_without_generation_errors() {
        let tol = Tolerances::default();
        for class in RelationClass::CONCRETE {
            for k in 0..4 {
                let r = try_run_trial(&small(class, 1), class, k, &tol).unwrap();
                assert!(!r.checks.is_empty());
            }
        }
    }

    #[test]
    fn only_the_block_tail_bound_fails_on_small_runs() {
        let report = run_suite_sequential(&small(RelationClass::All, 3), &Tolerances::default()).unwrap();
        let failing: Vec<_> = report
            .summary
            .by_check
            .iter()
            .filter(|(_, t)| t.failed > 0)
            .map(|(k, _)| k.as_str())
            .collect();
        assert!(failing.iter().all(|&k| k == "block_tail_bound"), "{failing:?}");
        assert!(report.summary.max_shift_ratio_over_gamma.is_some());
    }

    #[test]
    fn gamma_class_routes_block_checks() {
        let report = run_suite_sequential(&small(RelationClass::GammaAdmissible, 2), &Tolerances::default()).unwrap();
        assert_eq!(report.records("resolvent_block_assembly").count(), 2);
        assert!(report.records("w_identities").all(CheckReport::passed));
    }

    #[test]
    fn class_draws_match_inside_all() {
        let tol = Tolerances::default();
        let alone = run_trial(&small(RelationClass::Hermitian, 1), RelationClass::Hermitian, 0, &tol);
        let inside = run_trial(&small(RelationClass::All, 1), RelationClass::Hermitian, 0, &tol);
        assert_eq!(alone, inside);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let cfg = small(RelationClass::All, 2);
        let tol = Tolerances::default();
        let a = run_suite_sequential(&cfg, &tol).unwrap().to_json().unwrap();
        let b = run_suite_parallel(&cfg, &tol).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }
}
