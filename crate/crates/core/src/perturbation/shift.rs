use crate::error::{Error, Result};
use crate::relation::{LinearRelation, OperatorOnSubspace};
use crate::report::CheckReport;
use crate::schatten::SingularSpectrum;
use crate::tolerance::Tolerances;

use super::gap::projection_gap;
use super::scenario::PerturbationScenario;

/// `γ = 2(1 + ‖A‖²)`, with the norm taken on `D(A)`.
pub fn shift_constant(a: &OperatorOnSubspace) -> f64 {
    2.0 * (1.0 + a.norm().powi(2))
}

struct ShiftedGaps {
    gamma: f64,
    before: SingularSpectrum,
    after: SingularSpectrum,
}

fn shifted_gaps(sc: &PerturbationScenario, tol: &Tolerances) -> Result<ShiftedGaps> {
    let Some(a) = sc.a() else {
        return Err(Error::HypothesisViolated("no bounded operator A in the scenario".into()));
    };
    if sc.flags().domains_in_a_domain != Some(true) {
        return Err(Error::HypothesisViolated("D(S) ∪ D(T) is not contained in D(A)".into()));
    }
    let shift = |r: &LinearRelation| -> Result<LinearRelation> { Ok(r.shift_by_operator(a, -1.0, tol)?.relation) };
    let before = projection_gap(sc.s(), sc.t())?.spectrum;
    let after = projection_gap(&shift(sc.s())?, &shift(sc.t())?)?.spectrum;
    Ok(ShiftedGaps {
        gamma: shift_constant(a),
        before,
        after,
    })
}

fn ratio(num: f64, den: f64, floor: f64) -> f64 {
    if num <= floor && den <= floor {
        1.0
    } else if den <= floor {
        f64::INFINITY
    } else {
        num / den
    }
}

fn run<F>(id: &str, reference: &str, sc: &PerturbationScenario, tol: &Tolerances, body: F) -> CheckReport
where
    F: FnOnce(&ShiftedGaps) -> CheckReport,
{
    match shifted_gaps(sc, tol) {
        Ok(g) => body(&g),
        Err(e) => CheckReport::from_error(id, reference, &e),
    }
}

/// `‖P_{T−A} − P_{S−A}‖/γ ≤ ‖P_T − P_S‖ ≤ γ‖P_{T−A} − P_{S−A}‖`.
///
/// The details carry the observed ratios, divided by `γ`, so values close
/// to 1 mean the constant is nearly attained.
pub fn check_shift_gap_bounds(sc: &PerturbationScenario, tol: &Tolerances) -> CheckReport {
    const ID: &str = "shift_gap_bounds";
    const REF: &str = "Lemma 3.1";
    run(ID, REF, sc, tol, |g| {
        let (before, after) = (g.before.op_norm, g.after.op_norm);
        let slack = (before - after / g.gamma).min(g.gamma * after - before);
        let floor = tol.eps_eq;
        let worst_ratio = ratio(before, after, floor).max(ratio(after, before, floor));
        CheckReport::inequality(ID, REF, slack, tol.eps_eq)
            .with_detail("gamma", g.gamma)
            .with_detail("gap_norm", before)
            .with_detail("shifted_gap_norm", after)
            .with_detail("ratio_over_gamma", finite_or_null(worst_ratio / g.gamma))
    })
}

/// `s_n(P_{T−A} − P_{S−A})/γ ≤ s_n(P_T − P_S) ≤ γ s_n(P_{T−A} − P_{S−A})`
/// for every `n`, with the per-index slack in the details.
pub fn check_shift_sv_bounds(sc: &PerturbationScenario, tol: &Tolerances) -> CheckReport {
    const ID: &str = "shift_singular_value_bounds";
    const REF: &str = "Eqs (3.1)-(3.2)";
    run(ID, REF, sc, tol, |g| {
        let n = g.before.values.len().max(g.after.values.len());
        let per_index: Vec<f64> = (1..=n)
            .map(|k| {
                let (b, a) = (g.before.s(k), g.after.s(k));
                (b - a / g.gamma).min(g.gamma * a - b)
            })
            .collect();
        let slack = per_index.iter().copied().fold(f64::INFINITY, f64::min);
        let slack = if slack.is_finite() { slack } else { 0.0 };
        CheckReport::inequality(ID, REF, slack, tol.eps_eq)
            .with_detail("gamma", g.gamma)
            .with_detail("per_index_slack", per_index)
    })
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        x.into()
    } else {
        serde_json::Value::Null
    }
}
