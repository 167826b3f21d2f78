//! Small worked examples with fixed inputs.

use serde::Serialize;
use serde_json::{json, Value};

use crate::arens::{check_arens_reconstruction, ArensDecomposition};
use crate::error::{Error, Result};
use crate::matrix::{self, c64, from_real_rows, CMatrix};
use crate::perturbation::{
    check_shift_gap_bounds, check_shift_sv_bounds, gamma_membership, PerturbationScenario,
};
use crate::relation::{LinearRelation, OperatorOnSubspace};
use crate::schatten::{check_block_sv_bounds, check_block_trace_bounds, BlockOperator};
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

pub const DEMO_NAMES: [&str; 4] = ["remark-3-1", "arens", "lemma-3-1", "block-tail"];

#[derive(Debug, Clone, Serialize)]
pub struct DemoOutcome {
    pub name: String,
    /// The example behaved as described.
    pub passed: bool,
    pub lines: Vec<String>,
    pub data: Value,
}

pub fn run_demo(name: &str, tol: &Tolerances) -> Result<DemoOutcome> {
    match name {
        "remark-3-1" => empty_gamma_set(tol),
        "arens" => arens_split(tol),
        "lemma-3-1" => shift_bounds(tol),
        "block-tail" => block_tail(tol),
        other => Err(Error::InvalidInput(format!(
            "unknown demo {other:?}; available: {}",
            DEMO_NAMES.join(", ")
        ))),
    }
}

fn fmt_matrix(m: &CMatrix) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            let cells: Vec<String> = r
                .iter()
                .map(|z| {
                    if z.im.abs() < 1e-12 {
                        format!("{:.4}", z.re)
                    } else {
                        format!("{:.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// `X = C`, `Y = C²`, `S = 0`, `T = (1, 0)ᵀ`: for any `A : X → Y`,
/// `(S − A)⁻¹ = −A⁻¹` is defined on at most a line of `Y`, so `Γ(S, T)` is
/// empty. Checked on a 10×10 grid of `A = (a₁, i·a₂)ᵀ`.
fn empty_gamma_set(tol: &Tolerances) -> Result<DemoOutcome> {
    let s = LinearRelation::from_matrix(&matrix::zeros(2, 1));
    let t = LinearRelation::from_matrix(&from_real_rows(&[&[1.0], &[0.0]]));
    let grid: Vec<f64> = (0..10).map(|k| -2.0 + 4.0 * k as f64 / 9.0).collect();
    let mut members = 0usize;
    let mut max_range_dim = 0usize;
    for &a1 in &grid {
        for &a2 in &grid {
            let a = CMatrix::from_column_slice(2, 1, &[c64(a1, 0.0), c64(0.0, a2)]);
            let a = OperatorOnSubspace::everywhere(a);
            let m = gamma_membership(&s, &t, &a, tol)?;
            let shifted = s.shift_by_operator(&a, -1.0, tol)?.relation;
            max_range_dim = max_range_dim.max(shifted.range(tol).dim());
            members += usize::from(m.is_member());
        }
    }
    let candidates = grid.len() * grid.len();
    let lines = vec![
        "X = C, Y = C^2, S x = 0, T x = (x, 0)".to_string(),
        format!("candidates A = (a1, i a2)^T on a {0}x{0} grid over [-2, 2]: {candidates}", grid.len()),
        format!("largest dim R(S - A): {max_range_dim} (need 2)"),
        format!("is_in_gamma_set = true for {members} of {candidates}"),
        format!("is_in_gamma_set = {}", members > 0),
    ];
    Ok(DemoOutcome {
        name: "remark-3-1".into(),
        passed: members == 0,
        lines,
        data: json!({
            "candidates": candidates,
            "members": members,
            "is_in_gamma_set": members > 0,
            "max_range_dim": max_range_dim,
        }),
    })
}

/// A relation on `C³` with a one-dimensional multivalued part.
fn arens_split(tol: &Tolerances) -> Result<DemoOutcome> {
    let t = LinearRelation::from_parts(
        &Subspace::coordinate(3, &[0, 1]),
        &from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 0.0], &[3.0, -1.0, 0.0]]),
        &Subspace::coordinate(3, &[2]),
        tol,
    )?;
    let dec = ArensDecomposition::new(&t, tol)?;
    let report = check_arens_reconstruction(&t, tol)?;
    let op = dec.op_part_matrix.canonical_matrix();
    let lines = vec![
        "T = {(x, Bx + m) : x in span{e1, e2}, m in span{e3}}".to_string(),
        format!("dim T = {}, dim D(T) = {}, dim T(0) = {}", t.dim(), t.domain(tol).dim(), dec.mul_space().dim()),
        format!("operator part T_s = {}", fmt_matrix(&op)),
        format!(
            "||P_T - (P_Ts + P_Tinf)|| = {:.3e}, ||P_Ts P_Tinf|| = {:.3e}",
            dec.reconstruction_residual(&t),
            dec.orthogonality_residual()
        ),
        format!("T_s single-valued: {}", dec.op_part.is_single_valued(tol)),
    ];
    Ok(DemoOutcome {
        name: "arens".into(),
        passed: report.passed(),
        lines,
        data: serde_json::to_value(&report)?,
    })
}

/// Two operators on `C²` and a shift `A`; prints the gap norms before and
/// after the shift against `γ = 2(1 + ‖A‖²)`.
fn shift_bounds(tol: &Tolerances) -> Result<DemoOutcome> {
    let s = LinearRelation::from_matrix(&from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]));
    let t = LinearRelation::from_matrix(&from_real_rows(&[&[1.0, 0.5], &[0.5, -0.5]]));
    let a = OperatorOnSubspace::everywhere(from_real_rows(&[&[2.0, 1.0], &[0.0, 3.0]]));
    let sc = PerturbationScenario::new(s, t, Some(a), tol)?;
    let gap = check_shift_gap_bounds(&sc, tol);
    let sv = check_shift_sv_bounds(&sc, tol);
    let d = &gap.details;
    let lines = vec![
        "S = diag(1, -1), T = [[1, .5], [.5, -.5]], A = [[2, 1], [0, 3]]".to_string(),
        format!("gamma = 2(1 + ||A||^2) = {:.4}", d["gamma"].as_f64().unwrap_or(f64::NAN)),
        format!("||P_T - P_S|| = {:.6}", d["gap_norm"].as_f64().unwrap_or(f64::NAN)),
        format!("||P_(T-A) - P_(S-A)|| = {:.6}", d["shifted_gap_norm"].as_f64().unwrap_or(f64::NAN)),
        format!("largest ratio / gamma = {}", d["ratio_over_gamma"]),
        format!("norm bounds: {:?}, singular value bounds: {:?}", gap.status, sv.status),
    ];
    Ok(DemoOutcome {
        name: "lemma-3-1".into(),
        passed: gap.passed() && sv.passed(),
        lines,
        data: json!({ "gap_bounds": gap, "singular_value_bounds": sv }),
    })
}

/// `Q = I` on `C × C`: every block has one singular value, so the tail
/// bound `s₂(Q) ≤ Σ s₂(Q_ij)` reads `1 ≤ 0`. The index-shifted bound
/// `s_{4n+1}(Q) ≤ Σ s_{n+1}(Q_ij)` still holds.
fn block_tail(tol: &Tolerances) -> Result<DemoOutcome> {
    let one = matrix::identity(1);
    let zero = matrix::zeros(1, 1);
    let b = BlockOperator::new(one.clone(), zero.clone(), zero, one)?;
    let literal = check_block_sv_bounds(&b, &[], tol.eps_rank);
    let shifted = check_block_trace_bounds(&b, tol.eps_rank);
    let tail = literal.iter().find(|r| r.check_id == "block_tail_bound").cloned();
    let weyl = shifted.iter().find(|r| r.check_id == "block_weyl_tail_bound").cloned();
    let tail_fails = tail.as_ref().is_some_and(|r| !r.passed());
    let weyl_holds = weyl.as_ref().is_some_and(|r| r.passed());
    let lines = vec![
        "Q = I on C x C, blocks Q11 = Q22 = 1, Q12 = Q21 = 0".to_string(),
        "s_2(Q) = 1, sum of s_2(Q_ij) = 0".to_string(),
        format!("s_(n+1)(Q) <= sum s_(n+1)(Q_ij) violated: {tail_fails}"),
        format!("s_(4n+1)(Q) <= sum s_(n+1)(Q_ij) holds: {weyl_holds}"),
    ];
    Ok(DemoOutcome {
        name: "block-tail".into(),
        passed: tail_fails && weyl_holds,
        lines,
        data: json!({ "tail_bound": tail, "shifted_tail_bound": weyl }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_behaves_as_described() {
        let tol = Tolerances::default();
        for name in DEMO_NAMES {
            let d = run_demo(name, &tol).unwrap();
            assert!(d.passed, "{name}: {:#?}", d.lines);
        }
    }

    #[test]
    fn remark_grid_has_no_members() {
        let d = run_demo("remark-3-1", &Tolerances::default()).unwrap();
        assert_eq!(d.data["candidates"], 100);
        assert_eq!(d.data["is_in_gamma_set"], false);
        assert_eq!(d.data["max_range_dim"], 1);
    }

    #[test]
    fn unknown_demo_is_invalid_input() {
        assert!(matches!(run_demo("nope", &Tolerances::default()), Err(Error::InvalidInput(_))));
    }
}
