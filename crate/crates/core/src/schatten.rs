//! Singular values, trace norms and 2×2 block operator matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix, CVector};
use crate::report::{max_excess, CheckReport};

/// Non-increasing singular values of a matrix, zeros included, with the
/// operator norm `s₁` and the trace norm `Σ sₙ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    pub op_norm: f64,
    pub trace_norm: f64,
}

impl SingularSpectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let op_norm = values.first().copied().unwrap_or(0.0);
        let trace_norm = values.iter().sum();
        Self {
            values,
            op_norm,
            trace_norm,
        }
    }

    /// `s_n` with 1-based `n`; zero past the end of the list.
    pub fn s(&self, n: usize) -> f64 {
        assert!(n >= 1, "singular values are indexed from 1");
        self.values.get(n - 1).copied().unwrap_or(0.0)
    }

    /// Values above `eps_rank · s₁`.
    pub fn rank(&self, eps_rank: f64) -> usize {
        self.values.iter().filter(|&&v| v > eps_rank * self.op_norm).count()
    }

    /// Values above an absolute threshold, in order.
    pub fn nonzero(&self, threshold: f64) -> Vec<f64> {
        self.values.iter().copied().filter(|&v| v > threshold).collect()
    }
}

pub fn singular_values(m: &CMatrix) -> Result<SingularSpectrum> {
    matrix::ensure_finite(m)?;
    Ok(SingularSpectrum::from_values(matrix::singular_values(m)))
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    matrix::singular_values(m).iter().sum()
}

/// `|M| = (MᴴM)^{1/2}`.
pub fn abs_operator(m: &CMatrix) -> CMatrix {
    matrix::psd_sqrt(&(m.adjoint() * m))
}

/// A 2×2 block operator on `X × Y`: `q11: X→X`, `q12: Y→X`, `q21: X→Y`,
/// `q22: Y→Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    pub q11: CMatrix,
    pub q12: CMatrix,
    pub q21: CMatrix,
    pub q22: CMatrix,
}

impl BlockOperator {
    pub fn new(q11: CMatrix, q12: CMatrix, q21: CMatrix, q22: CMatrix) -> Result<Self> {
        let (dx, dy) = (q11.nrows(), q22.nrows());
        let checks = [
            ("q11 columns", dx, q11.ncols()),
            ("q22 columns", dy, q22.ncols()),
            ("q12 rows", dx, q12.nrows()),
            ("q12 columns", dy, q12.ncols()),
            ("q21 rows", dy, q21.nrows()),
            ("q21 columns", dx, q21.ncols()),
        ];
        for (context, expected, found) in checks {
            if expected != found {
                return Err(Error::mismatch(context, expected, found));
            }
        }
        Ok(Self { q11, q12, q21, q22 })
    }

    pub fn dim_x(&self) -> usize {
        self.q11.nrows()
    }

    pub fn dim_y(&self) -> usize {
        self.q22.nrows()
    }

    pub fn assemble(&self) -> CMatrix {
        let top = matrix::hstack(&self.q11, &self.q12);
        let bottom = matrix::hstack(&self.q21, &self.q22);
        matrix::vstack(&top, &bottom)
    }

    pub fn split(m: &CMatrix, dim_x: usize, dim_y: usize) -> Result<Self> {
        let n = dim_x + dim_y;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::mismatch("block split", n, m.nrows().max(m.ncols())));
        }
        Ok(Self {
            q11: m.view((0, 0), (dim_x, dim_x)).into_owned(),
            q12: m.view((0, dim_x), (dim_x, dim_y)).into_owned(),
            q21: m.view((dim_x, 0), (dim_y, dim_x)).into_owned(),
            q22: m.view((dim_x, dim_x), (dim_y, dim_y)).into_owned(),
        })
    }

    pub fn blocks(&self) -> [(&'static str, &CMatrix); 4] {
        [("q11", &self.q11), ("q12", &self.q12), ("q21", &self.q21), ("q22", &self.q22)]
    }

    /// `QᴴQ` assembled from the block products
    /// `Q₁ᵢᴴQ₁ⱼ + Q₂ᵢᴴQ₂ⱼ`.
    pub fn gram_from_blocks(&self) -> CMatrix {
        let g = |a1: &CMatrix, b1: &CMatrix, a2: &CMatrix, b2: &CMatrix| a1.adjoint() * b1 + a2.adjoint() * b2;
        let g11 = g(&self.q11, &self.q11, &self.q21, &self.q21);
        let g12 = g(&self.q11, &self.q12, &self.q21, &self.q22);
        let g21 = g(&self.q12, &self.q11, &self.q22, &self.q21);
        let g22 = g(&self.q12, &self.q12, &self.q22, &self.q22);
        matrix::vstack(&matrix::hstack(&g11, &g12), &matrix::hstack(&g21, &g22))
    }

    /// `P_j = (Q₁ⱼᴴQ₁ⱼ + Q₂ⱼᴴQ₂ⱼ)^{1/2}` for column block `j ∈ {1, 2}`.
    pub fn column_modulus(&self, j: usize) -> CMatrix {
        match j {
            1 => matrix::psd_sqrt(&(self.q11.adjoint() * &self.q11 + self.q21.adjoint() * &self.q21)),
            2 => matrix::psd_sqrt(&(self.q12.adjoint() * &self.q12 + self.q22.adjoint() * &self.q22)),
            _ => panic!("column block index must be 1 or 2"),
        }
    }
}

/// Singular value bounds between a block operator and its blocks.
///
/// Returns one record each for
/// * `block_norm_bound`: `s₁(Q) ≤ Σ s₁(Q_ij)`;
/// * `block_tail_bound`: `s_{n+1}(Q) ≤ Σ s_{n+1}(Q_ij)` for every `n ≥ 1`;
/// * `column_domination`: `‖Q_ij x‖ ≤ ‖P_j x‖` on the probe vectors and
///   `s_n(Q_ij) ≤ s_n(P_j)` for every `n`.
///
/// The tail bound does not hold in general: for `Q = I` on `C × C` the
/// blocks have a single singular value each, so `s₂(Q) = 1` faces a right
/// side of zero. It is still evaluated as stated so that sweeps record the
/// violations; [`check_block_trace_bounds`] carries the bounds that do hold.
pub fn check_block_sv_bounds(b: &BlockOperator, probes: &[CVector], tolerance: f64) -> Vec<CheckReport> {
    const REF: &str = "Proposition 2.1";
    let q = SingularSpectrum::from_values(matrix::singular_values(&b.assemble()));
    let blocks: Vec<SingularSpectrum> = b
        .blocks()
        .iter()
        .map(|(_, m)| SingularSpectrum::from_values(matrix::singular_values(m)))
        .collect();
    let block_sum = |n: usize| blocks.iter().map(|s| s.s(n)).sum::<f64>();

    let norm_slack = block_sum(1) - q.s(1);
    let norm = CheckReport::inequality("block_norm_bound", REF, norm_slack, tolerance)
        .with_detail("s1_q", q.s(1))
        .with_detail("sum_s1_blocks", block_sum(1));

    let mut tail_slack = f64::INFINITY;
    let mut tail_violations = 0usize;
    for n in 1..q.values.len() {
        let slack = block_sum(n + 1) - q.s(n + 1);
        tail_slack = tail_slack.min(slack);
        tail_violations += usize::from(slack < -tolerance);
    }
    if !tail_slack.is_finite() {
        tail_slack = 0.0;
    }
    let tail = CheckReport::inequality("block_tail_bound", REF, tail_slack, tolerance)
        .with_detail("violating_indices", tail_violations)
        .with_detail("indices_checked", q.values.len().saturating_sub(1));

    let (dx, dy) = (b.dim_x(), b.dim_y());
    let moduli = [b.column_modulus(1), b.column_modulus(2)];
    let mut dom_slack = f64::INFINITY;
    let mut probe_violations = 0usize;
    for probe in probes {
        let parts = [probe.rows(0, dx).into_owned(), probe.rows(dx, dy).into_owned()];
        for (j, blk) in [(0usize, &b.q11), (0, &b.q21), (1, &b.q12), (1, &b.q22)] {
            let slack = (&moduli[j] * &parts[j]).norm() - (blk * &parts[j]).norm();
            dom_slack = dom_slack.min(slack);
            probe_violations += usize::from(slack < -tolerance);
        }
    }
    let mut sv_slack = f64::INFINITY;
    for (j, blk) in [(0usize, &b.q11), (0, &b.q21), (1, &b.q12), (1, &b.q22)] {
        let lhs = matrix::singular_values(blk);
        let rhs = matrix::singular_values(&moduli[j]);
        if !lhs.is_empty() || !rhs.is_empty() {
            sv_slack = sv_slack.min(-max_excess(&lhs, &rhs));
        }
    }
    let worst = dom_slack.min(sv_slack);
    let domination = CheckReport::inequality(
        "column_domination",
        REF,
        if worst.is_finite() { worst } else { 0.0 },
        tolerance,
    )
    .with_detail("probes", probes.len())
    .with_detail("probe_violations", probe_violations)
    .with_detail("singular_value_slack", if sv_slack.is_finite() { sv_slack } else { 0.0 });

    vec![norm, tail, domination]
}

/// Bounds between a block operator and its blocks that hold in general:
/// * `block_weyl_tail_bound`: `s_{4n+1}(Q) ≤ Σ s_{n+1}(Q_ij)`, `n ≥ 0`;
/// * `block_trace_norm_bound`: `‖Q_ij‖₁ ≤ ‖Q‖₁ ≤ Σ ‖Q_ij‖₁`;
/// * `block_gram_identity`: `QᴴQ` equals its block-product expansion.
pub fn check_block_trace_bounds(b: &BlockOperator, tolerance: f64) -> Vec<CheckReport> {
    const REF: &str = "Proposition 2.1";
    let assembled = b.assemble();
    let q = SingularSpectrum::from_values(matrix::singular_values(&assembled));
    let blocks: Vec<SingularSpectrum> = b
        .blocks()
        .iter()
        .map(|(_, m)| SingularSpectrum::from_values(matrix::singular_values(m)))
        .collect();

    let mut weyl_slack = f64::INFINITY;
    let mut n = 0;
    while 4 * n < q.values.len() {
        let rhs: f64 = blocks.iter().map(|s| s.s(n + 1)).sum();
        weyl_slack = weyl_slack.min(rhs - q.s(4 * n + 1));
        n += 1;
    }
    if !weyl_slack.is_finite() {
        weyl_slack = 0.0;
    }
    let weyl = CheckReport::inequality("block_weyl_tail_bound", REF, weyl_slack, tolerance);

    let block_sum: f64 = blocks.iter().map(|s| s.trace_norm).sum();
    let largest_block = blocks.iter().map(|s| s.trace_norm).fold(0.0, f64::max);
    let trace_slack = (block_sum - q.trace_norm).min(q.trace_norm - largest_block);
    let trace = CheckReport::inequality("block_trace_norm_bound", REF, trace_slack, tolerance)
        .with_detail("trace_norm_q", q.trace_norm)
        .with_detail("sum_block_trace_norms", block_sum);

    let gram_residual = matrix::op_norm(&(assembled.adjoint() * &assembled - b.gram_from_blocks()));
    let gram_scale = q.op_norm.powi(2).max(1.0);
    let gram = CheckReport::identity("block_gram_identity", "Proposition 2.1, Eq (2.8)", gram_residual / gram_scale, tolerance);

    vec![weyl, trace, gram]
}

/// Trace-norm closure under sums and products, and adjoint invariance:
/// `‖S+T‖₁ ≤ ‖S‖₁+‖T‖₁`, `‖ST‖₁ ≤ ‖S‖·‖T‖₁`, `‖ST‖₁ ≤ ‖S‖₁·‖T‖`,
/// `‖Mᴴ‖₁ = ‖M‖₁` and `‖Mᴴ‖ = ‖M‖`. Inapplicable parts (shape mismatch) are
/// skipped.
pub fn trace_norm_algebra_checks(s: &CMatrix, t: &CMatrix, tolerance: f64) -> CheckReport {
    const REF: &str = "Lemmas 2.6-2.7";
    let s_spec = SingularSpectrum::from_values(matrix::singular_values(s));
    let t_spec = SingularSpectrum::from_values(matrix::singular_values(t));
    let scale = (s_spec.trace_norm + t_spec.trace_norm).max(1.0);
    let mut slack = f64::INFINITY;
    let mut applied = Vec::new();
    if s.shape() == t.shape() {
        let sum = trace_norm(&(s + t));
        slack = slack.min(s_spec.trace_norm + t_spec.trace_norm - sum);
        applied.push("sum");
    }
    if s.ncols() == t.nrows() {
        let prod = trace_norm(&(s * t));
        slack = slack.min(s_spec.op_norm * t_spec.trace_norm - prod);
        slack = slack.min(s_spec.trace_norm * t_spec.op_norm - prod);
        applied.push("product");
    }
    let mut adj_residual: f64 = 0.0;
    for (m, spec) in [(s, &s_spec), (t, &t_spec)] {
        let adj = SingularSpectrum::from_values(matrix::singular_values(&m.adjoint()));
        adj_residual = adj_residual
            .max((adj.trace_norm - spec.trace_norm).abs())
            .max((adj.op_norm - spec.op_norm).abs());
    }
    slack = slack.min(-adj_residual);
    let slack = if slack.is_finite() { slack } else { 0.0 };
    CheckReport::inequality("trace_norm_algebra", REF, slack / scale, tolerance)
        .with_detail("applied", applied)
        .with_detail("adjoint_residual", adj_residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, from_real_rows};

    #[test]
    fn diagonal_singular_values() {
        let s = singular_values(&from_real_rows(&[&[3.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!((s.s(1) - 3.0).abs() < 1e-14 && (s.s(2) - 1.0).abs() < 1e-14);
        assert!((s.trace_norm - 4.0).abs() < 1e-14);
        assert_eq!(s.s(3), 0.0);
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        let r = 0.5_f64.sqrt();
        let u = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64(r, 0.0),
            (0, 1) => c64(0.0, r),
            (1, 0) => c64(0.0, r),
            _ => c64(r, 0.0),
        });
        let s = singular_values(&u).unwrap();
        assert!(s.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!((s.trace_norm - 2.0).abs() < 1e-13);
        assert!((abs_operator(&u) - matrix::identity(2)).norm() < 1e-13);
    }

    #[test]
    fn abs_of_zero_is_zero() {
        assert_eq!(abs_operator(&matrix::zeros(3, 2)), matrix::zeros(2, 2));
    }

    #[test]
    fn singular_values_reject_nan() {
        assert!(singular_values(&from_real_rows(&[&[f64::INFINITY]])).is_err());
    }

    #[test]
    fn split_identity_and_zero_assembly() {
        let b = BlockOperator::split(&matrix::identity(5), 2, 3).unwrap();
        assert_eq!(b.q11, matrix::identity(2));
        assert_eq!(b.q22, matrix::identity(3));
        assert_eq!(b.q12, matrix::zeros(2, 3));
        assert_eq!(b.q21, matrix::zeros(3, 2));
        let z = BlockOperator::new(matrix::zeros(2, 2), matrix::zeros(2, 1), matrix::zeros(1, 2), matrix::zeros(1, 1)).unwrap();
        assert_eq!(z.assemble(), matrix::zeros(3, 3));
        assert!(BlockOperator::split(&matrix::identity(4), 2, 3).is_err());
        assert!(BlockOperator::new(matrix::zeros(2, 2), matrix::zeros(1, 1), matrix::zeros(1, 2), matrix::zeros(1, 1)).is_err());
    }

    #[test]
    fn single_block_attains_norm_bound() {
        let q12 = from_real_rows(&[&[2.0], &[1.0]]);
        let b = BlockOperator::new(matrix::zeros(2, 2), q12, matrix::zeros(1, 2), matrix::zeros(1, 1)).unwrap();
        let r = &check_block_sv_bounds(&b, &[], 1e-10)[0];
        assert!(r.passed());
        assert!(r.slack.unwrap().abs() < 1e-12);
    }

    #[test]
    fn identity_breaks_the_stated_tail_bound() {
        // Q = I on C × C: s₂(Q) = 1 but every 1×1 block has s₂ = 0.
        let b = BlockOperator::split(&matrix::identity(2), 1, 1).unwrap();
        let reports = check_block_sv_bounds(&b, &[], 1e-10);
        assert!(reports[0].passed());
        assert!(!reports[1].passed());
        assert!((reports[1].residual - 1.0).abs() < 1e-14);
        assert!(check_block_trace_bounds(&b, 1e-10).iter().all(CheckReport::passed));
    }

    #[test]
    fn block_diagonal_merges_spectra() {
        let a = from_real_rows(&[&[3.0, 0.0], &[0.0, 1.0]]);
        let d = from_real_rows(&[&[2.0]]);
        let b = BlockOperator::new(a, matrix::zeros(2, 1), matrix::zeros(1, 2), d).unwrap();
        let s = singular_values(&b.assemble()).unwrap();
        let expect = [3.0, 2.0, 1.0];
        for (x, y) in s.values.iter().zip(expect) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_norm_algebra_on_identity() {
        let i = matrix::identity(2);
        let r = trace_norm_algebra_checks(&i, &i, 1e-10);
        assert!(r.passed());
        assert!(r.slack.unwrap().abs() < 1e-12);
        let z = trace_norm_algebra_checks(&i, &matrix::zeros(2, 2), 1e-10);
        assert!(z.passed());
    }
}
