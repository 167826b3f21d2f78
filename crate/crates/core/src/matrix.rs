//! Dense complex matrices and the handful of factorizations the rest of the
//! crate reduces to.
//!
//! Matrices cross process boundaries as `{rows, cols, re, im}` with
//! row-major nested arrays; see [`MatrixJson`].

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Builds a matrix from real row-major rows.
pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nrows, ncols, |i, j| c64(rows[i][j], 0.0))
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

/// Thin singular value decomposition `m = u · diag(values) · vᴴ` with
/// values sorted non-increasingly.
#[derive(Debug, Clone)]
pub struct Svd {
    pub values: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

fn to_faer(m: &CMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full (`u`, `v` square) or thin decomposition.
fn decompose(m: &CMatrix, full: bool) -> Svd {
    let (rows, cols) = m.shape();
    if rows.min(cols) == 0 {
        return Svd {
            values: Vec::new(),
            u: if full { identity(rows) } else { zeros(rows, 0) },
            v: if full { identity(cols) } else { zeros(cols, 0) },
        };
    }
    let fm = to_faer(m);
    let dec = if full { fm.svd() } else { fm.thin_svd() }.expect("svd of finite matrix");
    let values = dec.S().column_vector().iter().map(|s| s.re).collect();
    Svd {
        values,
        u: from_faer(dec.U()),
        v: from_faer(dec.V()),
    }
}

pub fn svd(m: &CMatrix) -> Svd {
    decompose(m, false)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows().min(m.ncols()) == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("svd of finite matrix")
}

pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values strictly above `cutoff`.
fn count_above(values: &[f64], cutoff: f64) -> usize {
    values.iter().take_while(|&&s| s > cutoff).count()
}

/// Orthonormal basis of the column space of `m`; singular values at or
/// below `eps_rank · scale` are treated as zero.
pub fn column_space(m: &CMatrix, eps_rank: f64, scale: f64) -> CMatrix {
    let dec = svd(m);
    let r = count_above(&dec.values, eps_rank * scale);
    dec.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the kernel of `m`, using the same cutoff rule as
/// [`column_space`].
pub fn null_space(m: &CMatrix, eps_rank: f64, scale: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return zeros(0, 0);
    }
    if rows == 0 {
        return identity(cols);
    }
    let dec = decompose(m, true);
    let r = count_above(&dec.values, eps_rank * scale);
    dec.v.columns(r, cols - r).into_owned()
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// non-increasingly. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let h = to_faer(&hermitian_part(m));
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .expect("eigendecomposition of finite matrix");
    // Ascending order from the solver; reversed here.
    let s = eig.S().column_vector();
    let u = eig.U();
    let values = (0..n).rev().map(|i| s[i].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    (values, vectors)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Principal square root of the positive semidefinite part of `m`;
/// negative eigenvalues from round-off are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let roots = DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| c64(l.max(0.0).sqrt(), 0.0)),
    );
    &vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint()
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::mismatch("inverse of non-square matrix", m.nrows(), m.ncols()));
    }
    if m.nrows() == 0 {
        return Ok(zeros(0, 0));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("matrix is singular".into()))
}

/// Moore–Penrose pseudo-inverse with a relative singular-value cutoff.
pub fn pinv(m: &CMatrix, eps_rank: f64) -> CMatrix {
    let dec = svd(m);
    let smax = dec.values.first().copied().unwrap_or(0.0);
    let r = count_above(&dec.values, eps_rank * smax);
    let mut out = zeros(m.ncols(), m.nrows());
    for k in 0..r {
        let vk = dec.v.column(k);
        let uk = dec.u.column(k);
        out += (vk * uk.adjoint()).scale(1.0 / dec.values[k]);
    }
    out
}

/// Stacks `top` over `bottom`; both must have the same column count.
pub fn vstack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    debug_assert_eq!(top.ncols(), bottom.ncols());
    let mut out = zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(bottom);
    out
}

/// Places `left` and `right` side by side; both must have the same row count.
pub fn hstack(left: &CMatrix, right: &CMatrix) -> CMatrix {
    debug_assert_eq!(left.nrows(), right.nrows());
    let mut out = zeros(left.nrows(), left.ncols() + right.ncols());
    out.columns_mut(0, left.ncols()).copy_from(left);
    out.columns_mut(left.ncols(), right.ncols()).copy_from(right);
    out
}

/// Block-diagonal matrix `diag(a, b)`.
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// The coordinate flip `(u, v) ↦ (v, u)` from `Cᵖ × C^q` to `C^q × Cᵖ`.
pub fn swap_matrix(p: usize, q: usize) -> CMatrix {
    let mut out = zeros(p + q, p + q);
    for i in 0..q {
        out[(i, p + i)] = c64(1.0, 0.0);
    }
    for i in 0..p {
        out[(q + i, i)] = c64(1.0, 0.0);
    }
    out
}

/// Serialized form of a complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let rows = m.nrows();
        let cols = m.ncols();
        let re = (0..rows).map(|i| (0..cols).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..rows).map(|i| (0..cols).map(|j| m[(i, j)].im).collect()).collect();
        Self { rows, cols, re, im }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let shape_ok = j.re.len() == j.rows
            && j.im.len() == j.rows
            && j.re.iter().chain(j.im.iter()).all(|r| r.len() == j.cols);
        if !shape_ok {
            return Err(Error::InvalidInput(format!(
                "matrix json does not match declared shape {}x{}",
                j.rows, j.cols
            )));
        }
        let m = CMatrix::from_fn(j.rows, j.cols, |i, k| c64(j.re[i][k], j.im[i][k]));
        ensure_finite(&m)?;
        Ok(m)
    }
}

/// `#[serde(with = "crate::matrix::json")]` adapter for [`CMatrix`] fields.
pub mod json {
    use super::{CMatrix, MatrixJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        CMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn null_space_of_wide_matrix_is_complete() {
        let m = from_real_rows(&[&[1.0, 0.0, 0.0, 1.0]]);
        let k = null_space(&m, 1e-10, 1.0);
        assert_eq!(k.ncols(), 3);
        assert!((&m * &k).norm() < 1e-12);
        assert!((k.adjoint() * &k - identity(3)).norm() < 1e-12);
    }

    #[test]
    fn psd_sqrt_clamps_negative_round_off() {
        let m = from_real_rows(&[&[4.0, 0.0], &[0.0, -1e-18]]);
        let r = psd_sqrt(&m);
        assert_relative_eq!(r[(0, 0)].re, 2.0, epsilon = 1e-14);
        assert_eq!(r[(1, 1)].re, 0.0);
    }

    #[test]
    fn swap_matrix_flips_blocks() {
        let s = swap_matrix(1, 2);
        let v = CVector::from_vec(vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)]);
        let w = &s * v;
        assert_eq!(w.iter().map(|z| z.re).collect::<Vec<_>>(), vec![2.0, 3.0, 1.0]);
    }

    #[test]
    fn json_rejects_ragged_rows() {
        let j = MatrixJson {
            rows: 2,
            cols: 2,
            re: vec![vec![1.0, 2.0], vec![3.0]],
            im: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        };
        assert!(CMatrix::try_from(j).is_err());
    }

    #[test]
    fn json_layout_is_row_major() {
        let m = CMatrix::from_fn(2, 3, |i, j| c64((3 * i + j) as f64, -(j as f64)));
        let v = serde_json::to_value(MatrixJson::from(&m)).unwrap();
        assert_eq!(v["rows"], 2);
        assert_eq!(v["cols"], 3);
        assert_eq!(v["re"][1][0], 3.0);
        assert_eq!(v["im"][0][2], -2.0);
    }
}
