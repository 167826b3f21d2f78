//! Linear subspaces of `Cⁿ` carried as orthonormal bases.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix, CVector};
use crate::tolerance::Tolerances;

/// A subspace of `C^ambient_dim` stored as a matrix with orthonormal
/// columns. The zero subspace has zero columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Subspace {
    /// Orthonormal basis of the column space of `columns`. Rank is decided
    /// relative to the largest singular value.
    pub fn span(columns: &CMatrix, tol: &Tolerances) -> Result<Self> {
        matrix::ensure_finite(columns)?;
        let smax = matrix::op_norm(columns);
        if smax == 0.0 {
            return Ok(Self::zero(columns.nrows()));
        }
        Ok(Self::from_orthonormal(
            matrix::column_space(columns, tol.eps_rank, smax),
        ))
    }

    /// Like [`Subspace::span`] but with the rank cutoff measured against
    /// `scale` instead of the largest singular value. Used on matrices
    /// whose natural size is known (slices of orthonormal bases), where a
    /// relative cutoff would promote round-off to rank.
    pub(crate) fn span_scaled(columns: &CMatrix, tol: &Tolerances, scale: f64) -> Self {
        Self::from_orthonormal(matrix::column_space(columns, tol.eps_rank, scale))
    }

    pub(crate) fn from_orthonormal(basis: CMatrix) -> Self {
        Self {
            ambient_dim: basis.nrows(),
            basis,
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: matrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: matrix::identity(ambient_dim),
        }
    }

    /// Span of the listed standard basis vectors.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let mut basis = matrix::zeros(ambient_dim, indices.len());
        for (k, &i) in indices.iter().enumerate() {
            basis[(i, k)] = matrix::c64(1.0, 0.0);
        }
        Self::from_orthonormal(basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projection_matrix(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `‖basisᴴ·basis − I‖`, the drift from orthonormality.
    pub fn orthonormality_residual(&self) -> f64 {
        matrix::op_norm(&(self.basis.adjoint() * &self.basis - matrix::identity(self.dim())))
    }

    fn same_ambient(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::mismatch(context, self.ambient_dim, other.ambient_dim));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        self.same_ambient(other, "subspace sum")?;
        let stacked = matrix::hstack(&self.basis, &other.basis);
        Ok(Self::span_scaled(&stacked, tol, 1.0))
    }

    /// `A ∩ B` from the kernel of `[Q_A, −Q_B]`: every kernel vector
    /// `(a, b)` gives the common vector `Q_A·a = Q_B·b`.
    pub fn intersect(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        self.same_ambient(other, "subspace intersection")?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ambient_dim));
        }
        let stacked = matrix::hstack(&self.basis, &(-&other.basis));
        let kernel = matrix::null_space(&stacked, tol.eps_rank, 1.0);
        let coeffs = kernel.rows(0, self.dim()).into_owned();
        let common = (&self.basis * coeffs).scale(std::f64::consts::SQRT_2);
        Ok(Self::span_scaled(&common, tol, 1.0))
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self, tol: &Tolerances) -> Self {
        if self.is_zero() {
            return Self::full(self.ambient_dim);
        }
        Self::from_orthonormal(matrix::null_space(&self.basis.adjoint(), tol.eps_rank, 1.0))
    }

    /// The part of `self` orthogonal to `other`, i.e. `self ∩ other^⊥`.
    pub fn perp_within(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        self.same_ambient(other, "orthogonal difference")?;
        if other.is_zero() || self.is_zero() {
            return Ok(self.clone());
        }
        let gram = other.basis.adjoint() * &self.basis;
        let kernel = matrix::null_space(&gram, tol.eps_rank, 1.0);
        Ok(Self::from_orthonormal(&self.basis * kernel))
    }

    /// Distance from `v` to the subspace.
    pub fn distance(&self, v: &CVector) -> f64 {
        let proj = &self.basis * (self.basis.adjoint() * v);
        (v - proj).norm()
    }

    pub fn contains(&self, v: &CVector, tol: &Tolerances) -> bool {
        v.len() == self.ambient_dim && self.distance(v) <= tol.eps_eq * v.norm().max(1.0)
    }

    /// `self ⊂ other` within `eps_eq`.
    pub fn is_subset_of(&self, other: &Self, tol: &Tolerances) -> bool {
        self.ambient_dim == other.ambient_dim && self.excess_over(other) <= tol.eps_eq
    }

    /// `‖(I − P_other)·Q_self‖`: how far `self` sticks out of `other`.
    pub fn excess_over(&self, other: &Self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let residual = &self.basis - &other.basis * (other.basis.adjoint() * &self.basis);
        matrix::op_norm(&residual)
    }

    /// `‖P_A − P_B‖`, the gap between two subspaces.
    pub fn gap(&self, other: &Self) -> Result<f64> {
        self.same_ambient(other, "subspace gap")?;
        Ok(matrix::op_norm(&(self.projection_matrix() - other.projection_matrix())))
    }

    pub fn equals(&self, other: &Self, tol: &Tolerances) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.gap(other).is_ok_and(|g| g <= tol.eps_eq)
    }

    /// Applies a linear map to every basis vector and spans the image.
    pub fn image(&self, map: &CMatrix, tol: &Tolerances) -> Result<Self> {
        if map.ncols() != self.ambient_dim {
            return Err(Error::mismatch("subspace image", self.ambient_dim, map.ncols()));
        }
        let scale = matrix::op_norm(map).max(f64::MIN_POSITIVE);
        Ok(Self::span_scaled(&(map * &self.basis), tol, scale))
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient_dim: usize,
    #[serde(with = "crate::matrix::json")]
    basis: CMatrix,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson {
            ambient_dim: self.ambient_dim,
            basis: self.basis.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SubspaceJson::deserialize(d)?;
        if raw.basis.nrows() != raw.ambient_dim {
            return Err(serde::de::Error::custom("basis rows differ from ambient_dim"));
        }
        Subspace::span(&raw.basis, &Tolerances::default()).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, from_real_rows};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn span_of_zero_columns_is_zero_subspace() {
        let s = Subspace::span(&matrix::zeros(2, 1), &tol()).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.basis().shape(), (2, 0));
    }

    #[test]
    fn span_of_rank_one_matrix_is_e1() {
        let s = Subspace::span(&from_real_rows(&[&[1.0, 2.0], &[0.0, 0.0]]), &tol()).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.equals(&Subspace::coordinate(2, &[0]), &tol()));
    }

    #[test]
    fn span_rejects_nan() {
        let m = from_real_rows(&[&[f64::NAN]]);
        assert!(matches!(Subspace::span(&m, &tol()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn projection_of_whole_and_zero_space() {
        assert_eq!(Subspace::full(3).projection_matrix(), matrix::identity(3));
        assert_eq!(Subspace::zero(3).projection_matrix(), matrix::zeros(3, 3));
    }

    #[test]
    fn projection_onto_diagonal_line() {
        let v = from_real_rows(&[&[1.0], &[1.0]]);
        let p = Subspace::span(&v, &tol()).unwrap().projection_matrix();
        for z in p.iter() {
            assert!((z - c64(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn intersection_examples() {
        let t = tol();
        let a = Subspace::coordinate(3, &[0, 1]);
        let b = Subspace::coordinate(3, &[1, 2]);
        assert!(a.intersect(&b, &t).unwrap().equals(&Subspace::coordinate(3, &[1]), &t));
        assert!(a.intersect(&a, &t).unwrap().equals(&a, &t));
        let c = Subspace::coordinate(3, &[2]);
        assert_eq!(Subspace::coordinate(3, &[0]).intersect(&c, &t).unwrap().dim(), 0);
    }

    #[test]
    fn mismatched_ambients_are_rejected() {
        let e = Subspace::full(2).intersect(&Subspace::full(3), &tol());
        assert!(matches!(e, Err(Error::DimensionMismatch { .. })));
        assert!(Subspace::full(2).sum(&Subspace::full(3), &tol()).is_err());
    }

    #[test]
    fn lattice_basics() {
        let t = tol();
        let a = Subspace::coordinate(4, &[0, 3]);
        assert!(a.sum(&Subspace::zero(4), &t).unwrap().equals(&a, &t));
        assert!(a.complement(&t).complement(&t).equals(&a, &t));
        assert_eq!(Subspace::zero(4).complement(&t).dim(), 4);
        assert_eq!(Subspace::full(4).complement(&t).dim(), 0);
    }

    #[test]
    fn perp_within_removes_component() {
        let t = tol();
        let outer = Subspace::coordinate(3, &[0, 1]);
        let inner = Subspace::coordinate(3, &[1]);
        let rest = outer.perp_within(&inner, &t).unwrap();
        assert!(rest.equals(&Subspace::coordinate(3, &[0]), &t));
    }
}
