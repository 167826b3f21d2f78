//! Linear relations `T ⊂ X × Y` and their arithmetic.
//!
//! A relation is stored as its graph, a subspace of `C^(dim_x + dim_y)`
//! whose coordinates are ordered `(x, y)`. Every finite-dimensional
//! subspace is closed, so all relations here are closed relations.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix, CVector};
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

/// A single-valued operator defined on a subspace of `X`.
///
/// Only the action of `matrix` on `domain` carries meaning; what it does on
/// `domain^⊥` is ignored by every operation.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOnSubspace {
    domain: Subspace,
    matrix: CMatrix,
}

impl OperatorOnSubspace {
    pub fn new(domain: Subspace, matrix: CMatrix) -> Result<Self> {
        if matrix.ncols() != domain.ambient_dim() {
            return Err(Error::mismatch(
                "operator matrix columns vs domain ambient",
                domain.ambient_dim(),
                matrix.ncols(),
            ));
        }
        matrix::ensure_finite(&matrix)?;
        Ok(Self { domain, matrix })
    }

    /// Everywhere-defined operator.
    pub fn everywhere(matrix: CMatrix) -> Self {
        Self {
            domain: Subspace::full(matrix.ncols()),
            matrix,
        }
    }

    pub fn scalar(n: usize, lambda: Complex64) -> Self {
        Self::everywhere(matrix::identity(n) * lambda)
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim_x(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn dim_y(&self) -> usize {
        self.matrix.nrows()
    }

    /// The matrix with its action on `domain^⊥` replaced by zero.
    pub fn canonical_matrix(&self) -> CMatrix {
        &self.matrix * self.domain.projection_matrix()
    }

    /// Operator norm of the restriction to the domain.
    pub fn norm(&self) -> f64 {
        matrix::op_norm(&(&self.matrix * self.domain.basis()))
    }

    /// `{(x, Ax) : x ∈ D(A)}`.
    pub fn graph(&self) -> LinearRelation {
        LinearRelation::from_operator(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRelation {
    dim_x: usize,
    dim_y: usize,
    graph: Subspace,
}

/// Result of shifting a relation by an operator.
#[derive(Debug, Clone)]
pub struct Shifted {
    pub relation: LinearRelation,
    /// `D(T) ⊂ D(A)`; when false the domain of the result has shrunk.
    pub domain_contained: bool,
}

impl LinearRelation {
    pub fn new(dim_x: usize, dim_y: usize, graph: Subspace) -> Result<Self> {
        if graph.ambient_dim() != dim_x + dim_y {
            return Err(Error::mismatch(
                "graph ambient dimension",
                dim_x + dim_y,
                graph.ambient_dim(),
            ));
        }
        Ok(Self { dim_x, dim_y, graph })
    }

    /// Relation spanned by the columns of `columns`, read as `(x, y)` pairs.
    pub fn from_columns(dim_x: usize, dim_y: usize, columns: &CMatrix, tol: &Tolerances) -> Result<Self> {
        if columns.nrows() != dim_x + dim_y {
            return Err(Error::mismatch("relation columns", dim_x + dim_y, columns.nrows()));
        }
        Self::new(dim_x, dim_y, Subspace::span(columns, tol)?)
    }

    fn from_columns_scaled(dim_x: usize, dim_y: usize, columns: &CMatrix, tol: &Tolerances, scale: f64) -> Self {
        Self {
            dim_x,
            dim_y,
            graph: Subspace::span_scaled(columns, tol, scale),
        }
    }

    pub fn from_operator(op: &OperatorOnSubspace) -> Self {
        let q = op.domain.basis();
        let columns = matrix::vstack(q, &(&op.matrix * q));
        let tol = Tolerances::default();
        Self::from_columns_scaled(op.dim_x(), op.dim_y(), &columns, &tol, 1.0)
    }

    /// Graph of an everywhere-defined matrix.
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self::from_operator(&OperatorOnSubspace::everywhere(m.clone()))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(&matrix::identity(n))
    }

    /// `{(x, Ax + m) : x ∈ D, m ∈ M}`.
    pub fn from_parts(
        domain: &Subspace,
        op: &CMatrix,
        mul_part: &Subspace,
        tol: &Tolerances,
    ) -> Result<Self> {
        let dim_x = domain.ambient_dim();
        let dim_y = mul_part.ambient_dim();
        if op.shape() != (dim_y, dim_x) {
            return Err(Error::mismatch("operator part rows", dim_y, op.nrows()));
        }
        let q = domain.basis();
        let graph_part = matrix::vstack(q, &(op * q));
        let mul = matrix::vstack(&matrix::zeros(dim_x, mul_part.dim()), mul_part.basis());
        let columns = matrix::hstack(&graph_part, &mul);
        Ok(Self::from_columns_scaled(dim_x, dim_y, &columns, tol, 1.0))
    }

    /// `{0} × M`.
    pub fn pure_multivalued(dim_x: usize, mul_part: &Subspace) -> Self {
        let columns = matrix::vstack(&matrix::zeros(dim_x, mul_part.dim()), mul_part.basis());
        Self {
            dim_x,
            dim_y: mul_part.ambient_dim(),
            graph: Subspace::from_orthonormal(columns),
        }
    }

    pub fn dim_x(&self) -> usize {
        self.dim_x
    }

    pub fn dim_y(&self) -> usize {
        self.dim_y
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    /// Dimension of the graph.
    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    fn gx(&self) -> CMatrix {
        self.graph.basis().rows(0, self.dim_x).into_owned()
    }

    fn gy(&self) -> CMatrix {
        self.graph.basis().rows(self.dim_x, self.dim_y).into_owned()
    }

    /// Column space and kernel-image of one coordinate block of the graph
    /// basis: `(span(first), other·ker(first))`.
    fn slice(first: &CMatrix, other: &CMatrix, tol: &Tolerances) -> (Subspace, Subspace) {
        let dec = matrix::svd(first);
        let cutoff = tol.eps_rank;
        let r = dec.values.iter().take_while(|&&s| s > cutoff).count();
        let image = Subspace::from_orthonormal(dec.u.columns(0, r).into_owned());
        let kernel = matrix::null_space(first, tol.eps_rank, 1.0);
        let fibre = Subspace::span_scaled(&(other * kernel), tol, 1.0);
        (image, fibre)
    }

    pub fn domain(&self, tol: &Tolerances) -> Subspace {
        Self::slice(&self.gx(), &self.gy(), tol).0
    }

    /// `T(0) = {y : (0, y) ∈ T}`.
    pub fn mul_part_space(&self, tol: &Tolerances) -> Subspace {
        Self::slice(&self.gx(), &self.gy(), tol).1
    }

    pub fn range(&self, tol: &Tolerances) -> Subspace {
        Self::slice(&self.gy(), &self.gx(), tol).0
    }

    /// `T⁻¹(0) = {x : (x, 0) ∈ T}`.
    pub fn kernel(&self, tol: &Tolerances) -> Subspace {
        Self::slice(&self.gy(), &self.gx(), tol).1
    }

    pub fn is_single_valued(&self, tol: &Tolerances) -> bool {
        self.mul_part_space(tol).is_zero()
    }

    /// `T⁻¹ = {(y, x) : (x, y) ∈ T}`.
    pub fn inverse(&self) -> Self {
        let columns = matrix::vstack(&self.gy(), &self.gx());
        Self {
            dim_x: self.dim_y,
            dim_y: self.dim_x,
            graph: Subspace::from_orthonormal(columns),
        }
    }

    /// `αT = {(x, αy) : (x, y) ∈ T}`.
    pub fn scalar_mul(&self, alpha: Complex64, tol: &Tolerances) -> Self {
        let columns = matrix::vstack(&self.gx(), &(self.gy() * alpha));
        Self::from_columns_scaled(self.dim_x, self.dim_y, &columns, tol, alpha.norm().max(1.0))
    }

    fn same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.dim_x != other.dim_x {
            return Err(Error::mismatch(context, self.dim_x, other.dim_x));
        }
        if self.dim_y != other.dim_y {
            return Err(Error::mismatch(context, self.dim_y, other.dim_y));
        }
        Ok(())
    }

    /// `T + S = {(x, y + z) : (x, y) ∈ T, (x, z) ∈ S}`.
    pub fn add(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        self.same_shape(other, "relation sum")?;
        let (tx, ty) = (self.gx(), self.gy());
        let (sx, sy) = (other.gx(), other.gy());
        let coupling = matrix::hstack(&tx, &(-&sx));
        let kernel = matrix::null_space(&coupling, tol.eps_rank, 1.0);
        let a = kernel.rows(0, self.dim()).into_owned();
        let b = kernel.rows(self.dim(), other.dim()).into_owned();
        let columns = matrix::vstack(&(&tx * &a), &(&ty * &a + &sy * &b));
        Ok(Self::from_columns_scaled(self.dim_x, self.dim_y, &columns, tol, 1.0))
    }

    /// `T − S := T + (−1)S`.
    pub fn sub(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        self.add(&other.scalar_mul(Complex64::new(-1.0, 0.0), tol), tol)
    }

    /// The product `self · inner`: `{(x, z) : (x, y) ∈ inner, (y, z) ∈ self}`.
    pub fn compose(&self, inner: &Self, tol: &Tolerances) -> Result<Self> {
        if inner.dim_y != self.dim_x {
            return Err(Error::mismatch("relation product", self.dim_x, inner.dim_y));
        }
        let coupling = matrix::hstack(&inner.gy(), &(-&self.gx()));
        let kernel = matrix::null_space(&coupling, tol.eps_rank, 1.0);
        let a = kernel.rows(0, inner.dim()).into_owned();
        let b = kernel.rows(inner.dim(), self.dim()).into_owned();
        let columns = matrix::vstack(&(inner.gx() * a), &(self.gy() * b));
        Ok(Self::from_columns_scaled(inner.dim_x, self.dim_y, &columns, tol, 1.0))
    }

    /// `T* = {(f, g) : ⟨g, x⟩ = ⟨f, y⟩ for all (x, y) ∈ T}`, computed as the
    /// orthogonal complement of `{(−y, x) : (x, y) ∈ T}` in `Y × X`.
    pub fn adjoint(&self, tol: &Tolerances) -> Self {
        let rotated = matrix::vstack(&(-self.gy()), &self.gx());
        Self {
            dim_x: self.dim_y,
            dim_y: self.dim_x,
            graph: Subspace::from_orthonormal(rotated).complement(tol),
        }
    }

    fn require_square(&self, context: &'static str) -> Result<()> {
        if self.dim_x != self.dim_y {
            return Err(Error::mismatch(context, self.dim_x, self.dim_y));
        }
        Ok(())
    }

    /// `T ⊂ T*`.
    pub fn is_hermitian(&self, tol: &Tolerances) -> Result<bool> {
        self.require_square("hermitian test")?;
        Ok(self.graph.is_subset_of(self.adjoint(tol).graph(), tol))
    }

    /// `T = T*`.
    pub fn is_self_adjoint(&self, tol: &Tolerances) -> Result<bool> {
        self.require_square("self-adjointness test")?;
        Ok(self.graph.equals(self.adjoint(tol).graph(), tol))
    }

    /// `T + sign·A`, i.e. `{(x, y + sign·Ax) : (x, y) ∈ T, x ∈ D(A)}`.
    pub fn shift_by_operator(&self, a: &OperatorOnSubspace, sign: f64, tol: &Tolerances) -> Result<Shifted> {
        if a.dim_x() != self.dim_x || a.dim_y() != self.dim_y {
            return Err(Error::mismatch("operator shift", self.dim_x, a.dim_x()));
        }
        let domain_contained = self.domain(tol).is_subset_of(a.domain(), tol);
        let shifted = a.graph().scalar_mul(Complex64::new(sign, 0.0), tol);
        Ok(Shifted {
            relation: self.add(&shifted, tol)?,
            domain_contained,
        })
    }

    /// `T − λI` on a square relation.
    pub fn shift_scalar(&self, lambda: Complex64, tol: &Tolerances) -> Result<Self> {
        self.require_square("scalar shift")?;
        let a = OperatorOnSubspace::scalar(self.dim_x, lambda);
        Ok(self.shift_by_operator(&a, -1.0, tol)?.relation)
    }

    pub fn contains_pair(&self, x: &CVector, y: &CVector, tol: &Tolerances) -> bool {
        if x.len() != self.dim_x || y.len() != self.dim_y {
            return false;
        }
        let v = CVector::from_iterator(self.dim_x + self.dim_y, x.iter().chain(y.iter()).copied());
        self.graph.contains(&v, tol)
    }

    pub fn equals(&self, other: &Self, tol: &Tolerances) -> bool {
        self.dim_x == other.dim_x && self.dim_y == other.dim_y && self.graph.equals(&other.graph, tol)
    }

    /// Gap between two graphs; `f64::INFINITY` when the shapes differ.
    pub fn graph_gap(&self, other: &Self) -> f64 {
        if self.dim_x != other.dim_x || self.dim_y != other.dim_y {
            return f64::INFINITY;
        }
        self.graph.gap(&other.graph).unwrap_or(f64::INFINITY)
    }

    pub fn is_subset_of(&self, other: &Self, tol: &Tolerances) -> bool {
        self.dim_x == other.dim_x && self.dim_y == other.dim_y && self.graph.is_subset_of(&other.graph, tol)
    }

    /// The operator whose graph is `self`, with matrix zero on `D(T)^⊥`.
    pub fn as_operator(&self, tol: &Tolerances) -> Result<OperatorOnSubspace> {
        if !self.is_single_valued(tol) {
            return Err(Error::NotAnOperator("relation has a nonzero multivalued part".into()));
        }
        let gx = self.gx();
        let m = self.gy() * matrix::pinv(&gx, tol.eps_rank);
        OperatorOnSubspace::new(self.domain(tol), m)
    }

    /// Matrix of an everywhere-defined single-valued relation.
    pub fn to_matrix(&self, tol: &Tolerances) -> Result<CMatrix> {
        let op = self.as_operator(tol)?;
        if op.domain().dim() != self.dim_x {
            return Err(Error::NotAnOperator(format!(
                "domain has dimension {} in a space of dimension {}",
                op.domain().dim(),
                self.dim_x
            )));
        }
        Ok(op.matrix)
    }

    /// Orthogonal projection of `X × Y` onto the graph.
    pub fn graph_projection(&self) -> CMatrix {
        self.graph.projection_matrix()
    }

    /// Re-expresses a relation on `U × V` for subspaces `U ⊂ X`, `V ⊂ Y`
    /// in the coordinates of orthonormal bases of `U` and `V`. The part of
    /// the graph outside `U × V` is discarded.
    pub fn restrict(&self, u: &Subspace, v: &Subspace, tol: &Tolerances) -> Result<Self> {
        if u.ambient_dim() != self.dim_x || v.ambient_dim() != self.dim_y {
            return Err(Error::mismatch("restriction spaces", self.dim_x, u.ambient_dim()));
        }
        let box_basis = matrix::block_diag(u.basis(), v.basis());
        let inside = self.graph.intersect(&Subspace::from_orthonormal(box_basis.clone()), tol)?;
        let coords = box_basis.adjoint() * inside.basis();
        Ok(Self::from_columns_scaled(u.dim(), v.dim(), &coords, tol, 1.0))
    }

    /// Inverse of [`LinearRelation::restrict`]: embeds a relation given in
    /// coordinates of `U × V` back into `X × Y`.
    pub fn embed(&self, u: &Subspace, v: &Subspace) -> Result<Self> {
        if u.dim() != self.dim_x || v.dim() != self.dim_y {
            return Err(Error::mismatch("embedding spaces", self.dim_x, u.dim()));
        }
        let box_basis = matrix::block_diag(u.basis(), v.basis());
        Ok(Self {
            dim_x: u.ambient_dim(),
            dim_y: v.ambient_dim(),
            graph: Subspace::from_orthonormal(box_basis * self.graph.basis()),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    dim_x: usize,
    dim_y: usize,
    #[serde(with = "crate::matrix::json")]
    graph_basis: CMatrix,
}

impl Serialize for LinearRelation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RelationJson {
            dim_x: self.dim_x,
            dim_y: self.dim_y,
            graph_basis: self.graph.basis().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearRelation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RelationJson::deserialize(d)?;
        if raw.dim_x == 0 || raw.dim_y == 0 {
            return Err(serde::de::Error::custom("dim_x and dim_y must be positive"));
        }
        LinearRelation::from_columns(raw.dim_x, raw.dim_y, &raw.graph_basis, &Tolerances::default())
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    domain: Subspace,
    #[serde(with = "crate::matrix::json")]
    matrix: CMatrix,
}

impl Serialize for OperatorOnSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson {
            domain: self.domain.clone(),
            matrix: self.matrix.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorOnSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = OperatorJson::deserialize(d)?;
        OperatorOnSubspace::new(raw.domain, raw.matrix).map_err(serde::de::Error::custom)
    }
}
