use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix};
use crate::relation::LinearRelation;
use crate::report::CheckReport;
use crate::schatten::SingularSpectrum;
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

/// Orthogonal projection of `X × Y` onto `graph(T)`.
pub fn graph_projection(t: &LinearRelation) -> CMatrix {
    t.graph_projection()
}

/// `P_T − P_S` together with its singular values.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionGap {
    #[serde(with = "crate::matrix::json")]
    pub p_t: CMatrix,
    #[serde(with = "crate::matrix::json")]
    pub p_s: CMatrix,
    #[serde(with = "crate::matrix::json")]
    pub gap: CMatrix,
    pub spectrum: SingularSpectrum,
    /// `max{sup_{ω ∈ T, ‖ω‖=1} d(ω, S), sup_{η ∈ S, ‖η‖=1} d(η, T)}`,
    /// from the sines of the principal angles between the graphs.
    pub sup_distance: f64,
}

/// Largest distance from a unit vector of `from` to `to`: the largest
/// principal-angle sine, or 1 when `from` is too large to fit in `to`.
fn largest_sine(from: &Subspace, to: &Subspace) -> f64 {
    if from.dim() == 0 {
        return 0.0;
    }
    if to.dim() < from.dim() {
        return 1.0;
    }
    let residual = from.basis() - to.basis() * (to.basis().adjoint() * from.basis());
    matrix::op_norm(&residual).min(1.0)
}

pub fn projection_gap(s: &LinearRelation, t: &LinearRelation) -> Result<ProjectionGap> {
    if s.dim_x() != t.dim_x() {
        return Err(Error::mismatch("projection gap, X", s.dim_x(), t.dim_x()));
    }
    if s.dim_y() != t.dim_y() {
        return Err(Error::mismatch("projection gap, Y", s.dim_y(), t.dim_y()));
    }
    let p_t = graph_projection(t);
    let p_s = graph_projection(s);
    let gap = &p_t - &p_s;
    let spectrum = SingularSpectrum::from_values(matrix::singular_values(&gap));
    let sup_distance = largest_sine(t.graph(), s.graph()).max(largest_sine(s.graph(), t.graph()));
    Ok(ProjectionGap {
        p_t,
        p_s,
        gap,
        spectrum,
        sup_distance,
    })
}

impl ProjectionGap {
    pub fn norm(&self) -> f64 {
        self.spectrum.op_norm
    }

    pub fn trace_norm(&self) -> f64 {
        self.spectrum.trace_norm
    }

    /// `‖P_T − P_S‖` against the principal-angle sup-distance, plus the
    /// bound `‖P_T − P_S‖ ≤ 1`.
    pub fn check_sup_distance(&self, tol: &Tolerances) -> CheckReport {
        let norm = self.norm();
        let residual = (norm - self.sup_distance).abs().max(norm - 1.0);
        CheckReport::identity(
            "gap_norm_is_sup_distance",
            "Proposition 3.1 proof; Definition 3.1",
            residual,
            tol.eps_eq,
        )
        .with_detail("gap_norm", norm)
        .with_detail("sup_distance", self.sup_distance)
        .with_detail("trace_norm", self.trace_norm())
    }
}

/// `P_{T⁻¹} − P_{S⁻¹}` is the coordinate flip of `P_T − P_S`, so the two
/// share their singular values.
pub fn check_flip_isometry(s: &LinearRelation, t: &LinearRelation, tol: &Tolerances) -> Result<CheckReport> {
    let direct = projection_gap(s, t)?;
    let inverted = projection_gap(&s.inverse(), &t.inverse())?;
    let flip = matrix::swap_matrix(t.dim_x(), t.dim_y());
    let flipped = &flip * &direct.gap * flip.transpose();
    let matrix_residual = matrix::op_norm(&(flipped - &inverted.gap));
    let sv_residual = direct
        .spectrum
        .values
        .iter()
        .zip(&inverted.spectrum.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CheckReport::identity(
        "inverse_gap_is_flipped_gap",
        "Proposition 3.2 proof",
        matrix_residual.max(sv_residual),
        tol.eps_eq,
    )
    .with_detail("matrix_residual", matrix_residual)
    .with_detail("singular_value_residual", sv_residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::from_real_rows;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn full_space_projects_to_identity() {
        let t = LinearRelation::new(1, 1, Subspace::full(2)).unwrap();
        assert!((graph_projection(&t) - matrix::identity(2)).norm() < 1e-14);
    }

    #[test]
    fn unit_against_zero_on_a_line() {
        // P_T = [[1,1],[1,1]]/2, P_S = [[1,0],[0,0]]; the difference has
        // eigenvalues ±1/√2.
        let t = LinearRelation::from_matrix(&from_real_rows(&[&[1.0]]));
        let s = LinearRelation::from_matrix(&from_real_rows(&[&[0.0]]));
        let g = projection_gap(&s, &t).unwrap();
        let r = 0.5f64.sqrt();
        assert!((g.norm() - r).abs() < 1e-14);
        assert!((g.trace_norm() - 2.0 * r).abs() < 1e-14);
        assert!(g.check_sup_distance(&tol()).passed());
    }

    #[test]
    fn equal_relations_have_zero_gap() {
        let t = LinearRelation::from_matrix(&from_real_rows(&[&[1.0, 2.0], &[0.0, 3.0]]));
        let g = projection_gap(&t, &t).unwrap();
        assert!(g.norm() < 1e-14);
        assert!(g.sup_distance < 1e-14);
    }

    #[test]
    fn orthogonal_lines_have_unit_gap() {
        let t = LinearRelation::new(1, 1, Subspace::coordinate(2, &[0])).unwrap();
        let s = LinearRelation::new(1, 1, Subspace::coordinate(2, &[1])).unwrap();
        let g = projection_gap(&s, &t).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-14);
        assert!((g.sup_distance - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let t = LinearRelation::identity(2);
        let s = LinearRelation::identity(3);
        assert!(matches!(projection_gap(&s, &t), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn flip_preserves_spectrum() {
        let t = LinearRelation::from_matrix(&from_real_rows(&[&[1.0, 2.0], &[0.0, 3.0]]));
        let s = LinearRelation::from_matrix(&from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!(check_flip_isometry(&s, &t, &tol()).unwrap().passed());
    }
}
