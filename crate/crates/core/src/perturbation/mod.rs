//! Graph projections, projection gaps and the trace class perturbation
//! identities and inequalities built on them.
//!
//! Every check returns a [`CheckReport`](crate::report::CheckReport).
//! Hypotheses are recomputed from the relations themselves; when one fails
//! the check reports `hypothesis_violated` instead of asserting anything.

mod additive;
mod gap;
mod reduction;
mod resolvent;
mod scenario;
mod shift;

pub use additive::{additive_build, check_compressed_resolvent_difference, check_resolvent_product_identities};
pub use gap::{check_flip_isometry, graph_projection, projection_gap, ProjectionGap};
pub use reduction::reduce_to_operator_parts;
pub use resolvent::{
    check_block_assembly, check_resolvent_criterion, check_trace_class_equivalence, check_w_identities,
    gamma_membership, is_in_gamma_set, resolvent_blocks, GammaMembership, ResolventBlocks,
};
pub use scenario::{AdditiveFlags, AdditiveScenario, HypothesisFlags, PerturbationScenario, DEFAULT_LAMBDAS};
pub use shift::{check_shift_gap_bounds, check_shift_sv_bounds, shift_constant};

use crate::matrix::{self, CMatrix};

/// `‖lhs − rhs‖ / max(1, ‖lhs‖, ‖rhs‖)`.
pub(crate) fn relative_residual(lhs: &CMatrix, rhs: &CMatrix) -> f64 {
    let scale = matrix::op_norm(lhs).max(matrix::op_norm(rhs)).max(1.0);
    matrix::op_norm(&(lhs - rhs)) / scale
}
