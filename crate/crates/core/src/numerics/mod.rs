//! Exact ℚ(i) linear algebra and the float kernels used by the scaling loops.

pub mod exact;
pub mod float;
pub mod gauss;

pub use exact::{ExactMatrix, Subspace};
pub use float::{approx_rational, cholesky, lower_triangular_inverse, trace_norm_distance, CMat, HermitianFloat};
pub use gauss::GaussRat;

/// Rank over ℚ(i).
pub fn exact_rank(m: &ExactMatrix) -> usize {
    m.rank()
}

/// Right-kernel basis as columns.
pub fn exact_kernel(m: &ExactMatrix) -> ExactMatrix {
    m.kernel()
}

/// Canonical column-space basis.
pub fn exact_image(m: &ExactMatrix) -> ExactMatrix {
    m.image().basis().clone()
}

/// Basis of the intersection of two column spans in the same ambient space.
pub fn exact_intersection(b1: &ExactMatrix, b2: &ExactMatrix) -> ExactMatrix {
    Subspace::span(b1).intersection(&Subspace::span(b2)).basis().clone()
}
