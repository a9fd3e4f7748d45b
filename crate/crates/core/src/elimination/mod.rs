//! PLE-based dense elimination and the triangular kernels it reduces to.

mod derived;
mod echelon;
mod ple;
mod triangular;

pub use derived::{det_from_ple, determinant, inverse, nullspace_basis, rank, solve, solve_matrix, SolveOutcome};
pub use echelon::{
    is_reduced_row_echelon, is_row_echelon, reduced_row_echelon, row_echelon, ReducedRowEchelon, RowEchelon,
};
pub use ple::{ple, PleFactors};
pub use triangular::{densify_triangle, trmm, trsm, trtri, trtrm, Diag, Side, TriangularSpec, Uplo};
