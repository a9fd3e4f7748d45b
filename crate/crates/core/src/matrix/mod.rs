//! Matrix containers, permutations, blackbox operators, random fixtures
//! and file I/O.

mod blackbox;
mod dense;
pub mod io;
mod perm;
mod random;
mod sparse;

pub use blackbox::{adjoint_consistent, densify, Blackbox, CountingBlackbox};
pub use dense::DenseMatrix;
pub use io::{MatrixData, MatrixFormat};
pub use perm::Permutation;
pub use random::{naive_rank, random_dense, random_matrix_with_rank, random_sparse, sparse_corpus};
pub use sparse::{SparseMatrix, SparseRow};
