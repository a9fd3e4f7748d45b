//! Exact linear algebra over word-size finite fields.
//!
//! Dense kernels (classical, delayed-reduction and Strassen-Winograd
//! multiplication, PLE-based elimination), tiny-field packed kernels,
//! blackbox iterative methods and sparse elimination, all deterministic
//! given a seed.

pub mod blackbox;
pub mod charpoly;
pub mod dense_mm;
pub mod elimination;
pub mod error;
pub mod field;
pub mod matrix;
pub mod rng;
pub mod sparse_elim;
pub mod tiny;

pub use blackbox::{BlackboxOptions, LasVegas, ProbabilityReport};
pub use charpoly::{dense_charpoly, dense_minpoly};
pub use dense_mm::{MatMul, MulAlgorithm, MulConfig, OpCounter, OpCounts, ReductionMode};
pub use elimination::{PleFactors, SolveOutcome};
pub use error::{Error, Result};
pub use field::{ExtElem, ExtField, Polynomial, PrimeField, Representation};
pub use matrix::{Blackbox, DenseMatrix, MatrixData, MatrixFormat, Permutation, SparseMatrix};
pub use rng::SeededRng;
pub use sparse_elim::{HybridConfig, PivotPolicy, SparseElimination};
