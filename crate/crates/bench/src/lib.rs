//! Seeded inputs shared by the criterion benches.

use ffla_core::matrix::{random_dense, random_matrix_with_rank, random_sparse};
use ffla_core::tiny::PackedGF2Matrix;
use ffla_core::{DenseMatrix, PrimeField, SeededRng, SparseMatrix};

pub const P_WORD: u64 = 65521;
pub const P_31: u64 = 2_147_483_647;

pub fn field(p: u64) -> PrimeField {
    PrimeField::classic(p).expect("prime modulus")
}

/// Two uniformly random `n x n` matrices.
pub fn dense_pair(p: u64, n: usize, seed: u64) -> (DenseMatrix, DenseMatrix) {
    let f = field(p);
    let mut rng = SeededRng::new(seed);
    (random_dense(f, n, n, &mut rng), random_dense(f, n, n, &mut rng))
}

pub fn full_rank(p: u64, n: usize, seed: u64) -> DenseMatrix {
    random_matrix_with_rank(field(p), n, n, n, seed).expect("rank fits")
}

pub fn gf2_pair(n: usize, seed: u64) -> (PackedGF2Matrix, PackedGF2Matrix) {
    let mut rng = SeededRng::new(seed);
    (
        PackedGF2Matrix::random(n, n, &mut rng),
        PackedGF2Matrix::random(n, n, &mut rng),
    )
}

/// Random sparse matrix with a nonzero diagonal, so it is usually nonsingular.
pub fn sparse_nonsingular(p: u64, n: usize, density: f64, seed: u64) -> SparseMatrix {
    let f = field(p);
    let mut rng = SeededRng::new(seed);
    let a = random_sparse(f, n, n, density, &mut rng);
    let mut t: Vec<_> = a.triplets().filter(|&(i, j, _)| i != j).collect();
    t.extend((0..n).map(|i| (i, i, rng.nonzero(&f))));
    SparseMatrix::from_triplets(f, n, n, t).expect("indices in range")
}
