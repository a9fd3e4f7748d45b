use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::SeededRng;

/// Uniformly random dense matrix.
pub fn random_dense(field: PrimeField, m: usize, n: usize, rng: &mut SeededRng) -> DenseMatrix {
    DenseMatrix::from_canonical(field, m, n, rng.vector(&field, m * n))
}

/// Random sparse matrix, each entry nonzero with probability `density`.
pub fn random_sparse(field: PrimeField, m: usize, n: usize, density: f64, rng: &mut SeededRng) -> SparseMatrix {
    let mut data = Vec::with_capacity(m);
    for _ in 0..m {
        let mut row = Vec::new();
        for j in 0..n {
            if rng.chance(density) {
                row.push((j, rng.nonzero(&field)));
            }
        }
        data.push(row);
    }
    SparseMatrix::from_rows_unchecked(field, m, n, data)
}

/// Random `m x n` matrix of rank exactly `r`.
///
/// Built as (unit lower-triangular `m x r`) times (random echelon `r x n`
/// with random pivot columns and nonzero pivots), then row-permuted.
pub fn random_matrix_with_rank(field: PrimeField, m: usize, n: usize, r: usize, seed: u64) -> Result<DenseMatrix> {
    if r > m.min(n) {
        return Err(Error::domain(format!("rank {r} exceeds min({m}, {n})")));
    }
    let mut rng = SeededRng::new(seed);
    let mut l = DenseMatrix::zeros(field, m, r);
    for i in 0..m {
        for j in 0..r.min(i + 1) {
            let v = if i == j { 1 } else { rng.element(&field) };
            l.set_canonical(i, j, v);
        }
    }
    let mut cols: Vec<usize> = rng.permutation(n)[..r].to_vec();
    cols.sort_unstable();
    let mut e = DenseMatrix::zeros(field, r, n);
    for (k, &c) in cols.iter().enumerate() {
        e.set_canonical(k, c, rng.nonzero(&field));
        for j in c + 1..n {
            e.set_canonical(k, j, rng.element(&field));
        }
    }
    let a = l.mul(&e)?;
    let perm = rng.permutation(m);
    let a = a.select_rows(&perm);
    debug_assert_eq!(naive_rank(&a), r);
    Ok(a)
}

/// Square sparse test corpus: `count` matrices of order `min_n..=max_n`
/// with densities spread over `[0.01, 0.10]`.
///
/// Kinds cycle through plain random, random plus a nonzero diagonal, and
/// diagonal-backed with a few rows replaced by multiples of others, so the
/// corpus mixes singular, nonsingular and planted rank-deficient inputs.
pub fn sparse_corpus(field: PrimeField, count: usize, min_n: usize, max_n: usize, seed: u64) -> Vec<SparseMatrix> {
    let mut rng = SeededRng::new(seed);
    (0..count)
        .map(|i| {
            let n = min_n + rng.index(max_n - min_n + 1);
            let density = 0.01 + 0.09 * i as f64 / count.saturating_sub(1).max(1) as f64;
            let base = random_sparse(field, n, n, density, &mut rng);
            let mut t: Vec<(usize, usize, i64)> = base.triplets().collect();
            if i % 3 != 0 {
                for d in 0..n {
                    if base.get(d, d) == 0 {
                        t.push((d, d, rng.nonzero(&field)));
                    }
                }
            }
            let mut a = SparseMatrix::from_triplets(field, n, n, t).expect("indices in range");
            if i % 3 == 2 && n > 1 {
                let copies = 1 + rng.index(4.min(n - 1));
                let mut data = a.row_data().to_vec();
                for _ in 0..copies {
                    let (src, dst) = (rng.index(n), rng.index(n));
                    if src != dst {
                        let c = rng.nonzero(&field);
                        data[dst] = data[src].iter().map(|&(j, v)| (j, field.mul(c, v))).collect();
                    }
                }
                a = SparseMatrix::from_rows_unchecked(field, n, n, data);
            }
            a
        })
        .collect()
}

/// Textbook Gaussian elimination rank, used as an independent check.
pub fn naive_rank(a: &DenseMatrix) -> usize {
    let f = *a.field();
    let mut w = a.clone();
    let (m, n) = w.shape();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..m).find(|&i| w.get(i, c) != 0) else {
            continue;
        };
        w.swap_rows(rank, p);
        let inv = f.inv(w.get(rank, c)).expect("nonzero pivot");
        for i in rank + 1..m {
            let x = w.get(i, c);
            if x == 0 {
                continue;
            }
            let factor = f.mul(x, inv);
            for j in c..n {
                let v = f.sub(w.get(i, j), f.mul(factor, w.get(rank, j)));
                w.set_canonical(i, j, v);
            }
        }
        rank += 1;
    }
    rank
}
