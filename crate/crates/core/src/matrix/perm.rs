use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// A permutation of `0..n`, with the permutation matrix `P` defined by
/// `P[i, images[i]] = 1`, so `(P A)` row `i` is row `images[i]` of `A`.
///
/// Permutations produced by elimination also keep their transposition
/// sequence (LAPACK pivot form): `P^T A` is `A` with rows `i` and
/// `pivots[i]` swapped for `i = 0, 1, ...` in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
    pivots: Option<Vec<usize>>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
            pivots: Some((0..n).collect()),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::domain("images do not form a bijection"));
            }
        }
        Ok(Permutation { images, pivots: None })
    }

    /// From a transposition sequence on `0..n` (`pivots.len() <= n`).
    pub fn from_transpositions(n: usize, pivots: &[usize]) -> Result<Self> {
        if pivots.len() > n || pivots.iter().any(|&p| p >= n) {
            return Err(Error::domain("transposition index out of range"));
        }
        // idx[r] = source row of row r of P^T A.
        let mut idx: Vec<usize> = (0..n).collect();
        for (i, &p) in pivots.iter().enumerate() {
            idx.swap(i, p);
        }
        // P^T has images idx, so P is its inverse.
        let mut images = vec![0; n];
        for (r, &s) in idx.iter().enumerate() {
            images[s] = r;
        }
        let mut full: Vec<usize> = (0..n).collect();
        full[..pivots.len()].copy_from_slice(pivots);
        Ok(Permutation {
            images,
            pivots: Some(full),
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn transpositions(&self) -> Option<&[usize]> {
        self.pivots.as_deref()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `+1` or `-1`: parity of the transposition sequence when known,
    /// otherwise of the cycle decomposition.
    pub fn sign(&self) -> i64 {
        let swaps = match &self.pivots {
            Some(p) => p.iter().enumerate().filter(|&(i, &q)| i != q).count(),
            None => {
                let mut seen = vec![false; self.len()];
                let mut swaps = 0;
                for s in 0..self.len() {
                    let mut len = 0;
                    let mut i = s;
                    while !seen[i] {
                        seen[i] = true;
                        i = self.images[i];
                        len += 1;
                    }
                    swaps += len.max(1) - 1;
                }
                swaps
            }
        };
        if swaps % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation {
            images: inv,
            pivots: None,
        }
    }

    /// The permutation whose matrix is `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::dims("permutation sizes differ"));
        }
        // (P Q A)_i = (Q A)_{p(i)} = A_{q(p(i))}
        let images = self.images.iter().map(|&i| other.images[i]).collect();
        Ok(Permutation { images, pivots: None })
    }

    pub fn to_matrix(&self, field: crate::field::PrimeField) -> DenseMatrix {
        let n = self.len();
        let mut m = DenseMatrix::zeros(field, n, n);
        for (i, &j) in self.images.iter().enumerate() {
            m.set_canonical(i, j, 1);
        }
        m
    }

    /// `P A`
    pub fn apply_rows(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.rows() != self.len() {
            return Err(Error::dims("row permutation size"));
        }
        Ok(a.select_rows(&self.images))
    }

    /// `P^T A`
    pub fn apply_rows_transpose(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        self.inverse().apply_rows(a)
    }

    /// `A P`: column `images[i]` of the result is column `i` of `A`.
    pub fn apply_cols(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.cols() != self.len() {
            return Err(Error::dims("column permutation size"));
        }
        Ok(a.select_cols(&self.inverse().images))
    }

    /// `P v`
    pub fn apply_vec<T: Copy>(&self, v: &[T]) -> Vec<T> {
        self.images.iter().map(|&i| v[i]).collect()
    }

    /// `P^T v`
    pub fn apply_vec_transpose<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); v.len()];
        for (i, &j) in self.images.iter().enumerate() {
            out[j] = v[i];
        }
        out
    }
}
