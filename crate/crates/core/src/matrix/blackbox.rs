use std::sync::atomic::{AtomicU64, Ordering};

use crate::field::PrimeField;
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::SeededRng;

/// A linear operator accessed only through matrix-vector products.
///
/// Implementations may assume vector lengths match `cols()` (for `apply`)
/// and `rows()` (for `apply_transpose`); callers check dimensions.
pub trait Blackbox: Sync {
    fn field(&self) -> &PrimeField;
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// `A v`
    fn apply(&self, v: &[i64]) -> Vec<i64>;
    /// `A^T v`
    fn apply_transpose(&self, v: &[i64]) -> Vec<i64>;
}

impl Blackbox for DenseMatrix {
    fn field(&self) -> &PrimeField {
        DenseMatrix::field(self)
    }
    fn rows(&self) -> usize {
        DenseMatrix::rows(self)
    }
    fn cols(&self) -> usize {
        DenseMatrix::cols(self)
    }
    fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matvec_unchecked(v)
    }
    fn apply_transpose(&self, v: &[i64]) -> Vec<i64> {
        self.matvec_transpose_unchecked(v)
    }
}

impl Blackbox for SparseMatrix {
    fn field(&self) -> &PrimeField {
        SparseMatrix::field(self)
    }
    fn rows(&self) -> usize {
        SparseMatrix::rows(self)
    }
    fn cols(&self) -> usize {
        SparseMatrix::cols(self)
    }
    fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matvec_unchecked(v)
    }
    fn apply_transpose(&self, v: &[i64]) -> Vec<i64> {
        self.matvec_transpose_unchecked(v)
    }
}

impl<B: Blackbox + ?Sized> Blackbox for &B {
    fn field(&self) -> &PrimeField {
        (**self).field()
    }
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn cols(&self) -> usize {
        (**self).cols()
    }
    fn apply(&self, v: &[i64]) -> Vec<i64> {
        (**self).apply(v)
    }
    fn apply_transpose(&self, v: &[i64]) -> Vec<i64> {
        (**self).apply_transpose(v)
    }
}

/// Wraps an operator and counts its applications.
pub struct CountingBlackbox<B> {
    inner: B,
    applies: AtomicU64,
    transposes: AtomicU64,
}

impl<B: Blackbox> CountingBlackbox<B> {
    pub fn new(inner: B) -> Self {
        CountingBlackbox {
            inner,
            applies: AtomicU64::new(0),
            transposes: AtomicU64::new(0),
        }
    }

    pub fn applies(&self) -> u64 {
        self.applies.load(Ordering::Relaxed)
    }

    pub fn transposes(&self) -> u64 {
        self.transposes.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.applies.store(0, Ordering::Relaxed);
        self.transposes.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }
}

impl<B: Blackbox> Blackbox for CountingBlackbox<B> {
    fn field(&self) -> &PrimeField {
        self.inner.field()
    }
    fn rows(&self) -> usize {
        self.inner.rows()
    }
    fn cols(&self) -> usize {
        self.inner.cols()
    }
    fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.applies.fetch_add(1, Ordering::Relaxed);
        self.inner.apply(v)
    }
    fn apply_transpose(&self, v: &[i64]) -> Vec<i64> {
        self.transposes.fetch_add(1, Ordering::Relaxed);
        self.inner.apply_transpose(v)
    }
}

/// Materialize an operator column by column.
pub fn densify<B: Blackbox + ?Sized>(a: &B) -> DenseMatrix {
    let (m, n) = (a.rows(), a.cols());
    let mut d = DenseMatrix::zeros(*a.field(), m, n);
    let mut e = vec![0i64; n];
    for j in 0..n {
        e[j] = 1;
        for (i, v) in a.apply(&e).into_iter().enumerate() {
            d.set_canonical(i, j, v);
        }
        e[j] = 0;
    }
    d
}

/// `<u, A v> = <A^T u, v>` on `probes` random pairs.
pub fn adjoint_consistent<B: Blackbox + ?Sized>(a: &B, rng: &mut SeededRng, probes: usize) -> bool {
    let f = *a.field();
    (0..probes).all(|_| {
        let u = rng.vector(&f, a.rows());
        let v = rng.vector(&f, a.cols());
        f.dot(&u, &a.apply(&v)) == f.dot(&a.apply_transpose(&u), &v)
    })
}
