use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{naive_rank, Blackbox, DenseMatrix};
use crate::rng::SeededRng;

fn scale(f: &PrimeField, d: &[i64], v: &[i64]) -> Vec<i64> {
    d.iter().zip(v).map(|(&a, &b)| f.mul(a, b)).collect()
}

/// `D1 A^T D2 A D1` for an `m x n` operator `A`, with `D1` (`n x n`) and
/// `D2` (`m x m`) diagonal. Symmetric and `n x n`.
pub struct Symmetrized<B> {
    a: B,
    d1: Vec<i64>,
    d2: Vec<i64>,
}

impl<B: Blackbox> Symmetrized<B> {
    pub fn new(a: B, d1: Vec<i64>, d2: Vec<i64>) -> Result<Self> {
        if d1.len() != a.cols() || d2.len() != a.rows() {
            return Err(Error::dims("diagonal preconditioner sizes"));
        }
        Ok(Symmetrized { a, d1, d2 })
    }

    /// Diagonals drawn from `S = F \ {0}`.
    pub fn random(a: B, rng: &mut SeededRng) -> Self {
        let f = *a.field();
        let d1 = rng.nonzero_vector(&f, a.cols());
        let d2 = rng.nonzero_vector(&f, a.rows());
        Symmetrized { a, d1, d2 }
    }

    pub fn d1(&self) -> &[i64] {
        &self.d1
    }

    pub fn d2(&self) -> &[i64] {
        &self.d2
    }

    pub fn inner(&self) -> &B {
        &self.a
    }
}

impl<B: Blackbox> Blackbox for Symmetrized<B> {
    fn field(&self) -> &PrimeField {
        self.a.field()
    }
    fn rows(&self) -> usize {
        self.a.cols()
    }
    fn cols(&self) -> usize {
        self.a.cols()
    }
    fn apply(&self, v: &[i64]) -> Vec<i64> {
        let f = *self.a.field();
        let w = self.a.apply(&scale(&f, &self.d1, v));
        let w = self.a.apply_transpose(&scale(&f, &self.d2, &w));
        scale(&f, &self.d1, &w)
    }
    fn apply_transpose(&self, v: &[i64]) -> Vec<i64> {
        self.apply(v)
    }
}

/// `U A` with `U` unit upper bidiagonal, superdiagonal `u_1 .. u_{n-1}`.
pub struct BidiagonalLeft<B> {
    a: B,
    u: Vec<i64>,
}

impl<B: Blackbox> BidiagonalLeft<B> {
    pub fn new(a: B, u: Vec<i64>) -> Result<Self> {
        if u.len() + 1 != a.rows().max(1) {
            return Err(Error::dims("bidiagonal preconditioner needs rows - 1 entries"));
        }
        Ok(BidiagonalLeft { a, u })
    }

    pub fn random(a: B, rng: &mut SeededRng) -> Self {
        let f = *a.field();
        let u = rng.nonzero_vector(&f, a.rows().saturating_sub(1));
        BidiagonalLeft { a, u }
    }

    pub fn superdiagonal(&self) -> &[i64] {
        &self.u
    }
}

impl<B: Blackbox> Blackbox for BidiagonalLeft<B> {
    fn field(&self) -> &PrimeField {
        self.a.field()
    }
    fn rows(&self) -> usize {
        self.a.rows()
    }
    fn cols(&self) -> usize {
        self.a.cols()
    }
    fn apply(&self, v: &[i64]) -> Vec<i64> {
        let f = *self.a.field();
        let mut y = self.a.apply(v);
        for i in 0..self.u.len() {
            y[i] = f.mul_add(y[i], self.u[i], y[i + 1]);
        }
        y
    }
    fn apply_transpose(&self, v: &[i64]) -> Vec<i64> {
        let f = *self.a.field();
        let mut w = v.to_vec();
        for i in (1..w.len()).rev() {
            w[i] = f.mul_add(w[i], self.u[i - 1], w[i - 1]);
        }
        self.a.apply_transpose(&w)
    }
}

/// `A + U V` with `U` (`n x k`) and `V` (`k x n`).
pub struct RankUpdate<B> {
    a: B,
    u: DenseMatrix,
    v: DenseMatrix,
}

impl<B: Blackbox> RankUpdate<B> {
    pub fn new(a: B, u: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        if u.rows() != a.rows() || v.cols() != a.cols() || u.cols() != v.rows() {
            return Err(Error::dims("rank update factor shapes"));
        }
        Ok(RankUpdate { a, u, v })
    }

    /// `U`, `V` with entries in `S = F \ {0}`, redrawn until both have rank `k`.
    pub fn random(a: B, k: usize, rng: &mut SeededRng) -> Result<Self> {
        let f = *a.field();
        let (m, n) = (a.rows(), a.cols());
        if k > m.min(n) {
            return Err(Error::domain(format!("rank {k} update of a {m}x{n} operator")));
        }
        let draw = |rows: usize, cols: usize, rng: &mut SeededRng| loop {
            let d = DenseMatrix::new(f, rows, cols, rng.nonzero_vector(&f, rows * cols)).expect("shape");
            if naive_rank(&d) == k {
                return d;
            }
        };
        if f.modulus() == 2 && k > 1 {
            return Err(Error::domain("S = {1} admits no rank > 1 factors over GF(2)"));
        }
        let u = draw(m, k, rng);
        let v = draw(k, n, rng);
        Ok(RankUpdate { a, u, v })
    }

    pub fn factors(&self) -> (&DenseMatrix, &DenseMatrix) {
        (&self.u, &self.v)
    }
}

impl<B: Blackbox> Blackbox for RankUpdate<B> {
    fn field(&self) -> &PrimeField {
        self.a.field()
    }
    fn rows(&self) -> usize {
        self.a.rows()
    }
    fn cols(&self) -> usize {
        self.a.cols()
    }
    fn apply(&self, x: &[i64]) -> Vec<i64> {
        let f = *self.a.field();
        let mut y = self.a.apply(x);
        let t = self.v.matvec_unchecked(x);
        for (yi, ui) in y.iter_mut().zip(self.u.matvec_unchecked(&t)) {
            *yi = f.add(*yi, ui);
        }
        y
    }
    fn apply_transpose(&self, x: &[i64]) -> Vec<i64> {
        let f = *self.a.field();
        let mut y = self.a.apply_transpose(x);
        let t = self.u.matvec_transpose_unchecked(x);
        for (yi, vi) in y.iter_mut().zip(self.v.matvec_transpose_unchecked(&t)) {
            *yi = f.add(*yi, vi);
        }
        y
    }
}
