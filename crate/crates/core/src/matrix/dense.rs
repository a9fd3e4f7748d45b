use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Polynomial, PrimeField};
use crate::matrix::SparseMatrix;

/// Row-major dense matrix over a prime field.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl DenseMatrix {
    /// Build from arbitrary integers, reduced into the field.
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let data = data.into_iter().map(|x| field.from_i64(x)).collect();
        Ok(DenseMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Trusted constructor: entries already canonical.
    pub(crate) fn from_canonical(field: PrimeField, rows: usize, cols: usize, data: Vec<i64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&x| field.is_canonical(x)));
        DenseMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dims("ragged rows"));
        }
        Self::new(field, m, n, rows.concat())
    }

    pub fn from_fn(field: PrimeField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(field.from_i64(f(i, j)));
            }
        }
        DenseMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn diagonal(field: PrimeField, diag: &[i64]) -> Self {
        let n = diag.len();
        Self::from_fn(field, n, n, |i, j| if i == j { diag[i] } else { 0 })
    }

    /// Companion matrix of a monic polynomial of degree `d >= 1`:
    /// ones on the subdiagonal, `-c_i` in the last column.
    pub fn companion(f: &Polynomial) -> Result<Self> {
        let field = *f.field();
        let d = f
            .degree()
            .filter(|&d| d >= 1 && f.is_monic())
            .ok_or_else(|| Error::domain("companion matrix needs a monic polynomial of degree >= 1"))?;
        let mut m = Self::zeros(field, d, d);
        for i in 1..d {
            m.set(i, i - 1, 1);
        }
        for i in 0..d {
            m.set(i, d - 1, field.neg(f.coeff(i)));
        }
        Ok(m)
    }

    /// Block-diagonal assembly of square blocks.
    pub fn block_diagonal(field: PrimeField, blocks: &[DenseMatrix]) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(field, n, n);
        let mut off = 0;
        for b in blocks {
            if !b.is_square() {
                return Err(Error::dims("block-diagonal blocks must be square"));
            }
            m.set_block(off, off, b);
            off += b.rows;
        }
        Ok(m)
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[i64] {
        &self.data
    }

    #[inline]
    pub(crate) fn data_mut(&mut self) -> &mut [i64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<i64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    /// Store `v` reduced into the field.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = self.field.from_i64(v);
    }

    #[inline]
    pub(crate) fn set_canonical(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * c);
        head[lo * c..(lo + 1) * c].swap_with_slice(&mut tail[..c]);
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.push(self.get(i, j));
            }
        }
        Self::from_canonical(self.field, self.cols, self.rows, t)
    }

    /// Copy of the `m x n` block starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, m: usize, n: usize) -> Self {
        assert!(r0 + m <= self.rows && c0 + n <= self.cols, "submatrix out of range");
        let mut data = Vec::with_capacity(m * n);
        for i in r0..r0 + m {
            data.extend_from_slice(&self.row(i)[c0..c0 + n]);
        }
        Self::from_canonical(self.field, m, n, data)
    }

    /// Overwrite the block at `(r0, c0)` with `b`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &DenseMatrix) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(i));
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self::from_canonical(self.field, idx.len(), self.cols, data)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            let r = self.row(i);
            data.extend(idx.iter().map(|&j| r[j]));
        }
        Self::from_canonical(self.field, self.rows, idx.len(), data)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::dims("hstack row counts differ"));
        }
        let mut m = Self::zeros(self.field, self.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        Ok(m)
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::dims("vstack column counts differ"));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self::from_canonical(
            self.field,
            self.rows + other.rows,
            self.cols,
            data,
        ))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> i64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dims(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_canonical(self.field, self.rows, self.cols, data))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let f = self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let f = self.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        Self::from_canonical(f, self.rows, self.cols, self.data.iter().map(|&a| f.neg(a)).collect())
    }

    pub fn scale(&self, c: i64) -> Self {
        let f = self.field;
        let c = f.from_i64(c);
        Self::from_canonical(
            f,
            self.rows,
            self.cols,
            self.data.iter().map(|&a| f.mul(a, c)).collect(),
        )
    }

    /// Classical product, one field multiply-add per term.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        crate::dense_mm::gemm_classic(self, other, None)
    }

    pub fn matvec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::dims(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self.matvec_unchecked(v))
    }

    pub(crate) fn matvec_unchecked(&self, v: &[i64]) -> Vec<i64> {
        (0..self.rows).map(|i| self.field.dot(self.row(i), v)).collect()
    }

    pub fn matvec_transpose(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.rows {
            return Err(Error::dims(format!(
                "vector of length {} for {} rows",
                v.len(),
                self.rows
            )));
        }
        Ok(self.matvec_transpose_unchecked(v))
    }

    pub(crate) fn matvec_transpose_unchecked(&self, v: &[i64]) -> Vec<i64> {
        let f = self.field;
        let mut out = vec![0i64; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = f.mul_add(*o, a, vi);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&x| x != 0).count()
    }

    pub fn density(&self) -> f64 {
        if self.data.is_empty() {
            0.0
        } else {
            self.nnz() as f64 / self.data.len() as f64
        }
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j) == 0))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == 0))
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix::from_dense(self)
    }

    /// Same values in another representation of the same modulus.
    pub fn with_field(&self, field: PrimeField) -> Result<Self> {
        if field.modulus() != self.field.modulus() {
            return Err(Error::domain("field change must keep the modulus"));
        }
        let data = self.data.iter().map(|&a| field.convert_from(&self.field, a)).collect();
        Ok(Self::from_canonical(field, self.rows, self.cols, data))
    }

    /// Entries as classic representatives.
    pub fn classic_data(&self) -> Vec<u64> {
        self.data.iter().map(|&a| self.field.to_classic(a)).collect()
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_poly(&self, p: &Polynomial) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::dims("polynomial evaluation needs a square matrix"));
        }
        let n = self.rows;
        let mut acc = Self::zeros(self.field, n, n);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(self)?;
            for i in 0..n {
                let v = self.field.add(acc.get(i, i), self.field.convert_from(p.field(), c));
                acc.set_canonical(i, i, v);
            }
        }
        Ok(acc)
    }

    /// `p(A) v` by Horner's rule with matrix-vector products only.
    pub fn eval_poly_vec(&self, p: &Polynomial, v: &[i64]) -> Result<Vec<i64>> {
        if !self.is_square() || v.len() != self.cols {
            return Err(Error::dims("polynomial-vector evaluation dimensions"));
        }
        let f = self.field;
        let mut acc = vec![0i64; v.len()];
        for &c in p.coeffs().iter().rev() {
            acc = self.matvec_unchecked(&acc);
            let c = f.convert_from(p.field(), c);
            for (a, &vi) in acc.iter_mut().zip(v) {
                *a = f.mul_add(*a, c, vi);
            }
        }
        Ok(acc)
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix[{}] {}x{}", self.field, self.rows, self.cols)?;
        for i in 0..self.rows.min(16) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(16)])?;
        }
        Ok(())
    }
}
