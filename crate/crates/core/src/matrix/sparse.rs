use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::DenseMatrix;

/// One sparse row: `(column, value)` pairs, columns strictly increasing,
/// no stored zeros.
pub type SparseRow = Vec<(usize, i64)>;

/// Row-wise coordinate storage.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        SparseMatrix {
            field,
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for (i, r) in m.data.iter_mut().enumerate() {
            r.push((i, 1));
        }
        m
    }

    /// Build from `(row, col, value)` triplets (0-based). Values are
    /// reduced into the field, duplicates summed, zeros dropped.
    pub fn from_triplets(
        field: PrimeField,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut acc: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); rows];
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::dims(format!("entry ({i}, {j}) outside {rows}x{cols}")));
            }
            let e = acc[i].entry(j).or_insert(0);
            *e = field.add(*e, field.from_i64(v));
        }
        let data = acc
            .into_iter()
            .map(|r| r.into_iter().filter(|&(_, v)| v != 0).collect())
            .collect();
        Ok(SparseMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Trusted constructor from already valid rows.
    pub(crate) fn from_rows_unchecked(field: PrimeField, rows: usize, cols: usize, data: Vec<SparseRow>) -> Self {
        debug_assert_eq!(data.len(), rows);
        debug_assert!(data.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0)
            && r.iter().all(|&(j, v)| j < cols && v != 0 && field.is_canonical(v))));
        SparseMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let data = (0..a.rows())
            .map(|i| {
                a.row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0)
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect();
        SparseMatrix {
            field: *a.field(),
            rows: a.rows(),
            cols: a.cols(),
            data,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.field, self.rows, self.cols);
        for (i, r) in self.data.iter().enumerate() {
            for &(j, v) in r {
                d.set_canonical(i, j, v);
            }
        }
        d
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.data[i]
    }

    pub fn row_data(&self) -> &[SparseRow] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        match self.data[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => self.data[i][k].1,
            Err(_) => 0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn density(&self) -> f64 {
        let total = self.rows * self.cols;
        if total == 0 {
            0.0
        } else {
            self.nnz() as f64 / total as f64
        }
    }

    /// Triplets in row-major order (0-based).
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<SparseRow> = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for &(j, v) in r {
                data[j].push((i, v));
            }
        }
        SparseMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            data,
        }
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
        let f = self.field;
        let p = f.modulus() as u128;
        self.data
            .iter()
            .map(|r| {
                // 128-bit accumulation of classic products, reduced every 8 terms.
                let mut acc: u128 = 0;
                for chunk in r.chunks(8) {
                    for &(j, a) in chunk {
                        acc += f.to_classic(a) as u128 * f.to_classic(v[j]) as u128;
                    }
                    acc %= p;
                }
                f.from_classic(acc as u64)
            })
            .collect()
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
        for (r, &vi) in self.data.iter().zip(v) {
            if vi == 0 {
                continue;
            }
            for &(j, a) in r {
                out[j] = f.mul_add(out[j], a, vi);
            }
        }
        out
    }

    /// Same values in another representation of the same modulus.
    pub fn with_field(&self, field: PrimeField) -> Result<Self> {
        if field.modulus() != self.field.modulus() {
            return Err(Error::domain("field change must keep the modulus"));
        }
        let data = self
            .data
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&(j, v)| (j, field.convert_from(&self.field, v)))
                    .collect()
            })
            .collect();
        Ok(SparseMatrix {
            field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn triplets_sum_and_drop_zeros() {
        let f = PrimeField::classic(5).unwrap();
        let m = SparseMatrix::from_triplets(f, 2, 2, [(0, 0, 2), (0, 0, 3), (1, 1, 7)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), 2);
        assert!(SparseMatrix::from_triplets(f, 2, 2, [(2, 0, 1)]).is_err());
    }

    #[test]
    fn sparse_and_dense_matvec_agree() {
        let f = PrimeField::classic(65521).unwrap();
        let mut rng = SeededRng::new(3);
        let trip: Vec<_> = (0..200)
            .map(|_| (rng.index(30), rng.index(40), rng.element(&f)))
            .collect();
        let s = SparseMatrix::from_triplets(f, 30, 40, trip).unwrap();
        let d = s.to_dense();
        assert_eq!(SparseMatrix::from_dense(&d), s);
        for _ in 0..100 {
            let v = rng.vector(&f, 40);
            assert_eq!(s.matvec(&v).unwrap(), d.matvec(&v).unwrap());
            let u = rng.vector(&f, 30);
            assert_eq!(s.matvec_transpose(&u).unwrap(), d.matvec_transpose(&u).unwrap());
        }
        assert_eq!(s.transpose().transpose(), s);
    }
}
