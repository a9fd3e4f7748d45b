use crate::dense_mm::MatMul;
use crate::elimination::triangular::{trsm, Diag, TriangularSpec, Uplo};
use crate::error::Result;
use crate::matrix::{DenseMatrix, Permutation};

/// `A = P L E`: `L` is `m x r` lower triangular holding the pivot values on
/// its diagonal, `E` is `r x n` in row-echelon form with unit leading
/// coefficients at `pivot_cols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PleFactors {
    pub p: Permutation,
    pub l: DenseMatrix,
    pub e: DenseMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl PleFactors {
    /// Row transpositions of `P` (`P^T A` swaps rows `i` and `pivots[i]`).
    pub fn transpositions(&self) -> &[usize] {
        self.p.transpositions().expect("PLE permutations keep their pivots")
    }

    /// `P L E`, for checking.
    pub fn reconstruct(&self) -> Result<DenseMatrix> {
        self.p.apply_rows(&self.l.mul(&self.e)?)
    }
}

struct Part {
    pivots: Vec<usize>,
    l: DenseMatrix,
    e: DenseMatrix,
    cols: Vec<usize>,
}

fn swap_rows(a: &mut DenseMatrix, pivots: &[usize], offset: usize) {
    for (i, &p) in pivots.iter().enumerate() {
        a.swap_rows(offset + i, offset + p);
    }
}

/// Block-recursive PLE decomposition, splitting columns in halves.
pub fn ple(a: &DenseMatrix, mm: &MatMul) -> Result<PleFactors> {
    let part = ple_rec(a, mm)?;
    let (m, r) = (a.rows(), part.cols.len());
    Ok(PleFactors {
        p: Permutation::from_transpositions(m, &part.pivots)?,
        l: part.l,
        e: part.e,
        rank: r,
        pivot_cols: part.cols,
    })
}

fn ple_rec(a: &DenseMatrix, mm: &MatMul) -> Result<Part> {
    let (m, n) = a.shape();
    let f = *a.field();
    if m == 0 || n == 0 {
        return Ok(Part {
            pivots: Vec::new(),
            l: DenseMatrix::zeros(f, m, 0),
            e: DenseMatrix::zeros(f, 0, n),
            cols: Vec::new(),
        });
    }
    if n == 1 {
        let Some(j) = (0..m).find(|&i| a.get(i, 0) != 0) else {
            return Ok(Part {
                pivots: Vec::new(),
                l: DenseMatrix::zeros(f, m, 0),
                e: DenseMatrix::zeros(f, 0, 1),
                cols: Vec::new(),
            });
        };
        let mut l = a.clone();
        l.swap_rows(0, j);
        return Ok(Part {
            pivots: vec![j],
            l,
            e: DenseMatrix::identity(f, 1),
            cols: vec![0],
        });
    }
    let n1 = n / 2;
    let first = ple_rec(&a.submatrix(0, 0, m, n1), mm)?;
    let r1 = first.cols.len();
    let mut a2 = a.submatrix(0, n1, m, n - n1);
    swap_rows(&mut a2, &first.pivots, 0);
    let l11 = first.l.submatrix(0, 0, r1, r1);
    let mut l12 = first.l.submatrix(r1, 0, m - r1, r1);
    let a3 = trsm(
        &l11,
        &a2.submatrix(0, 0, r1, n - n1),
        TriangularSpec::left(Uplo::Lower, Diag::NonUnit),
        mm,
    )?;
    let a4 = mm.mul_sub(&a2.submatrix(r1, 0, m - r1, n - n1), &l12, &a3)?;
    let second = ple_rec(&a4, mm)?;
    let r2 = second.cols.len();
    swap_rows(&mut l12, &second.pivots, 0);

    let mut l = DenseMatrix::zeros(f, m, r1 + r2);
    l.set_block(0, 0, &l11);
    l.set_block(r1, 0, &l12);
    l.set_block(r1, r1, &second.l);
    let mut e = DenseMatrix::zeros(f, r1 + r2, n);
    e.set_block(0, 0, &first.e);
    e.set_block(0, n1, &a3);
    e.set_block(r1, n1, &second.e);

    let mut pivots = first.pivots;
    pivots.extend(second.pivots.iter().map(|&p| p + r1));
    let mut cols = first.cols;
    cols.extend(second.cols.iter().map(|&c| c + n1));
    Ok(Part { pivots, l, e, cols })
}
