use crate::dense_mm::MatMul;
use crate::elimination::ple::{ple, PleFactors};
use crate::elimination::triangular::{trmm, trsm, trtri, trtrm, Diag, TriangularSpec, Uplo};
use crate::error::Result;
use crate::matrix::DenseMatrix;

/// `X A = E` with `X` nonsingular `m x m` and `E` (`m x n`) in row-echelon
/// form, zero rows last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowEchelon {
    pub x: DenseMatrix,
    pub e: DenseMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// `Y A = R` with `Y` nonsingular and `R` in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedRowEchelon {
    pub y: DenseMatrix,
    pub r: DenseMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

struct Parts {
    f: PleFactors,
    x1: DenseMatrix,
    x2: DenseMatrix,
}

fn parts(a: &DenseMatrix, mm: &MatMul) -> Result<Parts> {
    let f = ple(a, mm)?;
    let (m, r) = (a.rows(), f.rank);
    let l1 = f.l.submatrix(0, 0, r, r);
    let l2 = f.l.submatrix(r, 0, m - r, r);
    let x1 = trtri(&l1, Uplo::Lower, Diag::NonUnit, mm)?;
    let x2 = trmm(&x1, &l2, TriangularSpec::right(Uplo::Lower, Diag::NonUnit), mm)?.neg();
    Ok(Parts { f, x1, x2 })
}

/// `[[top, 0], [x2, I]] P^T`
fn assemble(top: &DenseMatrix, x2: &DenseMatrix, f: &PleFactors, m: usize) -> Result<DenseMatrix> {
    let r = f.rank;
    let mut x = DenseMatrix::identity(*top.field(), m);
    x.set_block(0, 0, &DenseMatrix::zeros(*top.field(), r, m));
    x.set_block(0, 0, top);
    x.set_block(r, 0, x2);
    f.p.inverse().apply_cols(&x)
}

fn pad_rows(e: &DenseMatrix, m: usize) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(*e.field(), m, e.cols());
    out.set_block(0, 0, e);
    out
}

pub fn row_echelon(a: &DenseMatrix, mm: &MatMul) -> Result<RowEchelon> {
    let m = a.rows();
    let p = parts(a, mm)?;
    Ok(RowEchelon {
        x: assemble(&p.x1, &p.x2, &p.f, m)?,
        e: pad_rows(&p.f.e, m),
        rank: p.f.rank,
        pivot_cols: p.f.pivot_cols,
    })
}

pub fn reduced_row_echelon(a: &DenseMatrix, mm: &MatMul) -> Result<ReducedRowEchelon> {
    let (m, n) = a.shape();
    let p = parts(a, mm)?;
    let r = p.f.rank;
    let cols = &p.f.pivot_cols;
    let free: Vec<usize> = (0..n).filter(|c| cols.binary_search(c).is_err()).collect();
    let u1 = p.f.e.select_cols(cols);
    let u2 = p.f.e.select_cols(&free);
    let y1 = trtri(&u1, Uplo::Upper, Diag::Unit, mm)?;
    let y1 = trtrm(&y1, Diag::Unit, &p.x1, Diag::NonUnit, mm)?;
    let w = trsm(&u1, &u2, TriangularSpec::left(Uplo::Upper, Diag::Unit), mm)?;
    let mut red = DenseMatrix::zeros(*a.field(), m, n);
    for (k, &c) in cols.iter().enumerate() {
        red.set_canonical(k, c, a.field().one());
        for (t, &c) in free.iter().enumerate() {
            red.set_canonical(k, c, w.get(k, t));
        }
    }
    debug_assert_eq!(r, cols.len());
    Ok(ReducedRowEchelon {
        y: assemble(&y1, &p.x2, &p.f, m)?,
        r: red,
        rank: r,
        pivot_cols: p.f.pivot_cols,
    })
}

/// True when `e` is in row-echelon form (zero rows last, leading entries
/// strictly moving right).
pub fn is_row_echelon(e: &DenseMatrix) -> bool {
    let mut last: Option<usize> = None;
    let mut seen_zero = false;
    for i in 0..e.rows() {
        match e.row(i).iter().position(|&x| x != 0) {
            None => seen_zero = true,
            Some(c) => {
                if seen_zero || last.is_some_and(|l| c <= l) {
                    return false;
                }
                last = Some(c);
            }
        }
    }
    true
}

/// Row-echelon with unit leading entries that are the only nonzeros of
/// their columns.
pub fn is_reduced_row_echelon(r: &DenseMatrix) -> bool {
    if !is_row_echelon(r) {
        return false;
    }
    (0..r.rows()).all(|i| match r.row(i).iter().position(|&x| x != 0) {
        None => true,
        Some(c) => r.get(i, c) == r.field().one() && (0..r.rows()).all(|k| k == i || r.get(k, c) == 0),
    })
}
