use rayon::prelude::*;

use crate::dense_mm::OpCounter;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub(crate) fn check_dims(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(Error::dims(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.field() != b.field() {
        return Err(Error::dims("operands live in different fields"));
    }
    Ok(())
}

/// `C_ij = sum_l A_il B_lj` with one field multiply-add per term.
pub fn gemm_classic(a: &DenseMatrix, b: &DenseMatrix, counter: Option<&OpCounter>) -> Result<DenseMatrix> {
    check_dims(a, b)?;
    let f = *a.field();
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let mut c = DenseMatrix::zeros(f, m, n);
    if n > 0 {
        c.data_mut().par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (l, &x) in a.row(i).iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (o, &y) in row.iter_mut().zip(b.row(l)) {
                    *o = f.mul_add(*o, x, y);
                }
            }
        });
    }
    if let Some(ctr) = counter {
        ctr.mul_adds((m * k * n) as u64);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn small_product_and_count() {
        let f = PrimeField::classic(5).unwrap();
        let a = DenseMatrix::from_rows(f, &[vec![1, 2], vec![3, 4]]).unwrap();
        let b = DenseMatrix::from_rows(f, &[vec![1, 0], vec![1, 1]]).unwrap();
        let c = gemm_classic(&a, &b, None).unwrap();
        assert_eq!(c, DenseMatrix::from_rows(f, &[vec![3, 2], vec![2, 4]]).unwrap());
        assert_eq!(gemm_classic(&DenseMatrix::identity(f, 2), &b, None).unwrap(), b);

        let ctr = OpCounter::new();
        let e = DenseMatrix::identity(f, 8);
        gemm_classic(&e, &e, Some(&ctr)).unwrap();
        assert_eq!(ctr.snapshot().muls, 512);
        assert_eq!(ctr.snapshot().field_ops(), 1024);
        assert!(gemm_classic(&a, &DenseMatrix::zeros(f, 3, 3), None).is_err());
    }
}
