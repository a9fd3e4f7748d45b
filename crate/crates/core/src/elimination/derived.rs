use crate::dense_mm::MatMul;
use crate::elimination::ple::{ple, PleFactors};
use crate::elimination::triangular::{trsm, trtri, trtrm, Diag, TriangularSpec, Uplo};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::tiny::{gf2_rank, PackedGF2Matrix};

/// Outcome of a linear solve: a solution, or a certificate-free report
/// that the system has none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome<T> {
    Solution(T),
    Inconsistent,
}

impl<T> SolveOutcome<T> {
    pub fn solution(self) -> Option<T> {
        match self {
            SolveOutcome::Solution(x) => Some(x),
            SolveOutcome::Inconsistent => None,
        }
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, SolveOutcome::Solution(_))
    }
}

/// Rank; GF(2) inputs take the word-packed path.
pub fn rank(a: &DenseMatrix, mm: &MatMul) -> Result<usize> {
    if a.field().modulus() == 2 {
        return Ok(gf2_rank(&PackedGF2Matrix::from_dense(a)?));
    }
    Ok(ple(a, mm)?.rank)
}

fn require_square(a: &DenseMatrix, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims(format!(
            "{what} needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// `sign(P) * prod diag(L)`, or zero when rank deficient.
pub fn det_from_ple(f: &PleFactors, n: usize) -> i64 {
    let field = *f.l.field();
    if f.rank < n {
        return field.zero();
    }
    let prod = (0..n).fold(field.one(), |acc, i| field.mul(acc, f.l.get(i, i)));
    if f.p.sign() < 0 {
        field.neg(prod)
    } else {
        prod
    }
}

pub fn determinant(a: &DenseMatrix, mm: &MatMul) -> Result<i64> {
    require_square(a, "determinant")?;
    let f = ple(a, mm)?;
    mm.ops(a.rows() as u64, 0);
    Ok(det_from_ple(&f, a.rows()))
}

/// `A^-1 = E^-1 L^-1 P^T`, with `E` unit upper triangular at full rank.
pub fn inverse(a: &DenseMatrix, mm: &MatMul) -> Result<DenseMatrix> {
    require_square(a, "inverse")?;
    let f = ple(a, mm)?;
    let n = a.rows();
    if f.rank < n {
        return Err(Error::Singular(format!("rank {} < {n}", f.rank)));
    }
    let ui = trtri(&f.e, Uplo::Upper, Diag::Unit, mm)?;
    let li = trtri(&f.l, Uplo::Lower, Diag::NonUnit, mm)?;
    let prod = trtrm(&ui, Diag::Unit, &li, Diag::NonUnit, mm)?;
    f.p.inverse().apply_cols(&prod)
}

/// Some `X` with `A X = B`, free variables set to zero.
pub fn solve_matrix(a: &DenseMatrix, b: &DenseMatrix, mm: &MatMul) -> Result<SolveOutcome<DenseMatrix>> {
    if a.rows() != b.rows() {
        return Err(Error::dims(format!(
            "{} equations, {} right-hand side rows",
            a.rows(),
            b.rows()
        )));
    }
    let f = ple(a, mm)?;
    solve_with(&f, a.cols(), b, mm)
}

pub(crate) fn solve_with(f: &PleFactors, n: usize, b: &DenseMatrix, mm: &MatMul) -> Result<SolveOutcome<DenseMatrix>> {
    let (m, r, s) = (b.rows(), f.rank, b.cols());
    let pb = f.p.apply_rows_transpose(b)?;
    let y = trsm(
        &f.l.submatrix(0, 0, r, r),
        &pb.submatrix(0, 0, r, s),
        TriangularSpec::left(Uplo::Lower, Diag::NonUnit),
        mm,
    )?;
    let rest = mm.mul_sub(&pb.submatrix(r, 0, m - r, s), &f.l.submatrix(r, 0, m - r, r), &y)?;
    if !rest.is_zero() {
        return Ok(SolveOutcome::Inconsistent);
    }
    let u1 = f.e.select_cols(&f.pivot_cols);
    let xp = trsm(&u1, &y, TriangularSpec::left(Uplo::Upper, Diag::Unit), mm)?;
    let mut x = DenseMatrix::zeros(*b.field(), n, s);
    for (k, &c) in f.pivot_cols.iter().enumerate() {
        x.set_block(c, 0, &xp.submatrix(k, 0, 1, s));
    }
    Ok(SolveOutcome::Solution(x))
}

pub fn solve(a: &DenseMatrix, b: &[i64], mm: &MatMul) -> Result<SolveOutcome<Vec<i64>>> {
    let field = *a.field();
    let bm = DenseMatrix::new(field, b.len(), 1, b.to_vec())?;
    Ok(match solve_matrix(a, &bm, mm)? {
        SolveOutcome::Solution(x) => SolveOutcome::Solution(x.into_data()),
        SolveOutcome::Inconsistent => SolveOutcome::Inconsistent,
    })
}

/// Columns spanning `{x : A x = 0}`, one per non-pivot column.
pub fn nullspace_basis(a: &DenseMatrix, mm: &MatMul) -> Result<DenseMatrix> {
    let f = ple(a, mm)?;
    let n = a.cols();
    let free: Vec<usize> = (0..n).filter(|c| f.pivot_cols.binary_search(c).is_err()).collect();
    let u1 = f.e.select_cols(&f.pivot_cols);
    let u2 = f.e.select_cols(&free);
    let w = trsm(&u1, &u2, TriangularSpec::left(Uplo::Upper, Diag::Unit), mm)?.neg();
    let field = *a.field();
    let mut basis = DenseMatrix::zeros(field, n, free.len());
    for (t, &c) in free.iter().enumerate() {
        basis.set_canonical(c, t, field.one());
        for (k, &pc) in f.pivot_cols.iter().enumerate() {
            basis.set_canonical(pc, t, w.get(k, t));
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_mm::gemm_classic;
    use crate::field::PrimeField;
    use crate::matrix::{naive_rank, random_dense, random_matrix_with_rank};
    use crate::rng::SeededRng;

    /// Cofactor expansion along the first row.
    pub(crate) fn laplace_det(a: &DenseMatrix) -> i64 {
        let f = *a.field();
        let n = a.rows();
        if n == 0 {
            return f.one();
        }
        let mut det = f.zero();
        for j in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = a.select_rows(&rows).select_cols(&cols);
            let term = f.mul(a.get(0, j), laplace_det(&minor));
            det = if j % 2 == 0 { f.add(det, term) } else { f.sub(det, term) };
        }
        det
    }

    #[test]
    fn determinant_against_laplace() {
        let mut rng = SeededRng::new(41);
        let mm = MatMul::default();
        for p in [2u64, 3, 65521, 2_147_483_647] {
            let f = PrimeField::centered(p).or_else(|_| PrimeField::classic(p)).unwrap();
            assert_eq!(determinant(&DenseMatrix::identity(f, 4), &mm).unwrap(), f.one());
            for n in 0..=6 {
                for _ in 0..10 {
                    let a = random_dense(f, n, n, &mut rng);
                    assert_eq!(determinant(&a, &mm).unwrap(), laplace_det(&a));
                }
            }
        }
    }

    #[test]
    fn inverse_solve_nullspace() {
        let mut rng = SeededRng::new(43);
        let mm = MatMul::default();
        for p in [2u64, 7, 65521] {
            let f = PrimeField::classic(p).unwrap();
            for _ in 0..30 {
                let n = 1 + rng.index(12);
                let a = random_matrix_with_rank(f, n, n, n, rng.next_u64()).unwrap();
                let ai = inverse(&a, &mm).unwrap();
                assert_eq!(gemm_classic(&a, &ai, None).unwrap(), DenseMatrix::identity(f, n));
                let (m, k) = (1 + rng.index(12), 1 + rng.index(12));
                let r = rng.index(m.min(k) + 1);
                let b = random_matrix_with_rank(f, m, k, r, rng.next_u64()).unwrap();
                assert_eq!(rank(&b, &mm).unwrap(), r);
                let y = rng.vector(&f, k);
                let rhs = b.matvec(&y).unwrap();
                let x = solve(&b, &rhs, &mm).unwrap().solution().unwrap();
                assert_eq!(b.matvec(&x).unwrap(), rhs);
                let nb = nullspace_basis(&b, &mm).unwrap();
                assert_eq!(nb.shape(), (k, k - r));
                assert!(gemm_classic(&b, &nb, None).unwrap().is_zero());
                assert_eq!(naive_rank(&nb), k - r);
                if r < m {
                    // Some vector outside the column space exists; a random one usually is.
                    let z = rng.vector(&f, m);
                    let out = solve(&b, &z, &mm).unwrap();
                    if let SolveOutcome::Solution(x) = out {
                        assert_eq!(b.matvec(&x).unwrap(), z);
                    }
                }
            }
            let s = random_matrix_with_rank(f, 5, 5, 3, 1).unwrap();
            assert!(matches!(inverse(&s, &mm), Err(Error::Singular(_))));
            assert_eq!(nullspace_basis(&DenseMatrix::identity(f, 3), &mm).unwrap().cols(), 0);
        }
    }

    #[test]
    fn inconsistent_is_reported() {
        let f = PrimeField::classic(5).unwrap();
        let a = DenseMatrix::from_rows(f, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(
            solve(&a, &[1, 1], &MatMul::default()).unwrap(),
            SolveOutcome::Inconsistent
        );
        assert_eq!(
            solve(&a, &[1, 2], &MatMul::default()).unwrap(),
            SolveOutcome::Solution(vec![1, 0])
        );
    }
}
