use serde::{Deserialize, Serialize};

use crate::dense_mm::MatMul;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Uplo {
    Upper,
    Lower,
}

impl Uplo {
    fn flip(self) -> Self {
        match self {
            Uplo::Upper => Uplo::Lower,
            Uplo::Lower => Uplo::Upper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diag {
    Unit,
    NonUnit,
}

/// Which triangle of the operand is referenced and on which side it acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularSpec {
    pub side: Side,
    pub uplo: Uplo,
    pub diag: Diag,
}

impl TriangularSpec {
    pub fn new(side: Side, uplo: Uplo, diag: Diag) -> Self {
        TriangularSpec { side, uplo, diag }
    }

    pub fn left(uplo: Uplo, diag: Diag) -> Self {
        Self::new(Side::Left, uplo, diag)
    }

    pub fn right(uplo: Uplo, diag: Diag) -> Self {
        Self::new(Side::Right, uplo, diag)
    }
}

/// The referenced triangle of `a` as a dense matrix (zeros elsewhere,
/// ones on the diagonal for unit triangles).
pub fn densify_triangle(a: &DenseMatrix, uplo: Uplo, diag: Diag) -> DenseMatrix {
    let f = *a.field();
    DenseMatrix::from_fn(f, a.rows(), a.cols(), |i, j| {
        if i == j {
            if diag == Diag::Unit {
                f.one()
            } else {
                a.get(i, j)
            }
        } else if (uplo == Uplo::Upper) == (i < j) {
            a.get(i, j)
        } else {
            0
        }
    })
}

fn check_square(a: &DenseMatrix, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims(format!("{what}: triangle is {}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

struct Blocks {
    a11: DenseMatrix,
    a12: DenseMatrix,
    a21: DenseMatrix,
    a22: DenseMatrix,
}

fn split(a: &DenseMatrix, h: usize) -> Blocks {
    let (m, n) = a.shape();
    Blocks {
        a11: a.submatrix(0, 0, h, h),
        a12: a.submatrix(0, h, h, n - h),
        a21: a.submatrix(h, 0, m - h, h),
        a22: a.submatrix(h, h, m - h, n - h),
    }
}

fn join(a11: &DenseMatrix, a12: &DenseMatrix, a21: &DenseMatrix, a22: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(*a11.field(), a11.rows() + a21.rows(), a11.cols() + a12.cols());
    out.set_block(0, 0, a11);
    out.set_block(0, a11.cols(), a12);
    out.set_block(a11.rows(), 0, a21);
    out.set_block(a11.rows(), a11.cols(), a22);
    out
}

/// Solve `T X = B` (left) or `X T = B` (right) for the triangle `T` of `a`.
pub fn trsm(a: &DenseMatrix, b: &DenseMatrix, spec: TriangularSpec, mm: &MatMul) -> Result<DenseMatrix> {
    check_square(a, "trsm")?;
    match spec.side {
        Side::Left => {
            if a.rows() != b.rows() {
                return Err(Error::dims("trsm: triangle and right-hand side differ in rows"));
            }
            trsm_left(a, b, spec.uplo, spec.diag, mm)
        }
        Side::Right => {
            if a.rows() != b.cols() {
                return Err(Error::dims("trsm: triangle and right-hand side differ in columns"));
            }
            Ok(trsm_left(&a.transpose(), &b.transpose(), spec.uplo.flip(), spec.diag, mm)?.transpose())
        }
    }
}

fn trsm_left(a: &DenseMatrix, b: &DenseMatrix, uplo: Uplo, diag: Diag, mm: &MatMul) -> Result<DenseMatrix> {
    let (m, n) = b.shape();
    if m == 0 {
        return Ok(b.clone());
    }
    if m == 1 {
        if diag == Diag::Unit {
            return Ok(b.clone());
        }
        let f = *a.field();
        let inv = f
            .inv(a.get(0, 0))
            .map_err(|_| Error::Singular("zero on the diagonal of a triangular solve".into()))?;
        mm.ops(n as u64, 0);
        return Ok(b.scale(inv));
    }
    let h = m / 2;
    let t = split(a, h);
    let (b1, b2) = (b.submatrix(0, 0, h, n), b.submatrix(h, 0, m - h, n));
    let (x1, x2) = match uplo {
        Uplo::Upper => {
            let x2 = trsm_left(&t.a22, &b2, uplo, diag, mm)?;
            let b1 = mm.mul_sub(&b1, &t.a12, &x2)?;
            (trsm_left(&t.a11, &b1, uplo, diag, mm)?, x2)
        }
        Uplo::Lower => {
            let x1 = trsm_left(&t.a11, &b1, uplo, diag, mm)?;
            let b2 = mm.mul_sub(&b2, &t.a21, &x1)?;
            let x2 = trsm_left(&t.a22, &b2, uplo, diag, mm)?;
            (x1, x2)
        }
    };
    x1.vstack(&x2)
}

/// `T B` (left) or `B T` (right) for the triangle `T` of `a`.
pub fn trmm(a: &DenseMatrix, b: &DenseMatrix, spec: TriangularSpec, mm: &MatMul) -> Result<DenseMatrix> {
    check_square(a, "trmm")?;
    match spec.side {
        Side::Left => {
            if a.cols() != b.rows() {
                return Err(Error::dims("trmm: triangle and operand differ in rows"));
            }
            trmm_left(a, b, spec.uplo, spec.diag, mm)
        }
        Side::Right => {
            if a.rows() != b.cols() {
                return Err(Error::dims("trmm: triangle and operand differ in columns"));
            }
            Ok(trmm_left(&a.transpose(), &b.transpose(), spec.uplo.flip(), spec.diag, mm)?.transpose())
        }
    }
}

fn trmm_left(a: &DenseMatrix, b: &DenseMatrix, uplo: Uplo, diag: Diag, mm: &MatMul) -> Result<DenseMatrix> {
    let (m, n) = b.shape();
    if m == 0 {
        return Ok(b.clone());
    }
    if m == 1 {
        if diag == Diag::Unit {
            return Ok(b.clone());
        }
        mm.ops(n as u64, 0);
        return Ok(b.scale(a.get(0, 0)));
    }
    let h = m / 2;
    let t = split(a, h);
    let (b1, b2) = (b.submatrix(0, 0, h, n), b.submatrix(h, 0, m - h, n));
    let (c1, c2) = match uplo {
        Uplo::Upper => {
            let c1 = trmm_left(&t.a11, &b1, uplo, diag, mm)?;
            let c1 = mm.mul_add(&c1, &t.a12, &b2)?;
            (c1, trmm_left(&t.a22, &b2, uplo, diag, mm)?)
        }
        Uplo::Lower => {
            let c2 = trmm_left(&t.a22, &b2, uplo, diag, mm)?;
            let c2 = mm.mul_add(&c2, &t.a21, &b1)?;
            (trmm_left(&t.a11, &b1, uplo, diag, mm)?, c2)
        }
    };
    c1.vstack(&c2)
}

/// Inverse of the triangle of `a`; the result has the same shape, with an
/// explicit unit diagonal for unit triangles.
pub fn trtri(a: &DenseMatrix, uplo: Uplo, diag: Diag, mm: &MatMul) -> Result<DenseMatrix> {
    check_square(a, "trtri")?;
    let n = a.rows();
    let f = *a.field();
    if n == 0 {
        return Ok(a.clone());
    }
    if n == 1 {
        let v = match diag {
            Diag::Unit => f.one(),
            Diag::NonUnit => {
                mm.ops(1, 0);
                f.inv(a.get(0, 0))
                    .map_err(|_| Error::Singular("zero on the diagonal of a triangular inverse".into()))?
            }
        };
        return Ok(DenseMatrix::from_fn(f, 1, 1, |_, _| v));
    }
    let h = n / 2;
    let t = split(a, h);
    let c1 = trtri(&t.a11, uplo, diag, mm)?;
    let c3 = trtri(&t.a22, uplo, diag, mm)?;
    let full = |side| TriangularSpec::new(side, uplo, diag);
    Ok(match uplo {
        Uplo::Upper => {
            let c2 = trmm(&c3, &t.a12, full(Side::Right), mm)?;
            let c2 = trmm(&c1, &c2, full(Side::Left), mm)?.neg();
            join(&c1, &c2, &DenseMatrix::zeros(f, n - h, h), &c3)
        }
        Uplo::Lower => {
            let c2 = trmm(&c1, &t.a21, full(Side::Right), mm)?;
            let c2 = trmm(&c3, &c2, full(Side::Left), mm)?.neg();
            join(&c1, &DenseMatrix::zeros(f, h, n - h), &c2, &c3)
        }
    })
}

/// `U L` for an upper triangle `U` and a lower triangle `L`.
pub fn trtrm(u: &DenseMatrix, u_diag: Diag, l: &DenseMatrix, l_diag: Diag, mm: &MatMul) -> Result<DenseMatrix> {
    check_square(u, "trtrm")?;
    check_square(l, "trtrm")?;
    if u.rows() != l.rows() {
        return Err(Error::dims("trtrm: triangles differ in size"));
    }
    let n = u.rows();
    let f = *u.field();
    if n == 0 {
        return Ok(u.clone());
    }
    if n == 1 {
        let x = if u_diag == Diag::Unit { f.one() } else { u.get(0, 0) };
        let y = if l_diag == Diag::Unit { f.one() } else { l.get(0, 0) };
        mm.ops(1, 0);
        return Ok(DenseMatrix::from_fn(f, 1, 1, |_, _| f.mul(x, y)));
    }
    let h = n / 2;
    let (tu, tl) = (split(u, h), split(l, h));
    let a1 = trtrm(&tu.a11, u_diag, &tl.a11, l_diag, mm)?;
    let a1 = mm.mul_add(&a1, &tu.a12, &tl.a21)?;
    let a2 = trmm(&tl.a22, &tu.a12, TriangularSpec::right(Uplo::Lower, l_diag), mm)?;
    let a3 = trmm(&tu.a22, &tl.a21, TriangularSpec::left(Uplo::Upper, u_diag), mm)?;
    let a4 = trtrm(&tu.a22, u_diag, &tl.a22, l_diag, mm)?;
    Ok(join(&a1, &a2, &a3, &a4))
}
