//! Dense minimal and characteristic polynomials from Krylov bases.

use crate::error::{Error, Result};
use crate::field::{Polynomial, PrimeField};
use crate::matrix::DenseMatrix;

/// Incrementally row-reduced span of vectors. Each stored vector has a
/// unit pivot and zeros at the pivots of the vectors stored before it.
struct ReducedSpan {
    field: PrimeField,
    rows: Vec<(usize, Vec<i64>, Option<Vec<i64>>)>,
}

impl ReducedSpan {
    fn new(field: PrimeField) -> Self {
        ReducedSpan {
            field,
            rows: Vec::new(),
        }
    }

    /// Reduce `w` against the span; `coef` tracks the combination of the
    /// current seed's Krylov vectors that `w` stands for.
    fn reduce(&self, w: &mut [i64], coef: &mut Vec<i64>) {
        let f = self.field;
        for (piv, b, bc) in &self.rows {
            let t = w[*piv];
            if t == 0 {
                continue;
            }
            for (x, &y) in w.iter_mut().zip(b) {
                *x = f.sub(*x, f.mul(t, y));
            }
            if let Some(bc) = bc {
                if coef.len() < bc.len() {
                    coef.resize(bc.len(), 0);
                }
                for (x, &y) in coef.iter_mut().zip(bc) {
                    *x = f.sub(*x, f.mul(t, y));
                }
            }
        }
    }

    /// Insert a reduced nonzero vector; returns false for zero.
    fn insert(&mut self, mut w: Vec<i64>, mut coef: Option<Vec<i64>>) -> bool {
        let f = self.field;
        let Some(piv) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[piv]).expect("nonzero pivot");
        w.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        if let Some(c) = coef.as_mut() {
            c.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        }
        self.rows.push((piv, w, coef));
        true
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    /// Drop the seed bookkeeping once a seed is finished.
    fn seal(&mut self) {
        for r in &mut self.rows {
            r.2 = None;
        }
    }
}

/// Krylov sequence of one seed reduced against `span`: extends the span and
/// returns the monic polynomial `P` of least degree with
/// `P(A) v` in the span as it was before the call.
fn extend_with_seed(a: &DenseMatrix, v: &[i64], span: &mut ReducedSpan, out: &mut Vec<Vec<i64>>) -> Polynomial {
    let f = *a.field();
    let mut cur = v.to_vec();
    let mut j = 0;
    loop {
        let mut w = cur.clone();
        let mut coef = vec![0i64; j + 1];
        coef[j] = f.one();
        span.reduce(&mut w, &mut coef);
        if w.iter().all(|&x| x == 0) {
            span.seal();
            return Polynomial::new(f, coef);
        }
        span.insert(w, Some(coef));
        out.push(cur.clone());
        cur = a.matvec_unchecked(&cur);
        j += 1;
    }
}

fn require_square(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// Least-degree monic `P` with `P(A) v = 0`.
pub fn krylov_minpoly(a: &DenseMatrix, v: &[i64]) -> Result<Polynomial> {
    require_square(a)?;
    if v.len() != a.rows() {
        return Err(Error::dims("vector length differs from the matrix order"));
    }
    let v: Vec<i64> = v.iter().map(|&x| a.field().from_i64(x)).collect();
    let mut span = ReducedSpan::new(*a.field());
    Ok(extend_with_seed(a, &v, &mut span, &mut Vec::new()))
}

/// A full Krylov basis `K = [K(A, e_s1, d1) ... K(A, e_sk, dk)]` built from
/// standard basis seeds, each seed the lowest-index vector outside the
/// current span. `K^-1 A K` is block upper triangular with companion
/// diagonal blocks of `block_polys`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrylovBasis {
    pub seeds: Vec<usize>,
    pub degrees: Vec<usize>,
    /// Diagonal block polynomials: block `i` is the least-degree monic
    /// polynomial sending `e_si` into the span of the earlier blocks.
    pub block_polys: Vec<Polynomial>,
    /// Columns of `K` with their `(seed, power)` sources.
    pub vectors: Vec<Vec<i64>>,
    pub sources: Vec<(usize, usize)>,
}

impl KrylovBasis {
    pub fn matrix(&self, field: PrimeField) -> DenseMatrix {
        let n = self.vectors.len();
        DenseMatrix::from_fn(field, n, n, |i, j| self.vectors[j][i])
    }
}

pub fn krylov_basis(a: &DenseMatrix) -> Result<KrylovBasis> {
    require_square(a)?;
    let f = *a.field();
    let n = a.rows();
    let mut span = ReducedSpan::new(f);
    let mut kb = KrylovBasis {
        seeds: Vec::new(),
        degrees: Vec::new(),
        block_polys: Vec::new(),
        vectors: Vec::new(),
        sources: Vec::new(),
    };
    for s in 0..n {
        if span.len() == n {
            break;
        }
        let mut e = vec![0i64; n];
        e[s] = f.one();
        let mut probe = e.clone();
        span.reduce(&mut probe, &mut Vec::new());
        if probe.iter().all(|&x| x == 0) {
            continue;
        }
        let before = kb.vectors.len();
        let poly = extend_with_seed(a, &e, &mut span, &mut kb.vectors);
        let d = kb.vectors.len() - before;
        kb.sources.extend((0..d).map(|j| (s, j)));
        kb.seeds.push(s);
        kb.degrees.push(d);
        kb.block_polys.push(poly);
    }
    Ok(kb)
}

/// Minimal polynomial: lcm of the Krylov minimal polynomials of the seeds
/// of a full Krylov basis (their Krylov spaces generate the whole space).
pub fn dense_minpoly(a: &DenseMatrix) -> Result<Polynomial> {
    let kb = krylov_basis(a)?;
    let f = *a.field();
    let mut m = Polynomial::one(f);
    for &s in &kb.seeds {
        let mut e = vec![0i64; a.rows()];
        e[s] = f.one();
        m = m.lcm(&krylov_minpoly(a, &e)?);
    }
    Ok(m)
}

/// Characteristic polynomial as the product of the diagonal block
/// polynomials of the block-triangular Krylov form.
pub fn dense_charpoly(a: &DenseMatrix) -> Result<Polynomial> {
    let kb = krylov_basis(a)?;
    Ok(kb
        .block_polys
        .iter()
        .fold(Polynomial::one(*a.field()), |acc, p| acc.mul(p)))
}
