use std::cell::Cell;
use std::ops::{BitAnd, BitOr, BitXor};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::DenseMatrix;
use crate::rng::SeededRng;
use crate::tiny::gf2::PackedGF2Matrix;

/// Word type the GF(3) circuits are written against.
pub trait BoolWord: Copy + BitXor<Output = Self> + BitAnd<Output = Self> + BitOr<Output = Self> {}

impl<T> BoolWord for T where T: Copy + BitXor<Output = T> + BitAnd<Output = T> + BitOr<Output = T> {}

/// Encoded GF(3) lanes: `0 = (0,0)`, `1 = (1,0)`, `-1 = (1,1)`.
pub type Planes<W> = (W, W);

/// `x + y`, written as `gf3_sub(x, -y)` with the negation folded in.
pub fn gf3_add<W: BoolWord>((x0, x1): Planes<W>, (y0, y1): Planes<W>) -> Planes<W> {
    let s = x0 ^ y1;
    let t = x1 ^ y0;
    ((x0 ^ y0) | (t ^ y1), s & t)
}

pub fn gf3_sub<W: BoolWord>((x0, x1): Planes<W>, (y0, y1): Planes<W>) -> Planes<W> {
    let t = x0 ^ y0;
    (t | (x1 ^ y1), (t ^ y1) & (y0 ^ x1))
}

pub fn gf3_neg<W: BoolWord>((x0, x1): Planes<W>) -> Planes<W> {
    (x0, x1 ^ x0)
}

/// A word that tallies every boolean operation applied to it.
#[derive(Clone, Copy)]
pub struct CountedWord<'a> {
    pub value: u64,
    ops: &'a Cell<u64>,
}

impl<'a> CountedWord<'a> {
    pub fn new(value: u64, ops: &'a Cell<u64>) -> Self {
        CountedWord { value, ops }
    }

    fn op(self, value: u64) -> Self {
        self.ops.set(self.ops.get() + 1);
        CountedWord { value, ops: self.ops }
    }
}

impl BitXor for CountedWord<'_> {
    type Output = Self;
    fn bitxor(self, o: Self) -> Self {
        self.op(self.value ^ o.value)
    }
}

impl BitAnd for CountedWord<'_> {
    type Output = Self;
    fn bitand(self, o: Self) -> Self {
        self.op(self.value & o.value)
    }
}

impl BitOr for CountedWord<'_> {
    type Output = Self;
    fn bitor(self, o: Self) -> Self {
        self.op(self.value | o.value)
    }
}

/// Encode a residue `0, 1, 2` as a plane pair of single bits.
pub fn encode(v: u8) -> Planes<u64> {
    match v % 3 {
        0 => (0, 0),
        1 => (1, 0),
        _ => (1, 1),
    }
}

pub fn decode((x0, x1): Planes<u64>) -> u8 {
    match (x0 & 1, x1 & 1) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => panic!("invalid GF(3) encoding"),
    }
}

/// GF(3) matrix stored as two bit planes with the packed GF(2) layout.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitslicedGF3Matrix {
    plane0: PackedGF2Matrix,
    plane1: PackedGF2Matrix,
}

impl BitslicedGF3Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitslicedGF3Matrix {
            plane0: PackedGF2Matrix::zeros(rows, cols),
            plane1: PackedGF2Matrix::zeros(rows, cols),
        }
    }

    pub fn rows(&self) -> usize {
        self.plane0.rows()
    }

    pub fn cols(&self) -> usize {
        self.plane0.cols()
    }

    pub fn planes(&self) -> (&PackedGF2Matrix, &PackedGF2Matrix) {
        (&self.plane0, &self.plane1)
    }

    pub fn from_dense(a: &DenseMatrix) -> Result<Self> {
        if a.field().modulus() != 3 {
            return Err(Error::domain("bit-sliced matrices need p = 3"));
        }
        let mut m = Self::zeros(a.rows(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m.set(i, j, a.field().to_classic(a.get(i, j)) as u8);
            }
        }
        Ok(m)
    }

    pub fn to_dense(&self, field: PrimeField) -> Result<DenseMatrix> {
        if field.modulus() != 3 {
            return Err(Error::domain("bit-sliced matrices need p = 3"));
        }
        Ok(DenseMatrix::from_fn(field, self.rows(), self.cols(), |i, j| {
            field.from_u64(self.get(i, j) as u64)
        }))
    }

    pub fn random(rows: usize, cols: usize, rng: &mut SeededRng) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, rng.below(3) as u8);
            }
        }
        m
    }

    /// Entry as a residue in `0..3`.
    pub fn get(&self, i: usize, j: usize) -> u8 {
        decode((self.plane0.get(i, j) as u64, self.plane1.get(i, j) as u64))
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        let (a, b) = encode(v);
        self.plane0.set(i, j, a == 1);
        self.plane1.set(i, j, b == 1);
    }

    /// True when no entry carries the forbidden `(0,1)` pattern.
    pub fn is_valid(&self) -> bool {
        self.plane1
            .words()
            .iter()
            .zip(self.plane0.words())
            .all(|(b, a)| b & !a == 0)
    }

    fn zip_words(&self, o: &Self, f: impl Fn(Planes<u64>, Planes<u64>) -> Planes<u64>) -> Result<Self> {
        if (self.rows(), self.cols()) != (o.rows(), o.cols()) {
            return Err(Error::dims("bit-sliced operands differ in shape"));
        }
        let mut out = self.clone();
        let (w0, w1) = (out.plane0.words_mut(), out.plane1.words_mut());
        for (i, (a, b)) in w0.iter_mut().zip(w1.iter_mut()).enumerate() {
            let (r0, r1) = f((*a, *b), (o.plane0.words()[i], o.plane1.words()[i]));
            *a = r0;
            *b = r1;
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip_words(o, gf3_add)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip_words(o, gf3_sub)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        let p0 = self.plane0.words();
        for (b, &a) in out.plane1.words_mut().iter_mut().zip(p0) {
            *b ^= a;
        }
        out
    }

    /// Row-combination product: each entry of `A` adds, subtracts or skips
    /// a whole packed row of `B`.
    pub fn mul(&self, b: &Self) -> Result<Self> {
        if self.cols() != b.rows() {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                b.rows(),
                b.cols()
            )));
        }
        let mut c = Self::zeros(self.rows(), b.cols());
        let w = c.plane0.words_per_row();
        for i in 0..self.rows() {
            let mut acc0 = vec![0u64; w];
            let mut acc1 = vec![0u64; w];
            for l in 0..self.cols() {
                let v = self.get(i, l);
                if v == 0 {
                    continue;
                }
                let (r0, r1) = (b.plane0.row(l), b.plane1.row(l));
                for t in 0..w {
                    let x = (acc0[t], acc1[t]);
                    let y = (r0[t], r1[t]);
                    (acc0[t], acc1[t]) = if v == 1 { gf3_add(x, y) } else { gf3_sub(x, y) };
                }
            }
            for t in 0..w {
                c.plane0.words_mut()[i * w + t] = acc0[t];
                c.plane1.words_mut()[i * w + t] = acc1[t];
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_mm::gemm_classic;

    #[test]
    fn exhaustive_circuits_with_op_counts() {
        for x in 0..3u8 {
            for y in 0..3u8 {
                let ops = Cell::new(0);
                let w = |(a, b): Planes<u64>| (CountedWord::new(a, &ops), CountedWord::new(b, &ops));
                let (s0, s1) = gf3_add(w(encode(x)), w(encode(y)));
                assert_eq!(ops.get(), 6);
                assert_eq!(decode((s0.value, s1.value)), (x + y) % 3);
                ops.set(0);
                let (d0, d1) = gf3_sub(w(encode(x)), w(encode(y)));
                assert_eq!(ops.get(), 6);
                assert_eq!(decode((d0.value, d1.value)), (x + 3 - y) % 3);
                ops.set(0);
                let (n0, n1) = gf3_neg(w(encode(x)));
                assert_eq!(ops.get(), 1);
                assert_eq!(decode((n0.value, n1.value)), (3 - x) % 3);
            }
        }
        assert_eq!(gf3_add(encode(1), encode(1)), (1, 1));
    }

    #[test]
    fn matrix_ops_match_dense() {
        let f = PrimeField::classic(3).unwrap();
        let mut rng = SeededRng::new(3);
        for (m, k, n) in [(5, 7, 9), (70, 65, 130), (1, 1, 1)] {
            let a = BitslicedGF3Matrix::random(m, k, &mut rng);
            let b = BitslicedGF3Matrix::random(k, n, &mut rng);
            let c = a.mul(&b).unwrap();
            assert!(c.is_valid());
            let want = gemm_classic(&a.to_dense(f).unwrap(), &b.to_dense(f).unwrap(), None).unwrap();
            assert_eq!(c.to_dense(f).unwrap(), want);
            let a2 = BitslicedGF3Matrix::random(m, k, &mut rng);
            let (da, db) = (a.to_dense(f).unwrap(), a2.to_dense(f).unwrap());
            assert_eq!(a.add(&a2).unwrap().to_dense(f).unwrap(), da.add(&db).unwrap());
            assert_eq!(a.sub(&a2).unwrap().to_dense(f).unwrap(), da.sub(&db).unwrap());
            assert_eq!(a.neg().to_dense(f).unwrap(), da.neg());
            assert!(a.sub(&a).unwrap().to_dense(f).unwrap().is_zero());
            assert_eq!(BitslicedGF3Matrix::from_dense(&da).unwrap(), a);
        }
    }
}
