use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::DenseMatrix;
use crate::rng::SeededRng;

/// GF(2) matrix with 64 entries per machine word, row-major. Bits past
/// column `cols` in the last word of each row are always zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PackedGF2Matrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    words: Vec<u64>,
}

/// Work done by one four-Russians product.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct M4rmStats {
    /// Table width actually used.
    pub k: usize,
    /// Row XORs spent building each table (`2^k' - 1` for a slice of width `k'`).
    pub table_xors: Vec<u64>,
    /// Row XORs spent combining table rows into the product.
    pub lookup_xors: u64,
}

impl PackedGF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = cols.div_ceil(64);
        PackedGF2Matrix {
            rows,
            cols,
            wpr,
            words: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn random(rows: usize, cols: usize, rng: &mut SeededRng) -> Self {
        let mut m = Self::zeros(rows, cols);
        for w in m.words.iter_mut() {
            *w = rng.next_u64();
        }
        m.clear_padding();
        m
    }

    pub fn from_dense(a: &DenseMatrix) -> Result<Self> {
        if a.field().modulus() != 2 {
            return Err(Error::domain("packed GF(2) matrices need p = 2"));
        }
        let mut m = Self::zeros(a.rows(), a.cols());
        for i in 0..a.rows() {
            for (j, &v) in a.row(i).iter().enumerate() {
                if v != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let f = PrimeField::classic(2).expect("2 is prime");
        DenseMatrix::from_fn(f, self.rows, self.cols, |i, j| self.get(i, j) as i64)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words_per_row(&self) -> usize {
        self.wpr
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    fn last_mask(&self) -> u64 {
        match self.cols % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    fn clear_padding(&mut self) {
        if self.wpr == 0 {
            return;
        }
        let mask = self.last_mask();
        for i in 0..self.rows {
            self.words[i * self.wpr + self.wpr - 1] &= mask;
        }
    }

    /// True when every padding bit is zero.
    pub fn padding_is_clean(&self) -> bool {
        self.wpr == 0 || (0..self.rows).all(|i| self.words[i * self.wpr + self.wpr - 1] & !self.last_mask() == 0)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.words[i * self.wpr + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.words[i * self.wpr + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.wpr..(i + 1) * self.wpr]
    }

    /// Row `dst` ^= row `src`.
    pub fn add_row(&mut self, dst: usize, src: usize) {
        if dst == src {
            self.row_mut(dst).iter_mut().for_each(|w| *w = 0);
            return;
        }
        let w = self.wpr;
        let (lo, hi) = (dst.min(src), dst.max(src));
        let (head, tail) = self.words.split_at_mut(hi * w);
        let (a, b) = (&mut head[lo * w..(lo + 1) * w], &mut tail[..w]);
        let (d, s) = if dst < src { (a, b) } else { (b, a) };
        for (x, y) in d.iter_mut().zip(s.iter()) {
            *x ^= *y;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.wpr {
            self.words.swap(a * self.wpr + k, b * self.wpr + k);
        }
    }

    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        let w = self.wpr;
        &mut self.words[i * w..(i + 1) * w]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// `k` consecutive bits of row `i` starting at column `c` (`k <= 16`).
    #[inline]
    fn bits(&self, i: usize, c: usize, k: usize) -> usize {
        let base = i * self.wpr;
        let (w, o) = (c / 64, c % 64);
        let mut v = self.words[base + w] >> o;
        if o + k > 64 && w + 1 < self.wpr {
            v |= self.words[base + w + 1] << (64 - o);
        }
        (v & ((1u64 << k) - 1)) as usize
    }

    fn check_mul(&self, b: &Self) -> Result<()> {
        if self.cols != b.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        Ok(())
    }

    /// Row-combination product: row `i` of `C` is the XOR of the rows of
    /// `B` selected by the set bits of row `i` of `A`.
    pub fn naive_mul(&self, b: &Self) -> Result<Self> {
        self.check_mul(b)?;
        let mut c = Self::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                if self.get(i, l) {
                    for (x, y) in c.row_mut(i).iter_mut().zip(b.row(l)) {
                        *x ^= *y;
                    }
                }
            }
        }
        Ok(c)
    }
}

/// `max(1, min(8, floor(log2 n)))`
pub fn default_table_width(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    (usize::BITS - 1 - n.leading_zeros()).clamp(1, 8) as usize
}

/// Four-Russians product: `A` is consumed in `k`-bit column slices; for
/// each slice the table of all `2^k` combinations of the matching rows of
/// `B` is built in Gray-code order, one row XOR per entry.
pub fn m4rm_mul(a: &PackedGF2Matrix, b: &PackedGF2Matrix, k: usize) -> Result<(PackedGF2Matrix, M4rmStats)> {
    a.check_mul(b)?;
    if !(1..=16).contains(&k) {
        return Err(Error::config("table width must be in 1..=16"));
    }
    let w = b.wpr;
    let mut c = PackedGF2Matrix::zeros(a.rows, b.cols);
    let mut stats = M4rmStats {
        k,
        ..M4rmStats::default()
    };
    let mut table = vec![0u64; (1 << k) * w];
    let mut start = 0;
    while start < a.cols {
        let kk = k.min(a.cols - start);
        table[..w].iter_mut().for_each(|x| *x = 0);
        let mut xors = 0u64;
        for i in 1usize..(1 << kk) {
            let g = i ^ (i >> 1);
            let prev = (i - 1) ^ ((i - 1) >> 1);
            let bit = (g ^ prev).trailing_zeros() as usize;
            let src = b.row(start + bit);
            for t in 0..w {
                table[g * w + t] = table[prev * w + t] ^ src[t];
            }
            xors += 1;
        }
        stats.table_xors.push(xors);
        for i in 0..a.rows {
            let idx = a.bits(i, start, kk);
            if idx != 0 {
                let row = &table[idx * w..(idx + 1) * w];
                for (x, y) in c.row_mut(i).iter_mut().zip(row) {
                    *x ^= *y;
                }
                stats.lookup_xors += 1;
            }
        }
        start += kk;
    }
    Ok((c, stats))
}

/// Row-echelonize in place with word-level row operations; returns the
/// pivot columns (so the rank is their count).
pub fn gf2_echelonize(m: &mut PackedGF2Matrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
            continue;
        };
        m.swap_rows(r, p);
        for i in r + 1..m.rows {
            if m.get(i, c) {
                m.add_row(i, r);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn gf2_rank(m: &PackedGF2Matrix) -> usize {
    gf2_echelonize(&mut m.clone()).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_mm::gemm_classic;
    use crate::matrix::naive_rank;

    #[test]
    fn m4rm_against_dense_oracle() {
        let mut rng = SeededRng::new(17);
        for (m, k, n) in [(96, 96, 96), (1, 1, 1), (65, 130, 63), (7, 200, 129), (0, 5, 3)] {
            let a = PackedGF2Matrix::random(m, k, &mut rng);
            let b = PackedGF2Matrix::random(k, n, &mut rng);
            let want = gemm_classic(&a.to_dense(), &b.to_dense(), None).unwrap();
            for width in [1, 4, default_table_width(k), 8, 11] {
                let (c, stats) = m4rm_mul(&a, &b, width).unwrap();
                assert_eq!(c.to_dense(), want);
                assert!(c.padding_is_clean());
                for (s, &x) in stats.table_xors.iter().enumerate() {
                    let kk = width.min(k - s * width);
                    assert_eq!(x, (1 << kk) - 1);
                }
            }
            assert_eq!(a.naive_mul(&b).unwrap().to_dense(), want);
        }
    }

    #[test]
    fn identity_and_table_count() {
        let mut rng = SeededRng::new(1);
        let b = PackedGF2Matrix::random(4, 70, &mut rng);
        let (c, stats) = m4rm_mul(&PackedGF2Matrix::identity(4), &b, 4).unwrap();
        assert_eq!(c, b);
        assert_eq!(stats.table_xors, vec![15]);
        assert_eq!(default_table_width(1), 1);
        assert_eq!(default_table_width(96), 6);
        assert_eq!(default_table_width(100_000), 8);
    }

    #[test]
    fn packed_rank() {
        let mut rng = SeededRng::new(5);
        for _ in 0..20 {
            let a = PackedGF2Matrix::random(40, 90, &mut rng);
            assert_eq!(gf2_rank(&a), naive_rank(&a.to_dense()));
        }
    }
}
