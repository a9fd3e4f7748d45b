use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::DenseMatrix;

fn radix_bits(p: u64, q: u64) -> Result<u32> {
    if !q.is_power_of_two() || q < 2 {
        return Err(Error::config(format!("q = {q} is not a power of two")));
    }
    if q <= p {
        return Err(Error::config(format!("q = {q} must exceed p = {p}")));
    }
    Ok(q.trailing_zeros())
}

fn next_pow2_above(x: u128) -> u128 {
    (x + 1).next_power_of_two()
}

/// Smallest power of two `q > k_inner (p-1)^2` (and `q > p`): packed digits
/// then survive a length-`k_inner` accumulation of classic products.
pub fn packed_q_for(p: u64, k_inner: usize) -> Result<u64> {
    let bound = k_inner as u128 * (p as u128 - 1).pow(2);
    let q = next_pow2_above(bound).max(next_pow2_above(p as u128));
    u64::try_from(q).map_err(|_| Error::config("required q exceeds 64 bits"))
}

/// Smallest power of two above `n k (p-1)^2`, the largest coefficient of a
/// length-`n` sum of products of degree `< k` polynomials.
pub fn fgdp_q_for(p: u64, k: u32, n: usize) -> Result<u64> {
    packed_q_for(p, n * k as usize)
}

/// Simultaneous reduction modulo `p` of the `d+1` base-`q` digits of `r`.
///
/// Returns `(rho, mu)` with `mu_i = digit_i(r) mod p` and
/// `rho = sum mu_i q^i`. Requires `r < q^(d+1)`.
pub fn redq(r: u128, p: u64, q: u64, d: usize) -> Result<(u128, Vec<u64>)> {
    let b = radix_bits(p, q)? as usize;
    let width = b * (d + 1);
    if width > 128 {
        return Err(Error::config("packed value exceeds 128 bits; use redq_big"));
    }
    if width < 128 && r >> width != 0 {
        return Err(Error::domain(format!("{r} has more than {} base-{q} digits", d + 1)));
    }
    let (p, qq) = (p as u128, q as u128);
    let s = r / p;
    let u: Vec<u128> = (0..=d).map(|i| (r >> (b * i)) - p * (s >> (b * i))).collect();
    let mu: Vec<u64> = if qq % p == 0 {
        u.iter().map(|&x| x as u64).collect()
    } else {
        let qm = qq % p;
        (0..=d)
            .map(|i| {
                let next = if i == d { 0 } else { u[i + 1] };
                ((u[i] + p * p - qm * next) % p) as u64
            })
            .collect()
    };
    let rho = mu.iter().rev().fold(0u128, |acc, &m| (acc << b) | m as u128);
    Ok((rho, mu))
}

/// [`redq`] for packed values wider than 128 bits; returns the digits.
pub fn redq_big(r: &BigUint, p: u64, q: u64, d: usize) -> Result<Vec<u64>> {
    let b = radix_bits(p, q)? as usize;
    if r.bits() > (b * (d + 1)) as u64 {
        return Err(Error::domain(format!("value has more than {} base-{q} digits", d + 1)));
    }
    let pb = BigUint::from(p);
    let s = r / &pb;
    let u: Vec<u64> = (0..=d)
        .map(|i| {
            let x = (r >> (b * i)) - &pb * (&s >> (b * i));
            x.to_u64().expect("residue below p")
        })
        .collect();
    if q % p == 0 {
        return Ok(u);
    }
    let (p, qm) = (p as u128, (q % p) as u128);
    Ok((0..=d)
        .map(|i| {
            let next = if i == d { 0 } else { u[i + 1] as u128 };
            ((u[i] as u128 + p * p - qm * next) % p) as u64
        })
        .collect())
}

/// [`redq`] on explicit digits, each of which must lie in `[0, q)`.
pub fn redq_digits(digits: &[u64], p: u64, q: u64) -> Result<(u128, Vec<u64>)> {
    let b = radix_bits(p, q)?;
    if digits.is_empty() {
        return Ok((0, Vec::new()));
    }
    if let Some(&bad) = digits.iter().find(|&&x| x >= q) {
        return Err(Error::domain(format!("digit {bad} is not below q = {q}")));
    }
    if b as usize * digits.len() > 128 {
        return Err(Error::config("packed value exceeds 128 bits"));
    }
    let r = digits.iter().rev().fold(0u128, |acc, &x| (acc << b) | x as u128);
    redq(r, p, q, digits.len() - 1)
}

/// A vector over GF(p) packed as base-`q` digits, `floor(64 / log2 q)`
/// digits per machine word, lowest index in the lowest digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QadicVector {
    p: u64,
    q: u64,
    len: usize,
    words: Vec<u64>,
}

impl QadicVector {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn digits_per_word(&self) -> usize {
        digits_per_word(self.q)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The packed integer, when the vector fits in one word.
    pub fn value(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn digit(&self, i: usize) -> u64 {
        let e = self.digits_per_word();
        let b = self.q.trailing_zeros();
        (self.words[i / e] >> (b as usize * (i % e))) & (self.q - 1)
    }
}

fn digits_per_word(q: u64) -> usize {
    64 / q.trailing_zeros() as usize
}

fn pack_digits(digits: impl ExactSizeIterator<Item = u64>, q: u64) -> Vec<u64> {
    let (e, b) = (digits_per_word(q), q.trailing_zeros());
    let mut words = vec![0u64; digits.len().div_ceil(e)];
    for (i, x) in digits.enumerate() {
        words[i / e] |= x << (b as usize * (i % e));
    }
    words
}

pub fn pack_qadic(field: &PrimeField, v: &[i64], q: u64) -> Result<QadicVector> {
    let p = field.modulus();
    let b = radix_bits(p, q)?;
    if b > 63 {
        return Err(Error::config("q overflows the 64-bit word budget"));
    }
    Ok(QadicVector {
        p,
        q,
        len: v.len(),
        words: pack_digits(v.iter().map(|&x| field.to_classic(x)), q),
    })
}

pub fn unpack_qadic(field: &PrimeField, v: &QadicVector) -> Result<Vec<i64>> {
    if field.modulus() != v.p {
        return Err(Error::domain("packed vector belongs to another field"));
    }
    Ok((0..v.len).map(|i| field.from_u64(v.digit(i))).collect())
}

/// Matrix whose rows are packed q-adically (the right operand of
/// [`rightpacked_mul`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QadicMatrix {
    field: PrimeField,
    q: u64,
    rows: usize,
    cols: usize,
    wpr: usize,
    words: Vec<u64>,
}

impl QadicMatrix {
    pub fn pack(a: &DenseMatrix, q: u64) -> Result<Self> {
        let f = *a.field();
        let b = radix_bits(f.modulus(), q)?;
        if b > 63 {
            return Err(Error::config("q overflows the 64-bit word budget"));
        }
        let wpr = a.cols().div_ceil(digits_per_word(q));
        let mut words = Vec::with_capacity(a.rows() * wpr);
        for i in 0..a.rows() {
            words.extend(pack_digits(a.row(i).iter().map(|&x| f.to_classic(x)), q));
        }
        Ok(QadicMatrix {
            field: f,
            q,
            rows: a.rows(),
            cols: a.cols(),
            wpr,
            words,
        })
    }

    pub fn unpack(&self) -> DenseMatrix {
        let (e, b) = (digits_per_word(self.q), self.q.trailing_zeros() as usize);
        DenseMatrix::from_fn(self.field, self.rows, self.cols, |i, j| {
            let w = self.words[i * self.wpr + j / e];
            self.field.from_u64((w >> (b * (j % e))) & (self.q - 1))
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Reduce every digit modulo `p` with [`redq`].
    pub fn normalized(&self) -> Result<Self> {
        let d = digits_per_word(self.q) - 1;
        let p = self.field.modulus();
        let words = self
            .words
            .iter()
            .map(|&w| redq(w as u128, p, self.q, d).map(|(rho, _)| rho as u64))
            .collect::<Result<_>>()?;
        Ok(QadicMatrix { words, ..self.clone() })
    }
}

/// `C = A B` with `B` packed by rows: each packed word of a row of `C` is
/// an integer combination of packed words of `B` weighted by the classic
/// entries of `A`, followed by one REDQ per word.
pub fn rightpacked_mul(a: &DenseMatrix, b: &QadicMatrix) -> Result<QadicMatrix> {
    if a.cols() != b.rows {
        return Err(Error::dims(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows,
            b.cols
        )));
    }
    if *a.field() != b.field {
        return Err(Error::dims("operands live in different fields"));
    }
    let f = b.field;
    let p = f.modulus();
    let need = packed_q_for(p, a.cols())?;
    if b.q < need {
        return Err(Error::config(format!(
            "q = {} too small for inner dimension {}; need at least {need}",
            b.q,
            a.cols()
        )));
    }
    let d = digits_per_word(b.q) - 1;
    let w = b.wpr;
    let mut words = vec![0u64; a.rows() * w];
    if w > 0 {
        words
            .par_chunks_mut(w)
            .enumerate()
            .try_for_each(|(i, out)| -> Result<()> {
                for (l, &x) in a.row(i).iter().enumerate() {
                    let x = f.to_classic(x);
                    if x == 0 {
                        continue;
                    }
                    for (o, &y) in out.iter_mut().zip(&b.words[l * w..(l + 1) * w]) {
                        *o += x * y;
                    }
                }
                for o in out.iter_mut() {
                    *o = redq(*o as u128, p, b.q, d)?.0 as u64;
                }
                Ok(())
            })?;
    }
    Ok(QadicMatrix {
        field: f,
        q: b.q,
        rows: a.rows(),
        cols: b.cols,
        wpr: w,
        words,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_mm::gemm_classic;
    use crate::field::Representation;
    use crate::matrix::random_dense;
    use crate::rng::SeededRng;
    use num_traits::Zero;

    /// Integer with base-`q` digits `digits` (lowest first).
    fn big_from_digits(digits: &[u64], q: u64) -> BigUint {
        let b = q.trailing_zeros() as usize;
        digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &x| (acc << b) + BigUint::from(x))
    }

    #[test]
    fn redq_examples() {
        assert_eq!(redq(7, 5, 8, 0).unwrap(), (2, vec![2]));
        assert_eq!(redq(117, 3, 16, 1).unwrap(), (18, vec![2, 1]));
        // p | q: compression alone is exact.
        assert_eq!(redq(3 + 2 * 4 + 3 * 16, 2, 4, 2).unwrap().1, vec![1, 0, 1]);
        assert!(redq(16, 3, 4, 1).is_err());
        assert!(redq(1, 3, 6, 0).is_err());
        assert!(redq_digits(&[5, 1], 3, 4).is_err());
    }

    #[test]
    fn redq_stress_against_per_digit_mod() {
        let mut rng = SeededRng::new(99);
        for _ in 0..10_000 {
            let p = [2u64, 3, 5, 7, 11, 13, 251, 65521][rng.index(8)];
            let min_b = 64 - p.leading_zeros();
            let b = min_b + rng.below(6) as u32;
            let q = 1u64 << b;
            let ndig = 1 + rng.index((128 / b as usize).min(12));
            let digits: Vec<u64> = (0..ndig).map(|_| rng.below(q)).collect();
            let (rho, mu) = redq_digits(&digits, p, q).unwrap();
            let want: Vec<u64> = digits.iter().map(|x| x % p).collect();
            assert_eq!(mu, want);
            let packed = want.iter().rev().fold(0u128, |a, &x| (a << b) | x as u128);
            assert_eq!(rho, packed);
            let big = redq_big(&big_from_digits(&digits, q), p, q, ndig - 1).unwrap();
            assert_eq!(big, want);
        }
    }

    #[test]
    fn packing() {
        let f = PrimeField::classic(3).unwrap();
        let v = pack_qadic(&f, &[1, 2, 0], 4).unwrap();
        assert_eq!(v.value(), Some(9));
        assert_eq!(pack_qadic(&f, &[0; 5], 4).unwrap().value(), Some(0));
        assert!(pack_qadic(&f, &[1], 3).is_err());
        assert!(pack_qadic(&f, &[1], 2).is_err());
        let mut rng = SeededRng::new(4);
        for _ in 0..10_000 {
            let p = [2u64, 3, 7, 65521][rng.index(4)];
            let f = PrimeField::new(
                p,
                if p == 2 {
                    Representation::Classic
                } else {
                    Representation::Centered
                },
            )
            .unwrap();
            let q = packed_q_for(p, 1 + rng.index(100)).unwrap();
            let len = rng.index(40);
            let v = rng.vector(&f, len);
            let packed = pack_qadic(&f, &v, q).unwrap();
            assert_eq!(unpack_qadic(&f, &packed).unwrap(), v);
        }
    }

    #[test]
    fn q_sizing() {
        assert_eq!(packed_q_for(3, 64).unwrap(), 512);
        assert_eq!(fgdp_q_for(3, 2, 64).unwrap(), 1024);
        assert_eq!(packed_q_for(2, 1).unwrap(), 4);
    }

    #[test]
    fn rightpacked_against_classic() {
        let mut rng = SeededRng::new(8);
        let f = PrimeField::classic(3).unwrap();
        let a = random_dense(f, 8, 8, &mut rng);
        let b = random_dense(f, 8, 8, &mut rng);
        let bp = QadicMatrix::pack(&b, 1 << 10).unwrap();
        let c = rightpacked_mul(&a, &bp).unwrap();
        assert_eq!(c.unpack(), gemm_classic(&a, &b, None).unwrap());
        let id = rightpacked_mul(&DenseMatrix::identity(f, 8), &bp).unwrap();
        assert_eq!(id, bp.normalized().unwrap());
        for p in [2u64, 3, 5, 31, 1021] {
            let f = PrimeField::new(
                p,
                if p == 2 {
                    Representation::Classic
                } else {
                    Representation::Centered
                },
            )
            .unwrap();
            for _ in 0..10 {
                let (m, k, n) = (1 + rng.index(20), 1 + rng.index(70), 1 + rng.index(40));
                let a = random_dense(f, m, k, &mut rng);
                let b = random_dense(f, k, n, &mut rng);
                let bp = QadicMatrix::pack(&b, packed_q_for(p, k).unwrap()).unwrap();
                assert_eq!(
                    rightpacked_mul(&a, &bp).unwrap().unpack(),
                    gemm_classic(&a, &b, None).unwrap()
                );
            }
        }
        let big_k = random_dense(f, 2, 64, &mut rng);
        let small_q = QadicMatrix::pack(&random_dense(f, 64, 3, &mut rng), 256).unwrap();
        assert!(matches!(rightpacked_mul(&big_k, &small_q), Err(Error::Config(_))));
    }
}
