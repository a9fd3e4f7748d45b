use rayon::prelude::*;

use crate::dense_mm::classic::check_dims;
use crate::dense_mm::{MulConfig, OpCounter};
use crate::error::{Error, Result};
use crate::field::{PrimeField, Representation};
use crate::matrix::DenseMatrix;

/// Largest block depth `k` with `k (p-1)^2 < 2^(beta+1)`: that many
/// centered products can be summed exactly before reducing.
pub fn k_max(p: u64, beta: u32) -> u64 {
    let sq = (p as u128 - 1).pow(2);
    if sq == 0 {
        return u64::MAX;
    }
    let cap: u128 = 1u128 << (beta + 1);
    ((cap - 1) / sq).min(u64::MAX as u128) as u64
}

/// Entries as centered integers `(1-p)/2 ..= (p-1)/2` (odd `p`), or
/// classic `{0, 1}` for `p = 2`.
pub(crate) fn lift_centered(a: &DenseMatrix) -> Vec<i64> {
    let f = a.field();
    if f.rep() == Representation::Centered || f.modulus() == 2 {
        return a.data().to_vec();
    }
    let p = f.modulus() as i64;
    let h = p / 2;
    a.data().iter().map(|&x| if x > h { x - p } else { x }).collect()
}

/// Row-parallel product of centered integer matrices reduced into
/// `field`, summing blocks of `k_max(p, beta)` products between reductions.
pub(crate) fn reduced_kernel(
    a: &[i64],
    b: &[i64],
    (m, k, n): (usize, usize, usize),
    field: &PrimeField,
    beta: u32,
    counter: Option<&OpCounter>,
) -> Vec<i64> {
    let p = field.modulus();
    let mut out = vec![0i64; m * n];
    if n == 0 || m == 0 {
        return out;
    }
    let depth = if p == 2 {
        // Classic {0,1}: k products sum to at most k.
        (1u64 << beta.min(62)) as usize
    } else {
        k_max(p, beta).min(usize::MAX as u64) as usize
    };
    let pi = p as i64;
    if depth == 0 {
        // Products too wide to accumulate: reduce each one in 128 bits.
        out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let ar = &a[i * k..(i + 1) * k];
            for (j, o) in row.iter_mut().enumerate() {
                let mut acc: i128 = 0;
                for (l, &x) in ar.iter().enumerate() {
                    acc += (x as i128 * b[l * n + j] as i128) % p as i128;
                }
                *o = field.from_i128(acc);
            }
        });
        if let Some(c) = counter {
            c.mul_adds((m * k * n) as u64);
            c.reductions((m * k * n) as u64);
        }
        return out;
    }
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let ar = &a[i * k..(i + 1) * k];
        let mut acc = vec![0i64; n];
        let mut res = vec![0i64; n];
        for l0 in (0..k).step_by(depth) {
            acc.iter_mut().for_each(|x| *x = 0);
            for l in l0..(l0 + depth).min(k) {
                let x = ar[l];
                if x == 0 {
                    continue;
                }
                for (s, &y) in acc.iter_mut().zip(&b[l * n..(l + 1) * n]) {
                    *s += x * y;
                }
            }
            for (r, &s) in res.iter_mut().zip(&acc) {
                *r = (*r + s % pi) % pi;
            }
        }
        for (o, &r) in row.iter_mut().zip(&res) {
            *o = field.from_i64(r);
        }
    });
    if let Some(c) = counter {
        c.mul_adds((m * k * n) as u64);
        if k > 0 {
            c.reductions((m * n * k.div_ceil(depth)) as u64);
        }
    }
    out
}

/// Delayed-reduction product over an odd prime field.
///
/// Classic-representation inputs are lifted to centered values internally;
/// the result is returned in the representation of `a`.
pub fn fgemm(a: &DenseMatrix, b: &DenseMatrix, cfg: &MulConfig, counter: Option<&OpCounter>) -> Result<DenseMatrix> {
    cfg.validate()?;
    check_dims(a, b)?;
    let f = *a.field();
    if f.modulus() % 2 == 0 {
        return Err(Error::UnsupportedRepresentation(
            "fgemm needs an odd prime; use the packed GF(2) kernels".into(),
        ));
    }
    let (la, lb) = (lift_centered(a), lift_centered(b));
    let data = reduced_kernel(
        &la,
        &lb,
        (a.rows(), a.cols(), b.cols()),
        &f,
        cfg.accumulator_bits,
        counter,
    );
    Ok(DenseMatrix::from_canonical(f, a.rows(), b.cols(), data))
}
