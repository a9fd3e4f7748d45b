use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{ExtElem, ExtField};
use crate::tiny::qadic::{fgdp_q_for, redq, redq_big};

/// Dot product over GF(p^k) through one integer accumulation.
///
/// Each element is replaced by its Kronecker value `sum c_i q^i`; the sum of
/// the `n` integer products carries the `2k-1` coefficients of the
/// unreduced polynomial dot product as base-`q` digits. One REDQ brings
/// them back modulo `p`, and the high half is folded through the field
/// tables as `X^(k-1) * H(X)`.
///
/// With `q = None` the smallest admissible power of two is used.
pub fn fgdp_dot(ext: &ExtField, v1: &[ExtElem], v2: &[ExtElem], q: Option<u64>) -> Result<ExtElem> {
    if v1.len() != v2.len() {
        return Err(Error::dims(format!(
            "vector lengths {} and {} differ",
            v1.len(),
            v2.len()
        )));
    }
    let (p, k) = (ext.characteristic(), ext.degree() as usize);
    let need = fgdp_q_for(p, k as u32, v1.len())?;
    let q = match q {
        None => need,
        Some(q) if q.is_power_of_two() && q >= need => q,
        Some(q) => {
            return Err(Error::config(format!(
                "q = {q} too small for length {} over GF({p}^{k}); need a power of two >= {need}",
                v1.len()
            )))
        }
    };
    let b = q.trailing_zeros() as usize;
    let d = 2 * k - 2;
    let mu = if b * (d + 1) <= 128 {
        let table: Vec<u128> = if v1.len() * 2 >= ext.order() as usize {
            (0..ext.order())
                .map(|e| ext.kronecker_eval(ext_from_exp(ext, e), q))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let kron = |a: ExtElem| -> Result<u128> {
            if table.is_empty() {
                ext.kronecker_eval(a, q)
            } else {
                Ok(table[a.exponent() as usize])
            }
        };
        let mut acc: u128 = 0;
        for (&x, &y) in v1.iter().zip(v2) {
            acc += kron(x)? * kron(y)?;
        }
        redq(acc, p, q, d)?.1
    } else {
        let kron = |a: ExtElem| -> BigUint {
            ext.to_coeffs(a)
                .iter()
                .rev()
                .fold(BigUint::zero(), |acc, &c| (acc << b) + BigUint::from(c))
        };
        let mut acc = BigUint::zero();
        for (&x, &y) in v1.iter().zip(v2) {
            acc += kron(x) * kron(y);
        }
        redq_big(&acc, p, q, d)?
    };
    let low = ext.from_coeffs(&mu[..k - 1])?;
    let high = ext.from_coeffs(&mu[k - 1..])?;
    let mut shift = vec![0u64; k];
    shift[k - 1] = 1;
    let x_km1 = ext.from_coeffs(&shift)?;
    Ok(ext.add(ext.mul(x_km1, high), low))
}

fn ext_from_exp(ext: &ExtField, e: u32) -> ExtElem {
    if e + 1 == ext.order() {
        ext.zero()
    } else {
        ext.generator_power(e as u64)
    }
}
