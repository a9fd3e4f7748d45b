//! Distinct-degree factor profiles and the extended totient
//! `Phi_{q,k}(f) = prod (1 - q^(-k d_i))` over the distinct monic
//! irreducible factors of `f`, with `d_i` their degrees.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::field::Polynomial;

/// Degrees of the distinct monic irreducible factors of `f`, ascending,
/// one entry per factor (so `x^2 (x+1)` over GF(2) gives `[1, 1]`).
///
/// Works on non-squarefree input: every factor found at degree `i` is
/// divided out completely before moving on.
pub fn distinct_degree_factor_degrees(f: &Polynomial) -> Result<Vec<usize>> {
    let field = *f.field();
    if f.is_zero() {
        return Err(Error::domain("factor profile of the zero polynomial"));
    }
    let x = Polynomial::x(field);
    let f = f.monic();
    let mut h = f.clone();
    let mut degrees = Vec::new();
    if f.degree().unwrap_or(0) < 2 {
        return Ok(f.degree().filter(|&d| d > 0).into_iter().collect());
    }
    // x^(q^i) mod f; reducing modulo f rather than the shrinking h keeps
    // one Frobenius matrix valid throughout, since h divides f.
    let frob_rows = frobenius_rows(&f)?;
    let mut frob = x.clone();
    let mut i = 1usize;
    while h.degree().unwrap_or(0) >= 2 * i {
        frob = apply_rows(&frob_rows, &frob);
        let g = frob.sub(&x).gcd(&h);
        if !g.is_one() {
            let d = g.degree().expect("nonzero gcd");
            degrees.extend(std::iter::repeat(i).take(d / i));
            loop {
                let common = h.gcd(&g);
                if common.is_one() {
                    break;
                }
                h = h.div_exact(&common)?;
            }
        }
        i += 1;
    }
    // What remains has every factor of degree > deg(h)/2, hence is a
    // single irreducible (or a unit).
    if let Some(d) = h.degree() {
        if d > 0 {
            degrees.push(d);
        }
    }
    Ok(degrees)
}

/// Row `j` holds the coefficients of `x^(j q) mod f`, so that `g -> g^q`
/// modulo `f` is a vector-matrix product.
fn frobenius_rows(f: &Polynomial) -> Result<Vec<Vec<i64>>> {
    let field = *f.field();
    let d = f.degree().expect("nonzero modulus");
    let xq = Polynomial::x(field).pow_mod(field.modulus(), f)?;
    let mut rows = Vec::with_capacity(d);
    let mut cur = Polynomial::one(field);
    for _ in 0..d {
        let mut c = cur.coeffs().to_vec();
        c.resize(d, 0);
        rows.push(c);
        cur = cur.mul_mod(&xq, f)?;
    }
    Ok(rows)
}

fn apply_rows(rows: &[Vec<i64>], g: &Polynomial) -> Polynomial {
    let field = *g.field();
    let mut acc = vec![0i64; rows.len()];
    for (&c, row) in g.coeffs().iter().zip(rows) {
        if c == 0 {
            continue;
        }
        for (a, &r) in acc.iter_mut().zip(row) {
            *a = field.mul_add(*a, c, r);
        }
    }
    Polynomial::new(field, acc)
}

/// `f` is irreducible exactly when its profile is the single degree `deg f`.
pub fn is_irreducible(f: &Polynomial) -> Result<bool> {
    let Some(d) = f.degree() else {
        return Err(Error::domain("irreducibility of the zero polynomial"));
    };
    if d == 0 {
        return Ok(false);
    }
    Ok(distinct_degree_factor_degrees(f)? == vec![d])
}

/// Exact `Phi_{q,k}(f)` with `q` the order of `f`'s coefficient field.
pub fn totient_phi(f: &Polynomial, k: u32) -> Result<BigRational> {
    let q = BigUint::from(f.field().modulus());
    let degrees = distinct_degree_factor_degrees(f)?;
    let mut acc = BigRational::one();
    for d in degrees {
        let denom: BigUint = Pow::pow(&q, k as u64 * d as u64);
        let numer = &denom - BigUint::one();
        acc *= BigRational::new(numer.into(), denom.into());
    }
    Ok(acc)
}
