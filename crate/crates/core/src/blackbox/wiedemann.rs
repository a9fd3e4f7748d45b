use num_rational::BigRational;
use num_traits::Zero;

use crate::blackbox::bm::{BerlekampMassey, ScalarSequence};
use crate::blackbox::{BlackboxOptions, ProbabilityReport};
use crate::error::{Error, Result};
use crate::field::{totient_phi, Polynomial};
use crate::matrix::Blackbox;
use crate::rng::SeededRng;

pub(crate) fn require_square<B: Blackbox + ?Sized>(a: &B) -> Result<usize> {
    if a.rows() != a.cols() {
        return Err(Error::dims(format!(
            "square operator required, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}

/// `S_i = u^T A^i b` for `i < 2n`, or fewer terms when early termination
/// is enabled and the generator has been stable for `2 delta` terms.
pub fn krylov_sequence<B: Blackbox + ?Sized>(
    a: &B,
    u: &[i64],
    b: &[i64],
    early_termination: Option<usize>,
) -> Result<ScalarSequence> {
    let n = require_square(a)?;
    if u.len() != n || b.len() != n {
        return Err(Error::dims("projection vectors must match the operator order"));
    }
    let f = *a.field();
    let mut bm = BerlekampMassey::new(f);
    let mut terms = Vec::with_capacity(2 * n);
    let mut w = b.to_vec();
    for i in 0..2 * n {
        if i > 0 {
            w = a.apply(&w);
        }
        let s = f.dot(u, &w);
        terms.push(s);
        bm.push(s);
        if let Some(delta) = early_termination {
            if bm.stable_terms() >= 2 * delta.max(1) {
                break;
            }
        }
    }
    Ok(ScalarSequence {
        field: f,
        terms,
        u: u.to_vec(),
        b: b.to_vec(),
        seed: None,
    })
}

/// `Pi_{u,A,b}`, a divisor of `Pi_{A,b}` and hence of `Pi_A`.
pub fn wiedemann_minpoly<B: Blackbox + ?Sized>(a: &B, u: &[i64], b: &[i64]) -> Result<Polynomial> {
    wiedemann_minpoly_with(a, u, b, None)
}

pub fn wiedemann_minpoly_with<B: Blackbox + ?Sized>(
    a: &B,
    u: &[i64],
    b: &[i64],
    early_termination: Option<usize>,
) -> Result<Polynomial> {
    let s = krylov_sequence(a, u, b, early_termination)?;
    Ok(crate::blackbox::bm::berlekamp_massey(&s))
}

/// `lcm` of `Pi_{u_j,A,b_j}` over `trials` random projections.
pub fn minpoly_montecarlo<B: Blackbox + ?Sized>(
    a: &B,
    trials: usize,
    seed: u64,
) -> Result<(Polynomial, ProbabilityReport)> {
    minpoly_montecarlo_with(a, &BlackboxOptions::seeded(seed).draws(trials))
}

pub fn minpoly_montecarlo_with<B: Blackbox + ?Sized>(
    a: &B,
    opts: &BlackboxOptions,
) -> Result<(Polynomial, ProbabilityReport)> {
    let n = require_square(a)?;
    let f = *a.field();
    let mut rng = SeededRng::new(opts.seed);
    let mut acc = Polynomial::one(f);
    let mut parts = Vec::with_capacity(opts.draws);
    for _ in 0..opts.draws {
        let u = rng.vector(&f, n);
        let b = rng.vector(&f, n);
        let g = wiedemann_minpoly_with(a, &u, &b, opts.early_termination)?;
        acc = acc.lcm(&g);
        parts.push(g);
    }
    let bound = if opts.draws == 0 {
        BigRational::zero()
    } else {
        totient_phi(&acc, opts.draws as u32)?
    };
    let hits = parts.iter().filter(|g| **g == acc).count() as u64;
    let report = ProbabilityReport::new(
        "minpoly",
        "Phi_{q,k}(f)",
        bound,
        f.modulus(),
        opts.draws as u64,
        Some(hits),
    );
    Ok((acc, report))
}

/// `g(A) v` by Horner's rule, `deg g` applications of `A`.
pub fn apply_poly<B: Blackbox + ?Sized>(a: &B, g: &Polynomial, v: &[i64]) -> Vec<i64> {
    let f = *a.field();
    let c = g.coeffs();
    let Some((&lead, rest)) = c.split_last() else {
        return vec![f.zero(); v.len()];
    };
    let mut acc: Vec<i64> = v.iter().map(|&x| f.mul(lead, x)).collect();
    for &ci in rest.iter().rev() {
        acc = a.apply(&acc);
        for (r, &x) in acc.iter_mut().zip(v) {
            *r = f.mul_add(*r, ci, x);
        }
    }
    acc
}
