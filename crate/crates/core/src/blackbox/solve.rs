use serde::Serialize;

use crate::blackbox::precond::Symmetrized;
use crate::blackbox::wiedemann::{apply_poly, require_square, wiedemann_minpoly};
use crate::blackbox::{BlackboxOptions, ProbabilityReport};
use crate::error::{Error, Result};
use crate::field::Polynomial;
use crate::matrix::Blackbox;
use crate::rng::SeededRng;

/// Seeds tried by the solvers before reporting failure.
pub const SOLVE_MAX_ATTEMPTS: usize = 5;

/// Why an attempt produced nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// `t_i = 0` with `w_i != 0`.
    Breakdown,
    /// A candidate did not satisfy the system.
    CheckFailed,
    /// `Pi_{A,b}(0) = 0`.
    ZeroConstantTerm,
    /// `x` does not divide `Pi_{A,b}` for the drawn `b`.
    NoKernelComponent,
}

/// Outcome of a Las-Vegas routine: `value` is present only once verified.
#[derive(Clone, Debug, PartialEq)]
pub struct LasVegas<T> {
    pub value: Option<T>,
    pub attempts: usize,
    pub failures: Vec<FailureKind>,
    pub report: ProbabilityReport,
}

impl<T> LasVegas<T> {
    pub fn is_success(&self) -> bool {
        self.value.is_some()
    }
}

fn check_rhs<B: Blackbox + ?Sized>(a: &B, b: &[i64]) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::dims(format!(
            "right-hand side has {} entries, operator {} rows",
            b.len(),
            a.rows()
        )));
    }
    Ok(())
}

fn canonical(a: &(impl Blackbox + ?Sized), v: &[i64]) -> Vec<i64> {
    let f = *a.field();
    v.iter().map(|&x| f.from_i64(x)).collect()
}

fn ek_report<B: Blackbox + ?Sized>(a: &B, name: &str, attempts: usize, ok: bool) -> ProbabilityReport {
    let big = a.rows().max(a.cols()) as u128;
    ProbabilityReport::linear(
        name,
        "1 - (11n^2 - n)/(2|S|)",
        a.field().modulus(),
        11 * big * big - big,
        2,
        attempts as u64,
        Some(ok as u64),
    )
}

fn lanczos_attempt<B: Blackbox + ?Sized>(
    a: &B,
    b: &[i64],
    rng: &mut SeededRng,
) -> std::result::Result<Vec<i64>, FailureKind> {
    let f = *a.field();
    let n = a.cols();
    let at = Symmetrized::random(a, rng);
    let v = rng.vector(&f, n);
    let d1 = at.d1().to_vec();
    let d2b: Vec<i64> = at.d2().iter().zip(b).map(|(&d, &x)| f.mul(d, x)).collect();
    let atv = at.apply(&v);
    let bt: Vec<i64> = a
        .apply_transpose(&d2b)
        .iter()
        .zip(&d1)
        .zip(&atv)
        .map(|((&y, &d), &z)| f.mul_add(z, d, y))
        .collect();

    let is_zero = |w: &[i64]| w.iter().all(|&x| x == 0);
    let axpy = |x: &mut [i64], c: i64, y: &[i64]| {
        for (xi, &yi) in x.iter_mut().zip(y) {
            *xi = f.mul_add(*xi, c, yi);
        }
    };
    let mut x = vec![f.zero(); n];
    let mut w_prev = vec![f.zero(); n];
    let mut w = bt.clone();
    if !is_zero(&w) {
        let mut v_cur = at.apply(&w);
        let mut t = f.dot(&v_cur, &w);
        if t == 0 {
            return Err(FailureKind::Breakdown);
        }
        axpy(&mut x, f.div(f.dot(&bt, &w), t).expect("t != 0"), &w);
        let mut v_prev = vec![f.zero(); n];
        let mut t_prev = f.one();
        for _ in 0..=n {
            let alpha = f.div(f.dot(&v_cur, &v_cur), t).expect("t != 0");
            let beta = f.div(f.dot(&v_cur, &v_prev), t_prev).expect("t_prev != 0");
            let mut w_next = v_cur.clone();
            axpy(&mut w_next, f.neg(alpha), &w);
            axpy(&mut w_next, f.neg(beta), &w_prev);
            if is_zero(&w_next) {
                break;
            }
            let v_next = at.apply(&w_next);
            let t_next = f.dot(&w_next, &v_next);
            if t_next == 0 {
                return Err(FailureKind::Breakdown);
            }
            axpy(&mut x, f.div(f.dot(&bt, &w_next), t_next).expect("t != 0"), &w_next);
            w_prev = std::mem::replace(&mut w, w_next);
            v_prev = std::mem::replace(&mut v_cur, v_next);
            t_prev = std::mem::replace(&mut t, t_next);
        }
    }
    let sol: Vec<i64> = x
        .iter()
        .zip(&v)
        .zip(&d1)
        .map(|((&xi, &vi), &d)| f.mul(d, f.sub(xi, vi)))
        .collect();
    if a.apply(&sol) == b {
        Ok(sol)
    } else {
        Err(FailureKind::CheckFailed)
    }
}

/// Solve `A x = b` with symmetrized Lanczos over a field of odd
/// characteristic. Never returns an unchecked vector.
pub fn lanczos_solve<B: Blackbox + ?Sized>(a: &B, b: &[i64], seed: u64) -> Result<LasVegas<Vec<i64>>> {
    check_rhs(a, b)?;
    if a.field().modulus() == 2 {
        return Err(Error::domain("Lanczos needs odd characteristic"));
    }
    let b = canonical(a, b);
    let mut rng = SeededRng::new(seed);
    let mut failures = Vec::new();
    for attempt in 1..=SOLVE_MAX_ATTEMPTS {
        match lanczos_attempt(a, &b, &mut rng.split()) {
            Ok(x) => {
                return Ok(LasVegas {
                    value: Some(x),
                    attempts: attempt,
                    failures,
                    report: ek_report(a, "lanczos_solve", attempt, true),
                })
            }
            Err(k) => failures.push(k),
        }
    }
    Ok(LasVegas {
        value: None,
        attempts: SOLVE_MAX_ATTEMPTS,
        failures,
        report: ek_report(a, "lanczos_solve", SOLVE_MAX_ATTEMPTS, false),
    })
}

fn projection_report<B: Blackbox + ?Sized>(a: &B, name: &str, attempts: usize, ok: bool) -> ProbabilityReport {
    let n = a.rows() as u64;
    let f = a.field();
    // Each attempt refines Pi_{A,b} with one more projection.
    let bound = if attempts == 0 {
        num_rational::BigRational::from_integer(0.into())
    } else {
        num_rational::BigRational::from_integer(1.into())
            - num_rational::BigRational::new((n as i64).into(), (f.modulus() as i64).into())
    };
    ProbabilityReport::new(
        name,
        "1 - n/q per projection",
        bound,
        f.modulus(),
        attempts as u64,
        Some(ok as u64),
    )
}

/// `x = -c^-1 g(A) b` from `Pi_{A,b} = c + x g(x)`, for nonsingular `A`.
pub fn wiedemann_solve<B: Blackbox + ?Sized>(a: &B, b: &[i64], seed: u64) -> Result<LasVegas<Vec<i64>>> {
    let n = require_square(a)?;
    check_rhs(a, b)?;
    let f = *a.field();
    let b = canonical(a, b);
    let mut rng = SeededRng::new(seed);
    let mut failures = Vec::new();
    let mut pi = Polynomial::one(f);
    for attempt in 1..=SOLVE_MAX_ATTEMPTS {
        let u = rng.vector(&f, n);
        pi = pi.lcm(&wiedemann_minpoly(a, &u, &b)?);
        let c = pi.coeff(0);
        if c == 0 {
            failures.push(FailureKind::ZeroConstantTerm);
            continue;
        }
        let g = Polynomial::new(f, pi.coeffs()[1..].to_vec());
        let scale = f.neg(f.inv(c)?);
        let x: Vec<i64> = apply_poly(a, &g, &b).into_iter().map(|y| f.mul(scale, y)).collect();
        if a.apply(&x) == b {
            return Ok(LasVegas {
                value: Some(x),
                attempts: attempt,
                failures,
                report: projection_report(a, "wiedemann_solve", attempt, true),
            });
        }
        failures.push(FailureKind::CheckFailed);
    }
    Ok(LasVegas {
        value: None,
        attempts: SOLVE_MAX_ATTEMPTS,
        failures,
        report: projection_report(a, "wiedemann_solve", SOLVE_MAX_ATTEMPTS, false),
    })
}

/// A nonzero `w` with `A w = 0`, from `Pi_{A,b} = x^r g(x)`: the last
/// nonzero vector of `g(A) b, A g(A) b, ...`.
pub fn nullspace_vector<B: Blackbox + ?Sized>(a: &B, seed: u64) -> Result<LasVegas<Vec<i64>>> {
    nullspace_vector_with(a, &BlackboxOptions::seeded(seed))
}

pub fn nullspace_vector_with<B: Blackbox + ?Sized>(a: &B, opts: &BlackboxOptions) -> Result<LasVegas<Vec<i64>>> {
    let n = require_square(a)?;
    let f = *a.field();
    let mut rng = SeededRng::new(opts.seed);
    let mut failures = Vec::new();
    let is_zero = |w: &[i64]| w.iter().all(|&x| x == 0);
    for attempt in 1..=SOLVE_MAX_ATTEMPTS {
        let b = rng.vector(&f, n);
        let mut pi = Polynomial::one(f);
        for _ in 0..opts.draws.max(1) {
            let u = rng.vector(&f, n);
            pi = pi.lcm(&wiedemann_minpoly(a, &u, &b)?);
        }
        let r = pi.x_valuation();
        if r == 0 || n == 0 {
            failures.push(FailureKind::NoKernelComponent);
            continue;
        }
        let g = Polynomial::new(f, pi.coeffs()[r..].to_vec());
        let mut w = apply_poly(a, &g, &b);
        let mut found = None;
        for _ in 0..=n {
            if is_zero(&w) {
                break;
            }
            let next = a.apply(&w);
            if is_zero(&next) {
                found = Some(w);
                break;
            }
            w = next;
        }
        match found {
            Some(w) => {
                return Ok(LasVegas {
                    value: Some(w),
                    attempts: attempt,
                    failures,
                    report: projection_report(a, "nullspace_vector", attempt, true),
                })
            }
            None => failures.push(FailureKind::CheckFailed),
        }
    }
    Ok(LasVegas {
        value: None,
        attempts: SOLVE_MAX_ATTEMPTS,
        failures,
        report: projection_report(a, "nullspace_vector", SOLVE_MAX_ATTEMPTS, false),
    })
}
