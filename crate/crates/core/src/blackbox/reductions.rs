use crate::blackbox::precond::{BidiagonalLeft, RankUpdate, Symmetrized};
use crate::blackbox::wiedemann::{minpoly_montecarlo_with, require_square};
use crate::blackbox::{BlackboxOptions, ProbabilityReport};
use crate::error::{Error, Result};
use crate::field::Polynomial;
use crate::matrix::Blackbox;
use crate::rng::SeededRng;

/// Fresh bidiagonal preconditioners tried before giving up on a certificate.
pub const DET_MAX_DRAWS: usize = 10;

fn inner_opts(opts: &BlackboxOptions, rng: &mut SeededRng) -> BlackboxOptions {
    BlackboxOptions {
        seed: rng.next_u64(),
        draws: opts.draws.max(1),
        early_termination: opts.early_termination,
    }
}

pub fn blackbox_rank<B: Blackbox + ?Sized>(a: &B, seed: u64) -> Result<(usize, ProbabilityReport)> {
    blackbox_rank_with(a, &BlackboxOptions::seeded(seed))
}

/// Rank from the minimal polynomial of `D1 A^T D2 A D1`: its degree, less
/// one when `x` divides it.
pub fn blackbox_rank_with<B: Blackbox + ?Sized>(a: &B, opts: &BlackboxOptions) -> Result<(usize, ProbabilityReport)> {
    let (m, n) = (a.rows(), a.cols());
    let f = *a.field();
    let big = m.max(n) as u128;
    let report = ProbabilityReport::linear(
        "blackbox_rank",
        "1 - (11n^2 - n)/(2|S|)",
        f.modulus(),
        11 * big * big - big,
        2,
        1,
        None,
    );
    if m == 0 || n == 0 {
        return Ok((0, report));
    }
    let mut rng = SeededRng::new(opts.seed);
    let pre = Symmetrized::random(a, &mut rng);
    let (mp, _) = minpoly_montecarlo_with(&pre, &inner_opts(opts, &mut rng))?;
    let d = mp.degree().unwrap_or(0);
    let r = if mp.x_valuation() > 0 { d - 1 } else { d };
    Ok((r.min(m.min(n)), report))
}

/// Determinant with its certification status.
#[derive(Clone, Debug, PartialEq)]
pub struct DetOutcome {
    pub det: i64,
    /// `true` when the last minimal polynomial had degree `n` or was
    /// divisible by `x`.
    pub certified: bool,
    pub draws: usize,
    pub report: ProbabilityReport,
}

pub fn blackbox_det<B: Blackbox + ?Sized>(a: &B, seed: u64) -> Result<DetOutcome> {
    blackbox_det_with(a, &BlackboxOptions::seeded(seed))
}

/// Determinant from the minimal polynomial of `U A`, `U` unit upper
/// bidiagonal, redrawing `U` until the answer certifies itself.
pub fn blackbox_det_with<B: Blackbox + ?Sized>(a: &B, opts: &BlackboxOptions) -> Result<DetOutcome> {
    let n = require_square(a)?;
    let f = *a.field();
    let nn = n as u128;
    let report = |draws: usize, ok: bool| {
        ProbabilityReport::linear(
            "blackbox_det",
            "1 - (n^2 - n)/(2|S|)",
            f.modulus(),
            nn * nn - nn,
            2,
            draws as u64,
            Some(ok as u64),
        )
    };
    if n == 0 {
        return Ok(DetOutcome {
            det: f.one(),
            certified: true,
            draws: 0,
            report: report(0, true),
        });
    }
    let mut rng = SeededRng::new(opts.seed);
    let mut det = f.zero();
    for draw in 1..=DET_MAX_DRAWS {
        let ua = BidiagonalLeft::random(a, &mut rng);
        let (mp, _) = minpoly_montecarlo_with(&ua, &inner_opts(opts, &mut rng))?;
        let c0 = mp.coeff(0);
        det = if n % 2 == 0 { c0 } else { f.neg(c0) };
        let certified = if mp.degree() == Some(n) {
            true
        } else if mp.x_valuation() > 0 {
            det = f.zero();
            true
        } else {
            false
        };
        if certified {
            return Ok(DetOutcome {
                det,
                certified,
                draws: draw,
                report: report(draw, true),
            });
        }
    }
    Ok(DetOutcome {
        det,
        certified: false,
        draws: DET_MAX_DRAWS,
        report: report(DET_MAX_DRAWS, false),
    })
}

pub fn invariant_factor<B: Blackbox + ?Sized>(a: &B, k: usize, seed: u64) -> Result<(Polynomial, ProbabilityReport)> {
    invariant_factor_with(a, k, &BlackboxOptions::seeded(seed))
}

/// `s_{k+1}` as `gcd(Pi_A, Pi_{A + U V})` with a random rank-`k` update.
pub fn invariant_factor_with<B: Blackbox + ?Sized>(
    a: &B,
    k: usize,
    opts: &BlackboxOptions,
) -> Result<(Polynomial, ProbabilityReport)> {
    let n = require_square(a)?;
    if k == 0 || k >= n {
        return Err(Error::domain(format!(
            "invariant factor index needs 1 <= k < n, got k = {k}, n = {n}"
        )));
    }
    let f = *a.field();
    let mut rng = SeededRng::new(opts.seed);
    let (pa, _) = minpoly_montecarlo_with(a, &inner_opts(opts, &mut rng))?;
    let upd = RankUpdate::random(a, k, &mut rng)?;
    let (pb, _) = minpoly_montecarlo_with(&upd, &inner_opts(opts, &mut rng))?;
    let (nn, kk) = (n as u128, k as u128);
    let report = ProbabilityReport::linear(
        "invariant_factor",
        "1 - (nk + n + 1)/|S|",
        f.modulus(),
        nn * kk + nn + 1,
        1,
        1,
        None,
    );
    Ok((pa.gcd(&pb).monic(), report))
}
