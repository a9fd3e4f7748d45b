use num_bigint::BigUint;
use num_traits::{One, Pow};
use rayon::prelude::*;

use crate::dense_mm::classic::check_dims;
use crate::dense_mm::fgemm::{lift_centered, reduced_kernel};
use crate::dense_mm::{MulConfig, OpCounter, ReductionMode};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::DenseMatrix;

/// `((1 + 3^l) / 2)^2 * floor(k / 2^l) * (p - 1)^2`: the largest magnitude
/// of any intermediate value of `l` Strassen-Winograd levels on entries in
/// `{0..p-1}`. For `l = 0` this is the classical `k (p-1)^2`.
pub fn strassen_bound(p: u64, k: u64, l: u32) -> BigUint {
    let three_l: BigUint = Pow::pow(BigUint::from(3u32), l);
    let half = (three_l + BigUint::one()) >> 1u32;
    let blocks = BigUint::from(k >> l.min(63));
    let pm1 = BigUint::from(p - 1);
    &half * &half * blocks * &pm1 * &pm1
}

/// Largest `l` (with `2^l <= k`) such that `strassen_bound(p, k, l)` stays
/// below `2^(beta+1)`; 0 when even one level does not fit.
pub fn max_strassen_levels(p: u64, k: u64, beta: u32) -> u32 {
    let cap = BigUint::one() << (beta + 1);
    let mut l = 0u32;
    while l < 63 && (1u64 << (l + 1)) <= k && strassen_bound(p, k, l + 1) < cap {
        l += 1;
    }
    l
}

/// Levels the recursion actually performs on an `m x k` by `k x n`
/// product: halve while every dimension is at least the threshold.
pub fn strassen_levels_for(m: usize, k: usize, n: usize, threshold: usize, max_levels: Option<u32>) -> u32 {
    let cut = threshold.max(2);
    let (mut m, mut k, mut n) = (m, k, n);
    let mut l = 0;
    while max_levels.is_none_or(|cap| l < cap) && m.min(k).min(n) >= cut {
        m /= 2;
        k /= 2;
        n /= 2;
        l += 1;
    }
    l
}

#[derive(Clone)]
struct Mat {
    r: usize,
    c: usize,
    d: Vec<i64>,
}

impl Mat {
    fn block(&self, r0: usize, c0: usize, r: usize, c: usize) -> Mat {
        let mut d = Vec::with_capacity(r * c);
        for i in r0..r0 + r {
            d.extend_from_slice(&self.d[i * self.c + c0..i * self.c + c0 + c]);
        }
        Mat { r, c, d }
    }

    fn put(&mut self, r0: usize, c0: usize, b: &Mat) {
        for i in 0..b.r {
            let dst = (r0 + i) * self.c + c0;
            self.d[dst..dst + b.c].copy_from_slice(&b.d[i * b.c..(i + 1) * b.c]);
        }
    }
}

/// Arithmetic of one run: exact integers (delayed) or a field (eager).
struct Ctx<'a> {
    field: Option<PrimeField>,
    threshold: usize,
    beta: u32,
    track: bool,
    counter: Option<&'a OpCounter>,
}

impl Ctx<'_> {
    fn note(&self, x: &Mat) {
        if let (true, Some(c)) = (self.track, self.counter) {
            c.magnitude(x.d.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0));
        }
    }

    fn combine(&self, x: &Mat, y: &Mat, sub: bool) -> Mat {
        let d: Vec<i64> = match self.field {
            Some(f) if sub => x.d.iter().zip(&y.d).map(|(&a, &b)| f.sub(a, b)).collect(),
            Some(f) => x.d.iter().zip(&y.d).map(|(&a, &b)| f.add(a, b)).collect(),
            None if sub => x.d.iter().zip(&y.d).map(|(&a, &b)| a - b).collect(),
            None => x.d.iter().zip(&y.d).map(|(&a, &b)| a + b).collect(),
        };
        if let Some(c) = self.counter {
            c.ops(0, d.len() as u64);
        }
        let out = Mat { r: x.r, c: x.c, d };
        self.note(&out);
        out
    }

    fn add(&self, x: &Mat, y: &Mat) -> Mat {
        self.combine(x, y, false)
    }

    fn sub(&self, x: &Mat, y: &Mat) -> Mat {
        self.combine(x, y, true)
    }

    /// `acc + x * y` on scalars.
    #[inline]
    fn fma(&self, acc: i64, x: i64, y: i64) -> i64 {
        match self.field {
            Some(f) => f.mul_add(acc, x, y),
            None => acc + x * y,
        }
    }

    fn base(&self, a: &Mat, b: &Mat) -> Mat {
        let (m, k, n) = (a.r, a.c, b.c);
        if let Some(c) = self.counter {
            c.base_product();
        }
        let d = match self.field {
            Some(f) => reduced_kernel(&a.d, &b.d, (m, k, n), &f, self.beta, self.counter),
            None => {
                let mut out = vec![0i64; m * n];
                if n > 0 {
                    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                        for (l, &x) in a.d[i * k..(i + 1) * k].iter().enumerate() {
                            if x == 0 {
                                continue;
                            }
                            for (o, &y) in row.iter_mut().zip(&b.d[l * n..(l + 1) * n]) {
                                *o += x * y;
                            }
                        }
                    });
                }
                if let Some(c) = self.counter {
                    c.mul_adds((m * k * n) as u64);
                }
                out
            }
        };
        let out = Mat { r: m, c: n, d };
        self.note(&out);
        out
    }

    fn mul(&self, a: &Mat, b: &Mat, levels: u32) -> Mat {
        let (m, k, n) = (a.r, a.c, b.c);
        if levels == 0 || m.min(k).min(n) < self.threshold.max(2) {
            return self.base(a, b);
        }
        let (m2, k2, n2) = (m / 2, k / 2, n / 2);
        let a11 = a.block(0, 0, m2, k2);
        let a12 = a.block(0, k2, m2, k2);
        let a21 = a.block(m2, 0, m2, k2);
        let a22 = a.block(m2, k2, m2, k2);
        let b11 = b.block(0, 0, k2, n2);
        let b12 = b.block(0, n2, k2, n2);
        let b21 = b.block(k2, 0, k2, n2);
        let b22 = b.block(k2, n2, k2, n2);

        let s1 = self.add(&a21, &a22);
        let t1 = self.sub(&b12, &b11);
        let s2 = self.sub(&s1, &a11);
        let t2 = self.sub(&b22, &t1);
        let s3 = self.sub(&a11, &a21);
        let t3 = self.sub(&b22, &b12);
        let s4 = self.sub(&a12, &s2);
        let t4 = self.sub(&t2, &b21);

        let l = levels - 1;
        let ((p1, p2), ((p3, p4), (p5, (p6, p7)))) = rayon::join(
            || rayon::join(|| self.mul(&a11, &b11, l), || self.mul(&a12, &b21, l)),
            || {
                rayon::join(
                    || rayon::join(|| self.mul(&s4, &b22, l), || self.mul(&a22, &t4, l)),
                    || {
                        rayon::join(
                            || self.mul(&s1, &t1, l),
                            || rayon::join(|| self.mul(&s2, &t2, l), || self.mul(&s3, &t3, l)),
                        )
                    },
                )
            },
        );

        let c11 = self.add(&p1, &p2);
        let u2 = self.add(&p1, &p6);
        let u3 = self.add(&u2, &p7);
        let u4 = self.add(&u2, &p5);
        let c12 = self.add(&u4, &p3);
        let c21 = self.sub(&u3, &p4);
        let c22 = self.add(&u3, &p5);

        let mut c = Mat {
            r: m,
            c: n,
            d: vec![0; m * n],
        };
        c.put(0, 0, &c11);
        c.put(0, n2, &c12);
        c.put(m2, 0, &c21);
        c.put(m2, n2, &c22);
        self.peel(a, b, &mut c, (2 * m2, 2 * k2, 2 * n2));
        c
    }

    /// Fix-ups for odd dimensions around the even core `(me, ke, ne)`.
    fn peel(&self, a: &Mat, b: &Mat, c: &mut Mat, (me, ke, ne): (usize, usize, usize)) {
        let (m, k, n) = (a.r, a.c, b.c);
        let mut ops = 0u64;
        if ke < k {
            // Rank-one update with the last column of A and last row of B.
            for i in 0..me {
                let x = a.d[i * k + ke];
                for j in 0..ne {
                    let idx = i * n + j;
                    c.d[idx] = self.fma(c.d[idx], x, b.d[ke * n + j]);
                }
            }
            ops += (me * ne) as u64;
        }
        if ne < n {
            for i in 0..m {
                let mut s = 0;
                for l in 0..k {
                    s = self.fma(s, a.d[i * k + l], b.d[l * n + ne]);
                }
                c.d[i * n + ne] = s;
            }
            ops += (m * k) as u64;
        }
        if me < m {
            for j in 0..ne {
                let mut s = 0;
                for l in 0..k {
                    s = self.fma(s, a.d[me * k + l], b.d[l * n + j]);
                }
                c.d[me * n + j] = s;
            }
            ops += (ne * k) as u64;
        }
        if ops > 0 {
            if let Some(ctr) = self.counter {
                ctr.mul_adds(ops);
            }
            self.note(c);
        }
    }
}

/// Reduction strategy and level count chosen for one product.
enum Plan {
    Delayed(u32),
    Eager(u32),
}

fn plan(a: &DenseMatrix, b: &DenseMatrix, cfg: &MulConfig) -> Result<Plan> {
    cfg.validate()?;
    check_dims(a, b)?;
    let p = a.field().modulus();
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let l = strassen_levels_for(m, k, n, cfg.strassen_threshold, cfg.max_levels);
    // Accumulators are i64: the bound must stay below 2^63.
    let beta = cfg.accumulator_bits.min(62);
    let fits = strassen_bound(p, k as u64, l) < (BigUint::one() << (beta + 1));
    match cfg.mode {
        ReductionMode::Delayed if !fits => Err(Error::config(format!(
            "{l} Strassen levels on inner dimension {k} over GF({p}) exceed the \
             accumulator: bound {} >= 2^{}; at most {} levels fit",
            strassen_bound(p, k as u64, l),
            beta + 1,
            max_strassen_levels(p, k as u64, beta)
        ))),
        ReductionMode::Delayed | ReductionMode::Auto if fits => Ok(Plan::Delayed(l)),
        _ => Ok(Plan::Eager(l)),
    }
}

fn classic_ints(a: &DenseMatrix) -> Mat {
    Mat {
        r: a.rows(),
        c: a.cols(),
        d: a.classic_data().into_iter().map(|x| x as i64).collect(),
    }
}

fn run(
    a: &DenseMatrix,
    b: &DenseMatrix,
    cfg: &MulConfig,
    counter: Option<&OpCounter>,
) -> Result<(Option<Mat>, DenseMatrix)> {
    let f = *a.field();
    match plan(a, b, cfg)? {
        Plan::Delayed(l) => {
            let ctx = Ctx {
                field: None,
                threshold: cfg.strassen_threshold,
                beta: cfg.accumulator_bits,
                track: cfg.track_magnitude,
                counter,
            };
            let z = ctx.mul(&classic_ints(a), &classic_ints(b), l);
            let data = z.d.iter().map(|&x| f.from_i64(x)).collect();
            if let Some(c) = counter {
                c.reductions(z.d.len() as u64);
            }
            Ok((Some(z), DenseMatrix::from_canonical(f, a.rows(), b.cols(), data)))
        }
        Plan::Eager(l) => {
            let work = if f.modulus() == 2 {
                f
            } else {
                PrimeField::centered(f.modulus())?
            };
            let ctx = Ctx {
                field: Some(work),
                threshold: cfg.strassen_threshold,
                beta: cfg.accumulator_bits,
                track: false,
                counter,
            };
            let la = Mat {
                r: a.rows(),
                c: a.cols(),
                d: lift_centered(a),
            };
            let lb = Mat {
                r: b.rows(),
                c: b.cols(),
                d: lift_centered(b),
            };
            let z = ctx.mul(&la, &lb, l);
            let data = z.d.iter().map(|&x| f.convert_from(&work, x)).collect();
            Ok((None, DenseMatrix::from_canonical(f, a.rows(), b.cols(), data)))
        }
    }
}

/// Strassen-Winograd product.
///
/// In delayed mode the recursion runs over the integers on classic
/// representatives and reduces once at the end, which is exact while
/// [`strassen_bound`] stays below `2^(beta+1)` (and `2^63`). In eager mode
/// block additions are reduced and the base case is the delayed-reduction
/// kernel.
pub fn gemm_strassen(
    a: &DenseMatrix,
    b: &DenseMatrix,
    cfg: &MulConfig,
    counter: Option<&OpCounter>,
) -> Result<DenseMatrix> {
    Ok(run(a, b, cfg, counter)?.1)
}

/// `A B + beta C`.
pub fn gemm_strassen_addmul(
    a: &DenseMatrix,
    b: &DenseMatrix,
    beta: i64,
    c: &DenseMatrix,
    cfg: &MulConfig,
    counter: Option<&OpCounter>,
) -> Result<DenseMatrix> {
    if c.shape() != (a.rows(), b.cols()) || c.field() != a.field() {
        return Err(Error::dims("accumulator shape does not match the product"));
    }
    let f = *a.field();
    let beta = f.from_i64(beta);
    let (z, prod) = run(a, b, cfg, counter)?;
    let n = prod.data().len() as u64;
    if let Some(ctr) = counter {
        ctr.mul_adds(n);
    }
    match z {
        Some(z) => {
            // Stay over the integers until the single final reduction.
            let bc = f.to_classic(beta) as i128;
            let mut big = 0u64;
            let data =
                z.d.iter()
                    .zip(c.data())
                    .map(|(&x, &y)| {
                        let s = x as i128 + bc * f.to_classic(y) as i128;
                        big = big.max(s.unsigned_abs() as u64);
                        f.from_i128(s)
                    })
                    .collect();
            if let (true, Some(ctr)) = (cfg.track_magnitude, counter) {
                ctr.magnitude(big);
            }
            Ok(DenseMatrix::from_canonical(f, prod.rows(), prod.cols(), data))
        }
        None => {
            let data = prod
                .data()
                .iter()
                .zip(c.data())
                .map(|(&x, &y)| f.mul_add(x, beta, y))
                .collect();
            Ok(DenseMatrix::from_canonical(f, prod.rows(), prod.cols(), data))
        }
    }
}
