use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted modulus (exclusive): two canonical elements multiply
/// exactly in a 128-bit intermediate and sums of two fit in an `i64`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Canonical range used to store elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// `[0, p-1]`
    Classic,
    /// `[(1-p)/2, (p-1)/2]`, odd `p` only.
    Centered,
}

/// A word-size prime field GF(p).
///
/// Elements are plain `i64` values held in the canonical range of the
/// context's [`Representation`]; the context does the arithmetic. It is
/// `Copy` and immutable, so it can be freely shared across threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
    rep: Representation,
}

impl PrimeField {
    pub fn new(p: u64, rep: Representation) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::domain(format!("modulus {p} exceeds 2^62")));
        }
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if rep == Representation::Centered && p == 2 {
            return Err(Error::UnsupportedRepresentation(
                "centered representation needs an odd prime".into(),
            ));
        }
        Ok(PrimeField { p, rep })
    }

    pub fn classic(p: u64) -> Result<Self> {
        Self::new(p, Representation::Classic)
    }

    pub fn centered(p: u64) -> Result<Self> {
        Self::new(p, Representation::Centered)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn rep(&self) -> Representation {
        self.rep
    }

    /// Same modulus, other storage convention.
    pub fn with_rep(&self, rep: Representation) -> Result<Self> {
        Self::new(self.p, rep)
    }

    #[inline]
    fn half(&self) -> i64 {
        ((self.p - 1) / 2) as i64
    }

    #[inline]
    pub fn zero(&self) -> i64 {
        0
    }

    #[inline]
    pub fn one(&self) -> i64 {
        // p = 2 is classic-only, so 1 is canonical in both modes.
        1
    }

    #[inline]
    pub fn is_canonical(&self, a: i64) -> bool {
        match self.rep {
            Representation::Classic => a >= 0 && (a as u64) < self.p,
            Representation::Centered => a >= -self.half() && a <= self.half(),
        }
    }

    /// Representative in `[0, p-1]`.
    #[inline]
    pub fn to_classic(&self, a: i64) -> u64 {
        if a < 0 {
            (a + self.p as i64) as u64
        } else {
            a as u64
        }
    }

    /// Canonical element from a value already in `[0, p-1]`.
    #[inline]
    pub fn from_classic(&self, x: u64) -> i64 {
        debug_assert!(x < self.p);
        match self.rep {
            Representation::Classic => x as i64,
            Representation::Centered => {
                let x = x as i64;
                if x > self.half() {
                    x - self.p as i64
                } else {
                    x
                }
            }
        }
    }

    #[inline]
    pub fn from_u64(&self, x: u64) -> i64 {
        self.from_classic(x % self.p)
    }

    #[inline]
    pub fn from_i64(&self, x: i64) -> i64 {
        self.from_classic(x.rem_euclid(self.p as i64) as u64)
    }

    #[inline]
    pub fn from_i128(&self, x: i128) -> i64 {
        self.from_classic(x.rem_euclid(self.p as i128) as u64)
    }

    /// Re-express an element of `other` (same modulus) in this context.
    #[inline]
    pub fn convert_from(&self, other: &PrimeField, a: i64) -> i64 {
        debug_assert_eq!(self.p, other.p);
        self.from_classic(other.to_classic(a))
    }

    #[inline]
    pub fn is_zero(&self, a: i64) -> bool {
        a == 0
    }

    #[inline]
    pub fn add(&self, a: i64, b: i64) -> i64 {
        let p = self.p as i64;
        match self.rep {
            Representation::Classic => {
                let s = a + b;
                if s >= p {
                    s - p
                } else {
                    s
                }
            }
            Representation::Centered => {
                let s = a + b;
                let h = self.half();
                if s > h {
                    s - p
                } else if s < -h {
                    s + p
                } else {
                    s
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: i64) -> i64 {
        match self.rep {
            Representation::Classic => {
                if a == 0 {
                    0
                } else {
                    self.p as i64 - a
                }
            }
            Representation::Centered => -a,
        }
    }

    #[inline]
    pub fn sub(&self, a: i64, b: i64) -> i64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: i64, b: i64) -> i64 {
        let (x, y) = (self.to_classic(a), self.to_classic(b));
        let r = if self.p <= u32::MAX as u64 {
            (x * y) % self.p
        } else {
            ((x as u128 * y as u128) % self.p as u128) as u64
        };
        self.from_classic(r)
    }

    /// `acc + a*b`
    #[inline]
    pub fn mul_add(&self, acc: i64, a: i64, b: i64) -> i64 {
        let (x, y, z) = (self.to_classic(a), self.to_classic(b), self.to_classic(acc));
        let r = if self.p <= u32::MAX as u64 {
            (x * y % self.p + z) % self.p
        } else {
            ((x as u128 * y as u128 + z as u128) % self.p as u128) as u64
        };
        self.from_classic(r)
    }

    pub fn inv(&self, a: i64) -> Result<i64> {
        let x = self.to_classic(a);
        if x == 0 {
            return Err(Error::domain("inversion of zero"));
        }
        // Extended Euclid on (p, x).
        let (mut r0, mut r1) = (self.p as i128, x as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.from_i128(t0))
    }

    pub fn div(&self, a: i64, b: i64) -> Result<i64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: i64, mut e: u64) -> i64 {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Dot product of two equal-length slices.
    pub fn dot(&self, u: &[i64], v: &[i64]) -> i64 {
        debug_assert_eq!(u.len(), v.len());
        // 128-bit accumulation of classic products, reduced every 8 terms.
        let p = self.p as u128;
        let mut acc: u128 = 0;
        for (chunk_u, chunk_v) in u.chunks(8).zip(v.chunks(8)) {
            for (&a, &b) in chunk_u.iter().zip(chunk_v) {
                acc += self.to_classic(a) as u128 * self.to_classic(b) as u128;
            }
            acc %= p;
        }
        self.from_classic(acc as u64)
    }
}

impl std::fmt::Display for PrimeField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Miller-Rabin with the first twelve primes as witnesses, which is
/// deterministic for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factors of `n` (distinct, ascending) by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}
