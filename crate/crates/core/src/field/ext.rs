use crate::error::{Error, Result};
use crate::field::prime::prime_factors;
use crate::field::{is_irreducible, Polynomial, PrimeField};
use crate::rng::SeededRng;

/// Largest supported extension-field order.
pub const MAX_EXT_ORDER: u64 = 1 << 16;

/// An element of GF(p^k) stored as the exponent of the field generator.
/// Zero has the sentinel exponent `p^k - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem(u32);

impl ExtElem {
    pub fn exponent(self) -> u32 {
        self.0
    }
}

/// GF(p^k) with generator-power tables (Zech-style logarithms).
///
/// Polynomial codes pack coefficients base `p`: `c_0 + c_1 p + ...`.
#[derive(Clone, Debug)]
pub struct ExtField {
    base: PrimeField,
    k: u32,
    order: u32,
    modulus: Polynomial,
    /// `exp_table[i]` = code of `g^i`, for `i < order - 1`.
    exp_table: Vec<u32>,
    /// `log_table[code]` = exponent; `log_table[0]` is the zero sentinel.
    log_table: Vec<u32>,
}

impl ExtField {
    /// Build GF(p^k) with a modulus drawn from `seed`.
    pub fn new(p: u64, k: u32, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("extension degree must be at least 1"));
        }
        let base = PrimeField::classic(p)?;
        let order = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if order > MAX_EXT_ORDER as u128 {
            return Err(Error::config(format!("field order {p}^{k} exceeds the table cap 2^16")));
        }

        // Random monic candidates until one is irreducible.
        let mut rng = SeededRng::new(seed);
        let modulus = loop {
            let mut c: Vec<i64> = (0..k).map(|_| rng.element(&base)).collect();
            c.push(1);
            let cand = Polynomial::new(base, c);
            if is_irreducible(&cand)? {
                break cand;
            }
        };
        Self::with_modulus(modulus)
    }

    /// Build from a given monic irreducible modulus over GF(p).
    pub fn with_modulus(modulus: Polynomial) -> Result<Self> {
        let base = *modulus.field();
        if base.rep() != crate::field::Representation::Classic {
            return Err(Error::config("extension modulus must be over a classic field"));
        }
        let k = modulus
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::domain("extension modulus must have degree >= 1"))? as u32;
        if !modulus.is_monic() || !is_irreducible(&modulus)? {
            return Err(Error::domain("extension modulus must be monic irreducible"));
        }
        let p = base.modulus();
        let order = (p as u128).pow(k);
        if order > MAX_EXT_ORDER as u128 {
            return Err(Error::config("field order exceeds the table cap 2^16"));
        }
        let order = order as u32;
        let group = order as u64 - 1;
        let cofactors: Vec<u64> = prime_factors(group).into_iter().map(|l| group / l).collect();

        // Exhaustive generator search in code order.
        let one = Polynomial::one(base);
        let mut generator = None;
        for code in 1..order {
            let g = poly_from_code(base, k, code);
            let primitive = cofactors
                .iter()
                .all(|&e| g.pow_mod(e, &modulus).map(|v| v != one).unwrap_or(false));
            if primitive {
                generator = Some(g);
                break;
            }
        }
        let g = generator.ok_or_else(|| Error::domain("no generator found"))?;

        let mut exp_table = Vec::with_capacity(group as usize);
        let mut log_table = vec![group as u32; order as usize];
        let mut cur = one;
        for i in 0..group {
            let code = poly_to_code(&cur, p);
            exp_table.push(code);
            log_table[code as usize] = i as u32;
            cur = cur.mul_mod(&g, &modulus)?;
        }
        Ok(ExtField {
            base,
            k,
            order,
            modulus,
            exp_table,
            log_table,
        })
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn characteristic(&self) -> u64 {
        self.base.modulus()
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &Polynomial {
        &self.modulus
    }

    pub fn exp_table(&self) -> &[u32] {
        &self.exp_table
    }

    pub fn log_table(&self) -> &[u32] {
        &self.log_table
    }

    fn group_order(&self) -> u32 {
        self.order - 1
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem(self.group_order())
    }

    pub fn one(&self) -> ExtElem {
        ExtElem(0)
    }

    pub fn is_zero(&self, a: ExtElem) -> bool {
        a.0 == self.group_order()
    }

    /// `g^e`
    pub fn generator_power(&self, e: u64) -> ExtElem {
        ExtElem((e % self.group_order() as u64) as u32)
    }

    pub fn from_code(&self, code: u32) -> Result<ExtElem> {
        self.log_table
            .get(code as usize)
            .map(|&e| ExtElem(e))
            .ok_or_else(|| Error::domain(format!("code {code} outside GF({})", self.order)))
    }

    pub fn to_code(&self, a: ExtElem) -> u32 {
        if self.is_zero(a) {
            0
        } else {
            self.exp_table[a.0 as usize]
        }
    }

    /// Element from polynomial coefficients (low degree first, at most k).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<ExtElem> {
        if coeffs.len() > self.k as usize {
            return Err(Error::domain("too many coefficients for the extension degree"));
        }
        let p = self.characteristic();
        let code = coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c % p);
        self.from_code(code as u32)
    }

    /// The `k` polynomial coefficients of `a`, low degree first.
    pub fn to_coeffs(&self, a: ExtElem) -> Vec<u64> {
        let p = self.characteristic();
        let mut code = self.to_code(a) as u64;
        (0..self.k)
            .map(|_| {
                let c = code % p;
                code /= p;
                c
            })
            .collect()
    }

    pub fn mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        let s = a.0 as u64 + b.0 as u64;
        ExtElem((s % self.group_order() as u64) as u32)
    }

    pub fn inv(&self, a: ExtElem) -> Result<ExtElem> {
        if self.is_zero(a) {
            return Err(Error::domain("inversion of zero"));
        }
        let n = self.group_order();
        Ok(ExtElem((n - a.0) % n))
    }

    pub fn pow(&self, a: ExtElem, e: u64) -> ExtElem {
        if e == 0 {
            return self.one();
        }
        if self.is_zero(a) {
            return self.zero();
        }
        let n = self.group_order() as u128;
        ExtElem(((a.0 as u128 * e as u128) % n) as u32)
    }

    fn combine(&self, a: ExtElem, b: ExtElem, f: impl Fn(u64, u64) -> u64) -> ExtElem {
        let p = self.characteristic();
        let (mut x, mut y) = (self.to_code(a) as u64, self.to_code(b) as u64);
        let mut code = 0u64;
        let mut place = 1u64;
        for _ in 0..self.k {
            code += f(x % p, y % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        ExtElem(self.log_table[code as usize])
    }

    pub fn add(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        let p = self.characteristic();
        self.combine(a, b, |x, y| (x + y) % p)
    }

    pub fn sub(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        let p = self.characteristic();
        self.combine(a, b, |x, y| (x + p - y) % p)
    }

    pub fn neg(&self, a: ExtElem) -> ExtElem {
        self.sub(self.zero(), a)
    }

    /// Direct dot product through table arithmetic.
    pub fn dot(&self, u: &[ExtElem], v: &[ExtElem]) -> ExtElem {
        u.iter()
            .zip(v)
            .fold(self.zero(), |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Kronecker substitution: `sum c_i radix^i` with classic coefficients.
    pub fn kronecker_eval(&self, a: ExtElem, radix: u64) -> Result<u128> {
        let mut acc: u128 = 0;
        for &c in self.to_coeffs(a).iter().rev() {
            acc = acc
                .checked_mul(radix as u128)
                .and_then(|v| v.checked_add(c as u128))
                .ok_or_else(|| Error::config("Kronecker value overflows 128 bits"))?;
        }
        Ok(acc)
    }

    pub fn random(&self, rng: &mut SeededRng) -> ExtElem {
        ExtElem(rng.below(self.order as u64) as u32)
    }
}

fn poly_from_code(base: PrimeField, k: u32, mut code: u32) -> Polynomial {
    let p = base.modulus() as u32;
    let coeffs = (0..k)
        .map(|_| {
            let c = code % p;
            code /= p;
            c as i64
        })
        .collect();
    Polynomial::new(base, coeffs)
}

fn poly_to_code(poly: &Polynomial, p: u64) -> u32 {
    poly.classic_coeffs().iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
}
