use crate::field::{Polynomial, PrimeField};

/// A finite prefix `S_0, S_1, ...` of a scalar sequence, usually
/// `u^T A^i b`, together with how it was generated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarSequence {
    pub field: PrimeField,
    pub terms: Vec<i64>,
    pub u: Vec<i64>,
    pub b: Vec<i64>,
    pub seed: Option<u64>,
}

impl ScalarSequence {
    /// A bare sequence with no projection metadata.
    pub fn from_terms(field: PrimeField, terms: &[i64]) -> Self {
        ScalarSequence {
            field,
            terms: terms.iter().map(|&t| field.from_i64(t)).collect(),
            u: Vec::new(),
            b: Vec::new(),
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Incremental Berlekamp-Massey over a prime field.
///
/// Keeps the connection polynomial `C(z) = 1 + c_1 z + ... + c_L z^L`
/// with `S_k + c_1 S_{k-1} + ... + c_L S_{k-L} = 0` for every `L <= k`
/// seen so far.
#[derive(Clone, Debug)]
pub struct BerlekampMassey {
    field: PrimeField,
    seq: Vec<i64>,
    c: Vec<i64>,
    prev: Vec<i64>,
    len: usize,
    shift: usize,
    prev_disc: i64,
    stable: usize,
}

impl BerlekampMassey {
    pub fn new(field: PrimeField) -> Self {
        BerlekampMassey {
            field,
            seq: Vec::new(),
            c: vec![field.one()],
            prev: vec![field.one()],
            len: 0,
            shift: 1,
            prev_disc: field.one(),
            stable: 0,
        }
    }

    /// Feed the next term; returns the discrepancy it produced.
    pub fn push(&mut self, s: i64) -> i64 {
        let f = self.field;
        self.seq.push(f.from_i64(s));
        let k = self.seq.len() - 1;
        let mut d = self.seq[k];
        for i in 1..=self.len.min(self.c.len() - 1) {
            d = f.mul_add(d, self.c[i], self.seq[k - i]);
        }
        if d == 0 {
            self.shift += 1;
            self.stable += 1;
            return d;
        }
        self.stable = 0;
        let coef = f.neg(f.mul(d, f.inv(self.prev_disc).expect("discrepancy is nonzero")));
        let old = self.c.clone();
        if self.c.len() < self.prev.len() + self.shift {
            self.c.resize(self.prev.len() + self.shift, 0);
        }
        for (i, &b) in self.prev.iter().enumerate() {
            let j = i + self.shift;
            self.c[j] = f.mul_add(self.c[j], coef, b);
        }
        if 2 * self.len <= k {
            self.len = k + 1 - self.len;
            self.prev = old;
            self.prev_disc = d;
            self.shift = 1;
        } else {
            self.shift += 1;
        }
        d
    }

    /// Current linear complexity `L`.
    pub fn complexity(&self) -> usize {
        self.len
    }

    /// Number of consecutive zero discrepancies since the generator last
    /// changed.
    pub fn stable_terms(&self) -> usize {
        self.stable
    }

    pub fn terms_seen(&self) -> usize {
        self.seq.len()
    }

    /// Monic generator `x^L C(1/x)`.
    pub fn generator(&self) -> Polynomial {
        let mut coeffs = vec![0i64; self.len + 1];
        for (i, &c) in self.c.iter().enumerate().take(self.len + 1) {
            coeffs[self.len - i] = c;
        }
        Polynomial::new(self.field, coeffs)
    }
}

/// Minimal generator of the given prefix (the polynomial `1` for an
/// all-zero or empty sequence).
pub fn berlekamp_massey(s: &ScalarSequence) -> Polynomial {
    berlekamp_massey_terms(s.field, &s.terms)
}

pub fn berlekamp_massey_terms(field: PrimeField, terms: &[i64]) -> Polynomial {
    let mut bm = BerlekampMassey::new(field);
    for &t in terms {
        bm.push(t);
    }
    bm.generator()
}

/// `sum_j g_j S_{i+j} = 0` for every window that fits in the prefix.
pub fn generates(g: &Polynomial, terms: &[i64]) -> bool {
    let f = *g.field();
    let Some(d) = g.degree() else {
        return terms.is_empty();
    };
    (0..terms.len().saturating_sub(d)).all(|i| {
        let mut acc = 0;
        for (j, &c) in g.coeffs().iter().enumerate() {
            acc = f.mul_add(acc, c, f.from_i64(terms[i + j]));
        }
        acc == 0
    })
}
