//! Seeded, splittable randomness shared by every probabilistic routine.

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::field::PrimeField;

/// A deterministic 64-bit-state generator.
///
/// Every randomized algorithm in the crate takes one of these (or a seed
/// that builds one), so a run is reproducible from its seed alone.
#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: SplitMix64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    /// Derive an independent child stream.
    pub fn split(&mut self) -> SeededRng {
        SeededRng::new(self.inner.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.inner.random_range(0..bound)
    }

    pub fn index(&mut self, bound: usize) -> usize {
        self.inner.random_range(0..bound)
    }

    pub fn chance(&mut self, prob: f64) -> bool {
        self.inner.random_bool(prob.clamp(0.0, 1.0))
    }

    /// Uniform element of the whole field, in canonical form.
    pub fn element(&mut self, f: &PrimeField) -> i64 {
        f.from_u64(self.below(f.modulus()))
    }

    /// Uniform element of the sample set S = F \ {0}.
    pub fn nonzero(&mut self, f: &PrimeField) -> i64 {
        f.from_u64(1 + self.below(f.modulus() - 1))
    }

    pub fn vector(&mut self, f: &PrimeField, len: usize) -> Vec<i64> {
        (0..len).map(|_| self.element(f)).collect()
    }

    pub fn nonzero_vector(&mut self, f: &PrimeField, len: usize) -> Vec<i64> {
        (0..len).map(|_| self.nonzero(f)).collect()
    }

    /// Fisher-Yates shuffle of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.index(i + 1);
            v.swap(i, j);
        }
        v
    }
}
