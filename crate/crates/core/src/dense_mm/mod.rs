//! Exact dense matrix multiplication: classical, delayed-reduction
//! `fgemm`, and Strassen-Winograd gated by its intermediate-value bound.

mod classic;
mod fgemm;
mod strassen;

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub use classic::gemm_classic;
pub use fgemm::{fgemm, k_max};
pub use strassen::{gemm_strassen, gemm_strassen_addmul, max_strassen_levels, strassen_bound, strassen_levels_for};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MulAlgorithm {
    /// One field multiply-add per term.
    Classic,
    /// Integer blocks with delayed reduction.
    Fgemm,
    /// Strassen-Winograd recursion over an `fgemm` base case.
    Strassen,
}

/// How Strassen-Winograd handles reductions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMode {
    /// Delayed when the bound allows it, eager otherwise.
    Auto,
    /// Whole recursion over the integers, one reduction at the end;
    /// refuses when the bound does not fit the accumulator.
    Delayed,
    /// Block additions reduced modulo `p`, delayed-reduction base case.
    Eager,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulConfig {
    pub algorithm: MulAlgorithm,
    /// Capacity exponent `beta`: exact accumulation below `2^(beta+1)`.
    pub accumulator_bits: u32,
    /// Recurse only while every dimension is at least this.
    pub strassen_threshold: usize,
    /// Cap on recursion levels (`None`: as many as the threshold allows).
    pub max_levels: Option<u32>,
    pub mode: ReductionMode,
    /// Record the largest intermediate magnitude of delayed Strassen runs.
    pub track_magnitude: bool,
}

impl Default for MulConfig {
    fn default() -> Self {
        MulConfig {
            algorithm: MulAlgorithm::Fgemm,
            accumulator_bits: 62,
            strassen_threshold: 64,
            max_levels: None,
            mode: ReductionMode::Auto,
            track_magnitude: false,
        }
    }
}

impl MulConfig {
    pub fn classic() -> Self {
        MulConfig {
            algorithm: MulAlgorithm::Classic,
            ..Self::default()
        }
    }

    pub fn strassen(levels: Option<u32>, threshold: usize) -> Self {
        MulConfig {
            algorithm: MulAlgorithm::Strassen,
            strassen_threshold: threshold,
            max_levels: levels,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.accumulator_bits == 0 || self.accumulator_bits > 63 {
            return Err(Error::config("accumulator bits must be in 1..=63"));
        }
        if self.strassen_threshold < 2 {
            return Err(Error::config("Strassen threshold must be at least 2"));
        }
        Ok(())
    }
}

/// Operation counters, shareable across threads.
#[derive(Debug, Default)]
pub struct OpCounter {
    muls: AtomicU64,
    adds: AtomicU64,
    base_products: AtomicU64,
    reductions: AtomicU64,
    max_magnitude: AtomicU64,
}

/// Snapshot of an [`OpCounter`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub muls: u64,
    pub adds: u64,
    pub base_products: u64,
    pub reductions: u64,
    pub max_magnitude: u64,
}

impl OpCounts {
    /// Multiplications plus additions: the unit of the `K` constants
    /// (classical `n x n` product = `2 n^3`).
    pub fn field_ops(&self) -> u64 {
        self.muls + self.adds
    }
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn ops(&self, muls: u64, adds: u64) {
        if muls > 0 {
            self.muls.fetch_add(muls, Ordering::Relaxed);
        }
        if adds > 0 {
            self.adds.fetch_add(adds, Ordering::Relaxed);
        }
    }

    /// `n` multiply-adds.
    #[inline]
    pub fn mul_adds(&self, n: u64) {
        self.ops(n, n);
    }

    #[inline]
    pub fn base_product(&self) {
        self.base_products.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub fn reductions(&self, n: u64) {
        self.reductions.fetch_add(n, Ordering::Relaxed);
    }

    #[inline]
    pub fn magnitude(&self, z: u64) {
        self.max_magnitude.fetch_max(z, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> OpCounts {
        OpCounts {
            muls: self.muls.load(Ordering::Relaxed),
            adds: self.adds.load(Ordering::Relaxed),
            base_products: self.base_products.load(Ordering::Relaxed),
            reductions: self.reductions.load(Ordering::Relaxed),
            max_magnitude: self.max_magnitude.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        for a in [
            &self.muls,
            &self.adds,
            &self.base_products,
            &self.reductions,
            &self.max_magnitude,
        ] {
            a.store(0, Ordering::Relaxed);
        }
    }
}

/// A multiplication configuration bundled with an optional counter; the
/// elimination routines take one of these for their products.
#[derive(Debug, Default)]
pub struct MatMul {
    pub cfg: MulConfig,
    counter: Option<OpCounter>,
}

impl MatMul {
    pub fn new(cfg: MulConfig) -> Self {
        MatMul { cfg, counter: None }
    }

    pub fn counting(cfg: MulConfig) -> Self {
        MatMul {
            cfg,
            counter: Some(OpCounter::new()),
        }
    }

    pub fn counter(&self) -> Option<&OpCounter> {
        self.counter.as_ref()
    }

    pub fn counts(&self) -> OpCounts {
        self.counter.as_ref().map(OpCounter::snapshot).unwrap_or_default()
    }

    #[inline]
    pub fn ops(&self, muls: u64, adds: u64) {
        if let Some(c) = &self.counter {
            c.ops(muls, adds);
        }
    }

    pub fn mul(&self, a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
        let c = self.counter.as_ref();
        match self.cfg.algorithm {
            MulAlgorithm::Classic => gemm_classic(a, b, c),
            MulAlgorithm::Fgemm if a.field().modulus() == 2 => gemm_classic(a, b, c),
            MulAlgorithm::Fgemm => fgemm(a, b, &self.cfg, c),
            MulAlgorithm::Strassen => gemm_strassen(a, b, &self.cfg, c),
        }
    }

    /// `C + A B`
    pub fn mul_add(&self, c: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
        let ab = self.mul(a, b)?;
        let (m, n) = c.shape();
        self.ops(0, (m * n) as u64);
        c.add(&ab)
    }

    /// `C - A B`
    pub fn mul_sub(&self, c: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
        let ab = self.mul(a, b)?;
        let (m, n) = c.shape();
        self.ops(0, (m * n) as u64);
        c.sub(&ab)
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::field::PrimeField;
    use crate::matrix::random_dense;
    use crate::rng::SeededRng;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn all_products_agree(seed in any::<u64>(), m in 1usize..40, k in 1usize..40, n in 1usize..40,
                              pi in 0usize..4, centered in any::<bool>()) {
            let p = [3u64, 5, 65521, 2_147_483_647][pi];
            let f = if centered { PrimeField::centered(p).unwrap() } else { PrimeField::classic(p).unwrap() };
            let mut rng = SeededRng::new(seed);
            let a = random_dense(f, m, k, &mut rng);
            let b = random_dense(f, k, n, &mut rng);
            let c = gemm_classic(&a, &b, None).unwrap();
            prop_assert_eq!(&fgemm(&a, &b, &MulConfig::default(), None).unwrap(), &c);
            for l in 1..=2 {
                let cfg = MulConfig::strassen(Some(l), 4);
                prop_assert_eq!(&gemm_strassen(&a, &b, &cfg, None).unwrap(), &c);
            }
        }

        #[test]
        fn result_independent_of_threads(seed in any::<u64>()) {
            let f = PrimeField::classic(65521).unwrap();
            let mut rng = SeededRng::new(seed);
            let a = random_dense(f, 70, 90, &mut rng);
            let b = random_dense(f, 90, 65, &mut rng);
            let cfg = MulConfig::strassen(Some(2), 8);
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            let one = pool.install(|| gemm_strassen(&a, &b, &cfg, None).unwrap());
            prop_assert_eq!(one, gemm_strassen(&a, &b, &cfg, None).unwrap());
        }
    }
}
