//! Iterative methods that touch a matrix only through products with
//! vectors: Berlekamp-Massey, Wiedemann, preconditioned rank and
//! determinant, invariant factors, Lanczos and Wiedemann solving.
//!
//! Monte-Carlo answers come with a [`ProbabilityReport`]. Solvers are
//! Las-Vegas: a returned vector has been checked against the operator.

mod bm;
mod precond;
mod reductions;
mod solve;
mod wiedemann;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

pub use bm::{berlekamp_massey, berlekamp_massey_terms, generates, BerlekampMassey, ScalarSequence};
pub use precond::{BidiagonalLeft, RankUpdate, Symmetrized};
pub use reductions::{
    blackbox_det, blackbox_det_with, blackbox_rank, blackbox_rank_with, invariant_factor, invariant_factor_with,
    DetOutcome, DET_MAX_DRAWS,
};
pub use solve::{
    lanczos_solve, nullspace_vector, nullspace_vector_with, wiedemann_solve, FailureKind, LasVegas, SOLVE_MAX_ATTEMPTS,
};
pub use wiedemann::{
    apply_poly, krylov_sequence, minpoly_montecarlo, minpoly_montecarlo_with, wiedemann_minpoly, wiedemann_minpoly_with,
};

/// Knobs shared by the randomized routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlackboxOptions {
    pub seed: u64,
    /// Random projections whose minimal polynomials are combined by lcm.
    pub draws: usize,
    /// Stop a sequence once its generator has survived `2 delta` terms.
    pub early_termination: Option<usize>,
}

impl BlackboxOptions {
    pub fn seeded(seed: u64) -> Self {
        BlackboxOptions {
            seed,
            ..Self::default()
        }
    }

    pub fn draws(mut self, draws: usize) -> Self {
        self.draws = draws;
        self
    }

    pub fn early_termination(mut self, delta: Option<usize>) -> Self {
        self.early_termination = delta;
        self
    }
}

impl Default for BlackboxOptions {
    fn default() -> Self {
        BlackboxOptions {
            seed: 0,
            draws: 2,
            early_termination: None,
        }
    }
}

/// Success-probability lower bound attached to a Monte-Carlo answer.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityReport {
    pub algorithm: String,
    pub formula: String,
    /// Exact bound, clamped to `[0, 1]`.
    pub bound: BigRational,
    /// `|S|` for `S = F \ {0}`.
    pub sample_set_size: u64,
    pub trials: u64,
    pub successes: Option<u64>,
}

impl ProbabilityReport {
    pub fn new(
        algorithm: &str,
        formula: &str,
        bound: BigRational,
        field_order: u64,
        trials: u64,
        successes: Option<u64>,
    ) -> Self {
        let bound = if bound.is_negative() {
            BigRational::zero()
        } else if bound > BigRational::one() {
            BigRational::one()
        } else {
            bound
        };
        ProbabilityReport {
            algorithm: algorithm.to_string(),
            formula: formula.to_string(),
            bound,
            sample_set_size: field_order - 1,
            trials,
            successes,
        }
    }

    /// `1 - num / (den * |S|)`, clamped.
    pub(crate) fn linear(
        algorithm: &str,
        formula: &str,
        field_order: u64,
        num: u128,
        den: u128,
        trials: u64,
        successes: Option<u64>,
    ) -> Self {
        let s = u128::from(field_order - 1);
        let bound = BigRational::one() - BigRational::new((num as i128).into(), ((den * s) as i128).into());
        Self::new(algorithm, formula, bound, field_order, trials, successes)
    }

    pub fn bound_f64(&self) -> f64 {
        self.bound.to_f64().unwrap_or(0.0)
    }

    /// Failure probability allowed by the bound.
    pub fn failure_bound(&self) -> BigRational {
        BigRational::one() - &self.bound
    }

    /// A warning when the bound is too weak to be useful.
    pub fn warning(&self) -> Option<String> {
        (self.bound < BigRational::new(1.into(), 2.into())).then(|| {
            format!(
                "success bound {:.4} is below 1/2 for |S| = {}; work over an extension field for a usable guarantee",
                self.bound_f64(),
                self.sample_set_size
            )
        })
    }
}

impl Serialize for ProbabilityReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ProbabilityReport", 8)?;
        st.serialize_field("algorithm", &self.algorithm)?;
        st.serialize_field("formula", &self.formula)?;
        st.serialize_field("bound", &self.bound.to_string())?;
        st.serialize_field("bound_approx", &self.bound_f64())?;
        st.serialize_field("sample_set_size", &self.sample_set_size)?;
        st.serialize_field("trials", &self.trials)?;
        st.serialize_field("successes", &self.successes)?;
        st.serialize_field("warning", &self.warning())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_clamps() {
        let r = ProbabilityReport::linear("rank", "f", 3, 1000, 2, 1, None);
        assert!(r.bound.is_zero());
        assert!(r.warning().is_some());
        let r = ProbabilityReport::linear("det", "f", 2_147_483_647, 380, 2, 1, Some(1));
        assert!(r.bound_f64() > 0.999_999);
        assert!(r.warning().is_none());
        assert_eq!(r.sample_set_size, 2_147_483_646);
        assert_eq!(
            r.failure_bound(),
            BigRational::new(380.into(), (2i64 * 2_147_483_646).into())
        );
    }
}
