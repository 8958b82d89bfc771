//! Exact probabilistic queries on states and network models.
//!
//! [`brute`] holds the enumeration oracles; [`chain`] the linear-time
//! specializations for models whose graph is the path `1 - 2 - ... - n`.

pub mod bench;
pub mod brute;
pub mod chain;
pub mod measure;

pub use bench::{bench_chains, BenchReport, BenchRow};
pub use brute::{
    conditional_probability, conditional_probability_brute, marginal_probability, marginal_ratio,
    mle_brute_force,
};
pub use chain::{chain_marginal_ratio, chain_prefix_marginal_ratio, mle_chain, random_chain_model};
pub use measure::{measure_and_update, MeasurementUpdate};

use crate::assignment::Assignment;

/// A non-negative query value with its operation count.
///
/// `op_count` counts complex multiplications, additions and modulus-squares,
/// one each. `ln_value` stays finite when `value` would overflow or underflow,
/// which happens for long chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryResult {
    pub value: f64,
    pub ln_value: f64,
    pub op_count: u64,
}

impl QueryResult {
    pub(crate) fn from_scaled(mantissa: f64, ln_scale: f64, op_count: u64) -> Self {
        QueryResult {
            value: mantissa * ln_scale.exp(),
            ln_value: mantissa.ln() + ln_scale,
            op_count,
        }
    }
}

/// Most likely full assignment and its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct MleResult {
    pub assignment: Assignment,
    pub probability: f64,
    pub op_count: u64,
}

/// Probabilities this small are treated as zero evidence.
pub const MIN_EVIDENCE_PROBABILITY: f64 = 1e-300;
