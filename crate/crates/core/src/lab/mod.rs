//! Monte Carlo checks of the analytic bounds.
//!
//! Every experiment is a list of independent work items (single trials or
//! fixed-size blocks of samples), each with its own random stream. An
//! [`Executor`] runs them and returns outputs in index order, and the
//! results are folded sequentially, so the numbers do not depend on how many
//! workers ran them.

mod envelope;
mod exec;
mod identity;
mod stats;
mod twopoint;

pub use envelope::{
    check_lipschitz_variance, estimate_error_probability, estimate_expected_sup,
    ErrorProbabilityRun, ExpectedSup, LipschitzVariance, TrialRecord,
};
pub use exec::{run_indexed, Executor, FnItems, Serial, WorkItems};
pub use identity::{parameter_identity, ParameterIdentity, MAX_DR2};
pub use stats::{wilson_interval, Moments, ProbabilityEstimate, WILSON_Z95};
pub use twopoint::{
    affinity_closed, affinity_mc, lecam_floor_experiment, neyman_pearson_error,
    threshold_test_error, LeCamFloor, McValue, TwoPointPair,
};

/// Samples per work item for experiments that draw many cheap samples.
pub const SAMPLE_BLOCK: usize = 4096;

/// Splits `total` into blocks of [`SAMPLE_BLOCK`]; returns the size of
/// block `index`.
pub(crate) fn block_len(total: usize, index: usize) -> usize {
    let start = index * SAMPLE_BLOCK;
    SAMPLE_BLOCK.min(total - start)
}

pub(crate) fn block_count(total: usize) -> usize {
    total.div_ceil(SAMPLE_BLOCK)
}
