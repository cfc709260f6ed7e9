//! One function per experiment kind. Each turns a validated config into a
//! [`Table`]; cells run in order and trials inside a cell run on the
//! executor.

mod analytic;
mod downstream;
mod envelope;
mod twopoint;

use rffb_core::lab::Executor;
use rffb_core::rng::derive_seed;

use crate::config::{ExperimentConfig, Plan};
use crate::report::Table;

/// Seed of grid cell `index`.
pub fn cell_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64)
}

pub fn run_plan<E: Executor + Sync>(cfg: &ExperimentConfig, exec: &E) -> anyhow::Result<Table> {
    let seed = cfg.seed;
    match &cfg.plan {
        Plan::BoundsTable(p) => analytic::bounds_table(p),
        Plan::CompareInversions(p) => analytic::compare_inversions(p),
        Plan::ProbabilityEnvelope(p) => envelope::probability_envelope(p, seed, exec),
        Plan::ExpectedSup(p) => envelope::expected_sup(p, seed, exec),
        Plan::Lipschitz(p) => envelope::lipschitz(p, seed, exec),
        Plan::ParameterIdentity(p) => envelope::parameter_identity(p, seed, exec),
        Plan::Lecam(p) => twopoint::lecam(p, seed, exec),
        Plan::Affinity(p) => twopoint::affinity(p, seed, exec),
        Plan::KrrGap(p) => downstream::krr_gap(p, seed, exec),
        Plan::SvmGap(p) => downstream::svm_gap(p, seed, exec),
    }
}
