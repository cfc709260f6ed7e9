//! Kernel ridge regression and bias-free SVMs fitted with the exact Gaussian
//! kernel or with random features, and checks that the realized prediction
//! gap stays under what the realized kernel error implies.

mod data;
mod kernel;
mod krr;
mod linalg;
mod svm;

pub use data::{gaussian_blobs, sample_ball, smooth_regression, Dataset};
pub use kernel::KernelMode;
pub use krr::{
    krr_fit, krr_gap_bound, krr_gap_check, krr_predict, realized_kernel_error, KrrGapCheck,
    KrrModel,
};
pub use linalg::{relative_residual, solve_spd, Cholesky, Matrix};
pub use svm::{
    svm_decision, svm_fit, svm_fit_with_budget, svm_gap_check, SvmGapCheck, SvmModel,
    DEFAULT_MAX_SWEEPS, MAX_SVM_POINTS,
};
