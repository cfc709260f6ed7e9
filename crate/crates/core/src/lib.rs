//! Random Fourier features for the Gaussian kernel.
//!
//! This crate holds everything that is pure computation:
//!
//! * [`rff`]: frequency sampling, the feature map, the cosine-average kernel
//!   estimator and a certified supremum of the radial approximation error;
//! * [`bounds`]: closed-form upper and lower bounds on the approximation
//!   error, their inversions, and the constants they need;
//! * [`special`]: Lambert W, the Gamma function and the regularized
//!   incomplete gamma function;
//! * [`lab`]: Monte Carlo experiments that check the bounds empirically;
//! * [`downstream`]: kernel ridge regression and bias-free SVMs with exact
//!   and approximate kernels, and the error propagation checks built on them.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution, file
//! formats and the command line live in the `rffb` crate, which plugs into
//! [`lab::Executor`].

#![no_std]
// `!(x > 0.0)` is how argument checks reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Published approximation coefficients are kept digit for digit.
#![allow(clippy::excessive_precision)]

extern crate alloc;

pub mod bounds;
pub mod downstream;
mod error;
pub mod lab;
pub mod math;
pub mod rff;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
