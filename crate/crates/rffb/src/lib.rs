//! Experiment runner for random Fourier feature error bounds: JSON configs
//! in, CSV/JSON reports and SVG plots out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod exec;
pub mod experiments;
pub mod plot;
pub mod report;
pub mod run;
