//! Experiment harness for `confounded-ridge`: configs, figure data,
//! Monte Carlo validation and the invariant check suite.

// `!(x > 0.0)` guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod family;
pub mod kernels;
pub mod output;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
