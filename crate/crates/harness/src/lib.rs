//! Scenario configuration, the check registry, suite reports and the
//! command implementations behind the `spt` binary.

// `!(x > 0.0)` is the idiom used throughout to reject NaN alongside bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod error;
pub mod registry;
pub mod suite;

pub use config::Scenario;
pub use error::{HarnessError, Result};
pub use suite::{run_suite, SuiteReport};
