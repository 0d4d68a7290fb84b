//! Verification harness for `pfaffian-core`: seeded suites that check the
//! geometry against independent oracles, JSON reports, CSV sweeps and the
//! skew matrix interchange format.

pub mod format;
pub mod report;
pub mod suites;
pub mod sweep;

pub use report::{Verdict, VerificationReport};
pub use suites::{run_suite, DEFAULT_GRID, SUITE_NAMES};
