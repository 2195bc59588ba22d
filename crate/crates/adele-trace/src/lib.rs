//! Command line front end for `adele-trace-core`: JSON documents, reports,
//! seeded random test functions and the `adele-trace` binary.

pub mod cli;
pub mod format;
pub mod random;
pub mod report;
