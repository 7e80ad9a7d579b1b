//! Verification workbench over the additive-combinatorics core: pinned
//! experiment suites, machine-readable reports, and CSV plot data.
//!
//! The library side hosts the suite registry and report plumbing; the
//! `workbench` binary wraps it in a CLI with subcommands for one-off
//! analysis, norm and average computations, cube packing, suite
//! verification, and the qualitative demo.

pub mod corpus;
pub mod plot;
pub mod report;
pub mod suites;
