//! Verification suites over the claim registry, and their report formats.

pub mod emit;
pub mod registry;
pub mod suites;

pub use emit::{exit_code, render, Format};
pub use registry::{Registry, RegistryError};
pub use suites::{run_suite, PrimeChoice, RunConfig, Suite, SuiteResult};
