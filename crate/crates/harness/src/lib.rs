//! Harness for the `varcap` command-line tool: configuration, samplers,
//! pipelines and the built-in verification suites.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod sampler;
pub mod suites;
pub mod variety;
