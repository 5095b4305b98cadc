//! Command-line front end: argument grammar, verb dispatch, and the
//! JSON-facing report types.
//!
//! The binary entry point is a thin wrapper over [`app::run`], which takes
//! the argv, the optional `CARTAN_VMRT_SEED` value, and two output sinks,
//! and returns the process exit code. Keeping the whole pipeline in
//! library code lets the grammar and every verb run under the test
//! harness without spawning processes.

#![forbid(unsafe_code)]

pub mod app;
pub mod wire;
