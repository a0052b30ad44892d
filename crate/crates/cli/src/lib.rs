//! Experiment harness and file formats around `tilecache-core`.
//!
//! [`harness`] drives parameter sweeps across replacement policies,
//! normalizes measured I/O against the lower bound, and carries the built-in
//! self-test vectors; [`tracefile`] reads and writes the plain-text trace
//! format; [`output`] renders results as CSV or JSON.

pub mod harness;
pub mod output;
pub mod tracefile;
