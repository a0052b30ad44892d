//! Trace-driven cache simulation for blocked matrix-matrix multiplication.
//!
//! The crate models a two-level memory: a cache of `M` scalar slots in front
//! of an unbounded main memory. [`trace`] turns the naive and six-loop blocked
//! matmul loop nests into streams of per-entry access events, [`engine`]
//! replays those streams under LRU (a linear-scan reference and a
//! constant-time double-chained variant) or LFU replacement with exact
//! read/write-back accounting, [`bounds`] evaluates the closed-form
//! communication lower bounds and optimal tile sizes, and [`kernel`] runs the
//! actual arithmetic as a correctness oracle for the loop orders.
//!
//! Everything here is `no_std` + `alloc`; IO, file formats and the CLI live
//! in the companion `tilecache-cli` crate.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod engine;
pub mod kernel;
pub mod trace;

pub use engine::{EngineKind, Replay, SimResult};
pub use trace::{AccessEvent, AccessTrace, BlockSpec, EntryId, IdScheme};
