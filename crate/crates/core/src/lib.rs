//! Engines for Collatz dynamics on arbitrary-precision integers.
//!
//! The crate is organized around the odd numbers of a Collatz sequence:
//!
//! - [`forward`] iterates the map n → 3n+1 / n÷2 and extracts the odd
//!   subsequence and convergence statistics.
//! - [`structure`] describes which odd numbers can precede a given odd
//!   number: every consecutive odd predecessor of `b` is a *jump*
//!   `4^n·p + e(n−1)` from a unique base `p` derived from `b mod 3`.
//! - [`tails`] analyzes the block of trailing one-bits (the *tail*) of an
//!   odd number, which predicts the next `tail_length` odd iterates in
//!   closed form and locates the guaranteed descent point.
//! - [`reverse`] runs the unique smallest-predecessor walk backwards and
//!   detects convergence to an odd multiple of 3.
//! - [`scanner`] verifies forward convergence and reverse convergence over
//!   large ranges: chunked, parallel, checkpointed, with overflow-checked
//!   fixed-width fast paths that promote to big integers.
//! - [`suites`] packages the crate's property checks as runnable suites.

pub mod error;
pub mod forward;
pub mod nat_serde;
pub mod reverse;
pub mod scanner;
pub mod structure;
pub mod suites;
pub mod tails;
pub mod types;

pub use error::Error;
pub use forward::ForwardStats;
pub use reverse::ReverseTrace;
pub use scanner::{ScanJob, ScanKind, ScanReport};
pub use tails::TailDecomposition;
pub use types::{e_value, JumpSpec, Nat, StopReason, Trace};
