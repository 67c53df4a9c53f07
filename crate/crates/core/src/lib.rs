//! Numerics for perpetuities `X = AX + B` and their tilted-measure tail
//! asymptotics: model construction, Monte Carlo, grid renewal theory and
//! diagnostics.
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod counterexample;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod quad;
pub mod renewal;
pub mod rng;
pub mod sampler;
pub mod roots;
pub mod special;
pub mod stats;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
