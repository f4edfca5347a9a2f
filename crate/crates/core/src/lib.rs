//! Core numerics for finite-sample posterior concentration experiments in
//! high-dimensional sparse Gaussian linear regression.
//!
//! The crate is organized around one pipeline:
//!
//! 1. [`problem`] builds regression instances `y = X beta0 + e` with
//!    column-normalized designs and compressible coefficient vectors.
//! 2. [`rip`] certifies restricted isometry / restricted orthogonality
//!    constants of the normalized design by exhaustive support enumeration.
//! 3. [`dantzig`] solves the Dantzig selector linear program and evaluates
//!    its high-probability error radius.
//! 4. [`priors`] represents sparsity(S)-Gaussian, Bernoulli-Gaussian, and
//!    Laplace priors together with analytic small-ball lower bounds.
//! 5. [`posterior`] enumerates the exact spike-slab posterior mixture and
//!    numerically verifies the supporting operator/determinant lemmas.
//! 6. [`bounds`] evaluates the concentration bounds themselves, all in log
//!    domain, with explicit vacuity flags.
//!
//! Everything is deterministic given seeds: randomness flows through the
//! splittable counter generator in [`rng`], and all reductions are computed
//! in a fixed order. The crate is `no_std` (with `alloc`) so the numerics
//! stay free of platform-dependent behavior; IO, serialization, and the CLI
//! live in the companion `concentra` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod dantzig;
mod error;
pub mod linalg;
pub mod logsum;
pub mod lp;
pub mod posterior;
pub mod priors;
pub mod problem;
pub mod rip;
pub mod rng;
pub mod supports;

pub use error::{Error, Result};

/// Default cap on the number of supports (or support pairs) any exhaustive
/// enumeration is allowed to visit before refusing to run.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;
