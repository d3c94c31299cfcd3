//! Hyperbolic Eisenstein series attached to indefinite binary quadratic forms,
//! the locally harmonic Maass forms and Poincaré series they are built from,
//! and the cycle integrals that connect them.
//!
//! Points of the upper half-plane are `Complex64` values `τ = u + iv` with `v > 0`.

pub mod arith;
pub mod characters;
pub mod classical;
pub mod cycles;
pub mod error;
pub mod operators;
#[cfg(test)]
mod properties;
pub mod qforms;
pub mod report;
pub mod series;
pub mod special;
pub mod suites;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qforms::{GroupElement, QForm};
