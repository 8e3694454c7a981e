//! Exact computations in the stable module categories of finite sub-Hopf algebras of the
//! mod 2 Steenrod algebra: profile algebras, graded modules, free-summand reduction,
//! Margolis homology, Picard classification, minimal resolutions and Ext, the May
//! spectral sequence, and the relative Picard descent criterion.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod descent;
pub mod error;
pub mod f2;
pub mod may;
pub mod milnor;
pub mod module;
pub mod resolution;
pub mod stable;

pub use error::{Error, Result};
