//! Orthogonal matroids with coefficients in tracts.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is exact and
//! enumeration based, sized for ground sets of a handful of pairs.

#![no_std]

extern crate alloc;

pub mod corpus;
mod error;
pub mod ground_set;
pub mod ortho_matroid;
pub mod represent;
pub mod signature;
pub mod text;
pub mod tract_core;
pub mod vector_set;
pub mod wick;

pub use error::{Error, Result};
pub use ground_set::{ESet, Element, Transversal};
pub use ortho_matroid::OrthoMatroid;
pub use signature::{SignatureFamily, TractVector};
pub use tract_core::{FormalSum, Scalar, Tract, TractHom};
pub use vector_set::VectorFamily;
pub use wick::WickFunction;
