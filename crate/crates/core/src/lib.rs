//! Characteristic Killing tensors on the 3-sphere.
//!
//! A valence-two Killing tensor on S³ is parametrized by an algebraic curvature tensor
//! `C` (20 parameters). This crate decides whether it is characteristic, classifies the
//! orthogonal separable web it generates under SO(4), builds the moving frame that takes
//! it to canonical form, and runs the separation algorithm for natural Hamiltonians.

pub mod ckt;
pub mod error;
pub mod exec;
pub mod frames;
pub mod linalg;
pub mod mat;
pub mod scalar;
pub mod separation;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Rational;
