//! Killing vectors and tensors on Euclidean 4-space and the 3-sphere.

pub mod act;
pub mod action;
pub mod killing;
pub mod poly;

pub use act::{act_from_components, casimir, kt_at, kt_gradient, ricci, Act, SkewPair, PAIRS, SLOTS};
pub use action::{compound, covariants, invariants, so4_act, Frame};
pub use killing::{e4_kt_at, E4KillingTensor, KillingVectorParams};
pub use poly::{poisson_bracket, MomentumPolynomial, Poly};
