//! Moving frames: algebraic Ricci tensor, diagonalizing frame, canonical-form matching.

pub mod database;
pub mod matching;
pub mod ricci;

pub use database::{essential_params, sample_parameters, CanonicalPattern, Category, EssentialParams, WebClass};
pub use matching::{canonical_match, canonical_match_f64, match_tensor, match_tensor_f64, FrameResult, MatchOptions};
pub use ricci::{exact_frame_from_ricci, frame_from_ricci, ricci, ricci_frame, ExactFrame, RicciFrame};
