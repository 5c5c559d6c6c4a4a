//! Separation of natural Hamiltonians on S³: compatible Killing tensors, the CKTs among
//! them, their web and frame, and separable coordinates.

pub mod compat;
pub mod coords;
pub mod integral;
pub mod pipeline;
pub mod potential;
pub mod subfamily;

pub use compat::{
    compatibility_constraints, compatibility_constraints_exact, compatibility_constraints_f64, CompatibleSpace,
};
pub use coords::{separable_coordinates, CoordinateMap};
pub use integral::{first_integral_check, FirstIntegralCheck, IntegralOptions};
pub use pipeline::{format_linear_form, pipeline, LinearForm, PipelineOptions, PipelineStatus, SeparationReport};
pub use potential::{FnPotential, Potential, RationalFunction, RationalPotential};
pub use subfamily::{
    ckt_subfamily, parse_relation, relation_family, subfamily_from_relations, CktSubfamily, LinearRelation,
    SubfamilyOptions, SubfamilySource,
};
