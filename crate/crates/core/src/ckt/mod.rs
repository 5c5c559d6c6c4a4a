//! Deciding whether a Killing tensor on S³ is characteristic.

pub mod conditions;
pub mod eigen;
pub mod symexpr;
pub mod torsion;
pub mod verdict;

pub use conditions::{h_condition, tsn_conditions, tsn_report, TsnReport};
pub use eigen::{eigen_structure_at, EigenStructure};
pub use symexpr::{SymTerm, SymmetrizedExpression};
pub use torsion::{haantjes_at, nijenhuis_at, Tensor3};
pub use verdict::{is_ckt, is_ckt_f64, CktOptions, CktVerdict};
