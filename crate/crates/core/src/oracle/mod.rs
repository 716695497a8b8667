//! Ground truth by brute force. Not used by the production algorithms.

pub mod delaunay;
pub mod geometry;
pub mod linalg;
pub mod quality;
pub mod verify;

pub use delaunay::{brute_force_delaunay, DelaunayResult};
pub use quality::{measure_protection, measure_thickness, quality_report, Protection, QualityReport, Thickness};
pub use verify::{
    verify_conversions, verify_identity_from_protection, verify_inheritance, verify_thickness_from_protection,
    wit_subset_violations, ConversionReport, IdentityReport, InheritanceReport,
};
