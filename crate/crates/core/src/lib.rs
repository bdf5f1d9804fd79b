//! Spatial benefit fields produced by urban amenities and disamenities.
//!
//! Every amenity contributes its attractiveness, decayed with distance by a
//! [`Kernel`], to every point of the plane; the contributions add up to a
//! benefit field. From that field the crate derives isobenefit contour
//! lines, the Uniformity Coefficient, breaking points of equal attraction,
//! Huff visit probabilities, and Preference Gap Gain maps comparing a
//! personal preference profile with the majority.

pub mod error;
pub mod field;
pub mod gravity;
pub mod indicators;
pub mod io;
pub mod isolines;
pub mod report;
pub mod scene;

pub use error::{Error, Result, ValidationReport};
pub use field::{evaluate_amenities, evaluate_field, kernel_benefit, point_benefit, FieldRasters, PointBenefit};
pub use gravity::{
    huff_probabilities, huff_probabilities_with_exponent, numeric_breakpoint, reilly_breakpoint,
    BreakPoint, HuffResult,
};
pub use indicators::{
    pgg_field, pgg_summary, summary, uniformity, uniformity_of, PggSummary, Subset, SummaryStats,
    UniformityResult,
};
pub use isolines::{extract_isolines, ContourSet, Isoline, Levels};
pub use scene::{
    resolve_profile, validate_scene, Amenity, GridSpec, Kernel, KernelFamily, Profile, Raster,
    Resolved, Scene, BASELINE,
};
