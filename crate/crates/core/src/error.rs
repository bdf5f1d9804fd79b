use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate amenity id {0:?}")]
    DuplicateId(String),
    #[error("amenity at index {0} has an empty id")]
    EmptyId(usize),
    #[error("non-finite value in {0}")]
    NonFiniteValue(String),
    #[error("profile {profile:?} overrides unknown amenity {id:?}")]
    UnknownOverrideTarget { profile: String, id: String },
    #[error("non-positive moving efficiency in {0}")]
    NonPositiveEfficiency(String),
    #[error("unknown amenity {0:?}")]
    UnknownAmenity(String),
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("invalid scene: {0}")]
    InvalidScene(ValidationReport),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("raster has {got} values, grid needs {expected}")]
    RasterShape { expected: usize, got: usize },
    #[error("negative distance {0}")]
    NegativeDistance(f64),

    #[error("raster is empty")]
    EmptyRaster,
    #[error("mean benefit is zero, uniformity coefficient undefined")]
    ZeroMean,

    #[error("raster must be at least 2x2 for contouring, got {ncols}x{nrows}")]
    GridTooSmall { ncols: usize, nrows: usize },
    #[error("raster is constant ({0}); no range to space levels over")]
    NoFiniteRange(f64),
    #[error("invalid contour levels: {0}")]
    InvalidLevels(String),

    #[error("origin coincides with amenity {0:?}")]
    OriginOnAmenity(String),
    #[error("amenity {0:?} has non-positive attractiveness")]
    NonPositiveAttractiveness(String),
    #[error("no amenities to choose from")]
    EmptyChoiceSet,
    #[error("amenities {0:?} and {1:?} are coincident")]
    CoincidentAmenities(String, String),
    #[error("benefit along the segment has no interior minimum")]
    NoInteriorMinimum,
    #[error("sample resolution must be at least 3, got {0}")]
    InvalidResolution(usize),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Every invariant violation found while validating a scene.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub errors: Vec<Error>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}
