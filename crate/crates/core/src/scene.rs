//! Domain model: amenities, decay kernels, evaluation grids and personal
//! preference profiles.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationReport};

/// Profile name that always resolves to the unmodified scene.
pub const BASELINE: &str = "baseline";

/// A point attraction. Positive attractiveness is an amenity, negative a
/// disamenity, zero is inert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amenity {
    pub id: String,
    pub x: f64,
    pub y: f64,
    #[serde(rename = "A")]
    pub attractiveness: f64,
}

impl Amenity {
    pub fn new(id: impl Into<String>, x: f64, y: f64, attractiveness: f64) -> Self {
        Amenity {
            id: id.into(),
            x,
            y,
            attractiveness,
        }
    }

    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        (self.x - x).hypot(self.y - y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// `A / (1 + d/E)`: larger E decays slower.
    Rational,
    /// `A * exp(-E d^2)`: larger E decays faster.
    Gaussian,
    /// `A * exp(-E d)`: larger E decays faster.
    Exponential,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 3] = [
        KernelFamily::Rational,
        KernelFamily::Gaussian,
        KernelFamily::Exponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Rational => "rational",
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Exponential => "exponential",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rational" => Ok(KernelFamily::Rational),
            "gaussian" => Ok(KernelFamily::Gaussian),
            "exponential" => Ok(KernelFamily::Exponential),
            other => Err(format!(
                "unknown kernel family {other:?} (expected rational, gaussian or exponential)"
            )),
        }
    }
}

/// Distance-decay law plus the moving-efficiency coefficient E.
///
/// The same coefficient has opposite meaning across families: for the
/// rational law a larger E means benefit carries further, for the Gaussian
/// and exponential laws a larger E means benefit dies out sooner. Both are
/// kept as written so values can be compared with published figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub family: KernelFamily,
    pub efficiency: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, efficiency: f64) -> Result<Self> {
        check_efficiency(efficiency, "kernel")?;
        Ok(Kernel { family, efficiency })
    }

    pub fn with_efficiency(self, efficiency: f64) -> Result<Self> {
        Kernel::new(self.family, efficiency)
    }

    /// Benefit at distance `d`; the caller guarantees `d >= 0`.
    #[inline]
    pub(crate) fn eval(&self, attractiveness: f64, d: f64) -> f64 {
        let e = self.efficiency;
        match self.family {
            KernelFamily::Rational => attractiveness / (1.0 + d / e),
            KernelFamily::Gaussian => attractiveness * (-e * d * d).exp(),
            KernelFamily::Exponential => attractiveness * (-e * d).exp(),
        }
    }
}

fn check_efficiency(e: f64, what: &str) -> Result<()> {
    if !e.is_finite() {
        Err(Error::NonFiniteValue(format!("{what} efficiency")))
    } else if e <= 0.0 {
        Err(Error::NonPositiveEfficiency(what.to_string()))
    } else {
        Ok(())
    }
}

/// Regular lattice of evaluation points. Cell `(i, j)` is centred at
/// `(origin_x + i * cell_size, origin_y + j * cell_size)`, with `j = 0` the
/// bottom row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin_x: f64,
    pub origin_y: f64,
    pub cell_size: f64,
    pub ncols: usize,
    pub nrows: usize,
}

impl GridSpec {
    pub fn new(
        origin_x: f64,
        origin_y: f64,
        cell_size: f64,
        ncols: usize,
        nrows: usize,
    ) -> Result<Self> {
        let grid = GridSpec {
            origin_x,
            origin_y,
            cell_size,
            ncols,
            nrows,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid of `ncols x nrows` centres spanning `[x0, x1] x [y0, y1]` with a
    /// common spacing taken from the x extent.
    pub fn covering(x0: f64, y0: f64, x1: f64, ncols: usize, nrows: usize) -> Result<Self> {
        if ncols < 2 {
            return Err(Error::InvalidGrid("covering grid needs ncols >= 2".into()));
        }
        GridSpec::new(x0, y0, (x1 - x0) / (ncols - 1) as f64, ncols, nrows)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.origin_x.is_finite() && self.origin_y.is_finite() && self.cell_size.is_finite())
        {
            return Err(Error::InvalidGrid("non-finite origin or cell size".into()));
        }
        if self.cell_size <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "cell size must be positive, got {}",
                self.cell_size
            )));
        }
        if self.ncols == 0 || self.nrows == 0 {
            return Err(Error::InvalidGrid(format!(
                "grid must have at least one row and column, got {}x{}",
                self.ncols, self.nrows
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ncols * self.nrows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.ncols + col
    }

    #[inline]
    pub fn x(&self, col: usize) -> f64 {
        self.origin_x + col as f64 * self.cell_size
    }

    #[inline]
    pub fn y(&self, row: usize) -> f64 {
        self.origin_y + row as f64 * self.cell_size
    }

    pub fn center(&self, col: usize, row: usize) -> (f64, f64) {
        (self.x(col), self.y(row))
    }

    /// Bounding box of the cell centres: `(xmin, ymin, xmax, ymax)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.origin_x,
            self.origin_y,
            self.x(self.ncols - 1),
            self.y(self.nrows - 1),
        )
    }
}

/// Benefit values sampled on a grid, row-major from the bottom row upward.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Raster {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::RasterShape {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(format!(
                "raster cell ({}, {})",
                k % grid.ncols,
                k / grid.ncols
            )));
        }
        Ok(Raster { grid, values })
    }

    pub fn filled(grid: GridSpec, value: f64) -> Result<Self> {
        Raster::new(grid, vec![value; grid.len()])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[self.grid.index(col, row)]
    }

    /// Cellwise combination of two rasters on the same grid.
    pub fn zip_with(&self, other: &Raster, f: impl Fn(f64, f64) -> f64) -> Result<Raster> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("rasters are on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Raster::new(self.grid, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Raster> {
        Raster::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// A named set of personal preferences: an optional personal E and
/// per-amenity attractiveness overrides.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Profile {
    pub name: String,
    pub efficiency: Option<f64>,
    pub overrides: BTreeMap<String, f64>,
}

impl Profile {
    pub fn new(name: impl Into<String>) -> Self {
        Profile {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn efficiency(mut self, e: f64) -> Self {
        self.efficiency = Some(e);
        self
    }

    pub fn override_attractiveness(mut self, id: impl Into<String>, a: f64) -> Self {
        self.overrides.insert(id.into(), a);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub amenities: Vec<Amenity>,
    pub profiles: BTreeMap<String, Profile>,
    /// Profile treated as the majority preference; `None` or
    /// [`BASELINE`] mean the unmodified scene.
    pub majority: Option<String>,
}

/// Amenities and kernel after applying a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub amenities: Vec<Amenity>,
    pub kernel: Kernel,
}

impl Scene {
    pub fn new(amenities: Vec<Amenity>) -> Self {
        Scene {
            amenities,
            ..Default::default()
        }
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profiles.insert(profile.name.clone(), profile);
        self
    }

    pub fn amenity(&self, id: &str) -> Option<&Amenity> {
        self.amenities.iter().find(|a| a.id == id)
    }

    /// Collects every invariant violation rather than stopping at the first.
    pub fn check(&self) -> ValidationReport {
        let mut errors = Vec::new();
        let mut seen = HashSet::new();
        let mut reported = HashSet::new();
        for (i, a) in self.amenities.iter().enumerate() {
            if a.id.is_empty() {
                errors.push(Error::EmptyId(i));
            } else if !seen.insert(a.id.as_str()) && reported.insert(a.id.as_str()) {
                errors.push(Error::DuplicateId(a.id.clone()));
            }
            if !(a.x.is_finite() && a.y.is_finite()) {
                errors.push(Error::NonFiniteValue(format!("position of amenity {:?}", a.id)));
            }
            if !a.attractiveness.is_finite() {
                errors.push(Error::NonFiniteValue(format!(
                    "attractiveness of amenity {:?}",
                    a.id
                )));
            }
        }
        for (key, p) in &self.profiles {
            if let Some(e) = p.efficiency {
                if let Err(err) = check_efficiency(e, &format!("profile {key:?}")) {
                    errors.push(err);
                }
            }
            for (id, &v) in &p.overrides {
                if !seen.contains(id.as_str()) {
                    errors.push(Error::UnknownOverrideTarget {
                        profile: key.clone(),
                        id: id.clone(),
                    });
                }
                if !v.is_finite() {
                    errors.push(Error::NonFiniteValue(format!(
                        "profile {key:?} override of {id:?}"
                    )));
                }
            }
        }
        if let Some(m) = &self.majority {
            if m != BASELINE && !self.profiles.contains_key(m) {
                errors.push(Error::UnknownProfile(m.clone()));
            }
        }
        ValidationReport { errors }
    }

    /// Profile name to use as the majority, `None` for the raw scene.
    pub fn majority_profile(&self) -> Option<&str> {
        match self.majority.as_deref() {
            Some(BASELINE) if !self.profiles.contains_key(BASELINE) => None,
            other => other,
        }
    }

    pub fn profile(&self, name: &str) -> Result<&Profile> {
        self.profiles
            .get(name)
            .ok_or_else(|| Error::UnknownProfile(name.to_string()))
    }
}

/// Returns the scene unchanged when every invariant holds, otherwise the
/// full list of violations.
pub fn validate_scene(scene: Scene) -> Result<Scene, ValidationReport> {
    let report = scene.check();
    if report.is_empty() {
        Ok(scene)
    } else {
        Err(report)
    }
}

/// Applies a profile's attractiveness overrides and personal E. `None`
/// (or [`BASELINE`] when no profile carries that name) gives the scene as is.
pub fn resolve_profile(scene: &Scene, profile: Option<&str>, kernel: Kernel) -> Result<Resolved> {
    let profile = match profile {
        None => None,
        Some(BASELINE) if !scene.profiles.contains_key(BASELINE) => None,
        Some(name) => Some(scene.profile(name)?),
    };
    let Some(profile) = profile else {
        return Ok(Resolved {
            amenities: scene.amenities.clone(),
            kernel,
        });
    };
    let amenities = scene
        .amenities
        .iter()
        .map(|a| match profile.overrides.get(&a.id) {
            Some(&v) => Amenity {
                attractiveness: v,
                ..a.clone()
            },
            None => a.clone(),
        })
        .collect();
    let kernel = match profile.efficiency {
        Some(e) => kernel.with_efficiency(e)?,
        None => kernel,
    };
    Ok(Resolved { amenities, kernel })
}
