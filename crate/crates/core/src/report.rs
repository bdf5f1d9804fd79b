//! Machine-readable results for each command-line operation. The CLI only
//! parses flags, calls these, and serializes what comes back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{evaluate_amenities, FieldRasters};
use crate::gravity::{
    huff_probabilities_with_exponent, numeric_breakpoint, reilly_breakpoint, BreakPoint, HuffResult,
};
use crate::indicators::{pgg_field, pgg_summary, summary, uniformity, PggSummary, Subset, SummaryStats, UniformityResult};
use crate::io::fmt_f64;
use crate::scene::{resolve_profile, GridSpec, Kernel, KernelFamily, Raster, Scene};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub all: UniformityResult,
    /// `None` when the part has zero mean (e.g. no amenities of that sign).
    pub positive: Option<UniformityResult>,
    pub negative: Option<UniformityResult>,
    pub summary: SummaryStats,
    pub notes: Vec<String>,
}

fn optional_part(field: &FieldRasters, subset: Subset, notes: &mut Vec<String>) -> Result<Option<UniformityResult>> {
    match uniformity(subset.select(field)) {
        Ok(u) => Ok(Some(u)),
        Err(Error::ZeroMean) => {
            notes.push(format!("{subset:?} part has zero mean; U undefined").to_lowercase());
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn care_notes(name: &str, u: &Option<UniformityResult>, notes: &mut Vec<String>) {
    if u.is_some_and(|u| u.negative_mean) {
        notes.push(format!(
            "{name}: mean benefit is negative; U uses the signed mean, interpret with care"
        ));
    }
}

pub fn uniformity_report(field: &FieldRasters) -> Result<UniformityReport> {
    let all = uniformity(&field.total)?;
    let mut notes = Vec::new();
    let positive = optional_part(field, Subset::Positive, &mut notes)?;
    let negative = optional_part(field, Subset::Negative, &mut notes)?;
    care_notes("all", &Some(all), &mut notes);
    care_notes("negative", &negative, &mut notes);
    Ok(UniformityReport {
        all,
        positive,
        negative,
        summary: summary(&field.total)?,
        notes,
    })
}

/// Report for a bare raster, where no sign decomposition is available.
pub fn raster_uniformity_report(raster: &Raster) -> Result<UniformityReport> {
    let all = uniformity(raster)?;
    let mut notes = Vec::new();
    care_notes("all", &Some(all), &mut notes);
    Ok(UniformityReport {
        all,
        positive: None,
        negative: None,
        summary: summary(raster)?,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakpointReport {
    pub amenity_1: String,
    pub amenity_2: String,
    pub distance: f64,
    pub reilly: Option<BreakPoint>,
    pub reilly_note: Option<String>,
    pub numeric: Option<BreakPoint>,
    pub numeric_note: Option<String>,
}

/// Reilly and surface-minimum breaking points for a pair, side by side.
///
/// Outcomes that are defined-but-absent (Reilly with a non-positive
/// attractiveness, a monotone benefit profile) are reported as notes;
/// unknown ids and coincident amenities are errors.
pub fn breakpoint_report(
    scene: &Scene,
    profile: Option<&str>,
    kernel: Kernel,
    pair: (&str, &str),
    with_context: bool,
    resolution: usize,
) -> Result<BreakpointReport> {
    let resolved = resolve_profile(scene, profile, kernel)?;
    let find = |id: &str| {
        resolved
            .amenities
            .iter()
            .find(|a| a.id == id)
            .ok_or_else(|| Error::UnknownAmenity(id.to_string()))
    };
    let a1 = find(pair.0)?;
    let a2 = find(pair.1)?;
    let distance = a1.distance_to(a2.x, a2.y);
    let (reilly, reilly_note) = match reilly_breakpoint(a1, a2) {
        Ok(b) => (Some(b), None),
        Err(e @ Error::NonPositiveAttractiveness(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let context = with_context.then_some(resolved.amenities.as_slice());
    let (numeric, numeric_note) =
        match numeric_breakpoint(a1, a2, &resolved.kernel, context, resolution) {
            Ok(b) => (Some(b), None),
            Err(e @ Error::NoInteriorMinimum) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
    Ok(BreakpointReport {
        amenity_1: a1.id.clone(),
        amenity_2: a2.id.clone(),
        distance,
        reilly,
        reilly_note,
        numeric,
        numeric_note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuffReport {
    pub origin: (f64, f64),
    pub exponent: f64,
    pub result: HuffResult,
}

/// Huff probabilities from `origin` over the resolved amenities. With
/// `positive_only`, amenities with `A <= 0` are left out of the choice set
/// instead of rejected.
pub fn huff_report(
    scene: &Scene,
    profile: Option<&str>,
    kernel: Kernel,
    origin: (f64, f64),
    exponent: f64,
    positive_only: bool,
) -> Result<HuffReport> {
    let mut amenities = resolve_profile(scene, profile, kernel)?.amenities;
    if positive_only {
        amenities.retain(|a| a.attractiveness > 0.0);
    }
    Ok(HuffReport {
        origin,
        exponent,
        result: huff_probabilities_with_exponent(origin, &amenities, exponent)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PggReport {
    pub person: String,
    pub majority: String,
    pub summary: PggSummary,
}

/// PGG raster plus its signed summary. `majority` falls back to the scene's
/// designated majority, then to the baseline.
pub fn pgg_report(
    scene: &Scene,
    person: &str,
    majority: Option<&str>,
    kernel: Kernel,
    grid: &GridSpec,
) -> Result<(Raster, PggReport)> {
    let majority = majority.or(scene.majority_profile());
    let raster = pgg_field(scene, person, majority, kernel, grid)?;
    let report = PggReport {
        person: person.to_string(),
        majority: majority.unwrap_or(crate::scene::BASELINE).to_string(),
        summary: pgg_summary(&raster)?,
    };
    Ok((raster, report))
}

/// Benefit of a single amenity against distance, one curve per E.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurves {
    pub family: KernelFamily,
    pub attractiveness: f64,
    pub efficiencies: Vec<f64>,
    pub distances: Vec<f64>,
    /// `values[i][j]`: distance `i`, efficiency `j`.
    pub values: Vec<Vec<f64>>,
}

pub fn decay_curves(
    attractiveness: f64,
    efficiencies: &[f64],
    family: KernelFamily,
    d_max: f64,
    samples: usize,
) -> Result<DecayCurves> {
    if !attractiveness.is_finite() {
        return Err(Error::NonFiniteValue("curve attractiveness".into()));
    }
    if efficiencies.is_empty() {
        return Err(Error::NonPositiveEfficiency("empty efficiency list".into()));
    }
    if !(d_max.is_finite() && d_max > 0.0) {
        return Err(Error::NegativeDistance(d_max));
    }
    if samples < 2 {
        return Err(Error::InvalidResolution(samples));
    }
    let kernels = efficiencies
        .iter()
        .map(|&e| Kernel::new(family, e))
        .collect::<Result<Vec<_>>>()?;
    let distances: Vec<f64> = (0..samples)
        .map(|i| d_max * i as f64 / (samples - 1) as f64)
        .collect();
    let values = distances
        .iter()
        .map(|&d| kernels.iter().map(|k| k.eval(attractiveness, d)).collect())
        .collect();
    Ok(DecayCurves {
        family,
        attractiveness,
        efficiencies: efficiencies.to_vec(),
        distances,
        values,
    })
}

/// Header `d,E=<e1>,E=<e2>,...`, then one row per distance.
pub fn curves_to_csv(c: &DecayCurves) -> String {
    let mut out = String::from("d");
    for &e in &c.efficiencies {
        out.push_str(&format!(",E={}", fmt_f64(e)));
    }
    out.push('\n');
    for (d, row) in c.distances.iter().zip(&c.values) {
        out.push_str(&fmt_f64(*d));
        for v in row {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub efficiency: f64,
    pub u_all: Option<f64>,
    pub u_positive: Option<f64>,
    pub u_negative: Option<f64>,
    pub summary: SummaryStats,
}

/// Indicators of one scene across a list of E values. Profile attractiveness
/// overrides apply, but the swept E replaces any personal E.
pub fn sweep(
    scene: &Scene,
    profile: Option<&str>,
    family: KernelFamily,
    efficiencies: &[f64],
    grid: &GridSpec,
) -> Result<Vec<SweepRow>> {
    let placeholder = Kernel::new(family, 1.0)?;
    let amenities = resolve_profile(scene, profile, placeholder)?.amenities;
    efficiencies
        .iter()
        .map(|&e| {
            let kernel = Kernel::new(family, e)?;
            let field = evaluate_amenities(&amenities, &kernel, grid)?;
            let u = |s: Subset| uniformity(s.select(&field)).ok().map(|r| r.u);
            Ok(SweepRow {
                efficiency: e,
                u_all: u(Subset::All),
                u_positive: u(Subset::Positive),
                u_negative: u(Subset::Negative),
                summary: summary(&field.total)?,
            })
        })
        .collect()
}
