//! Scenario indicators: summary statistics, the Uniformity Coefficient and
//! Preference Gap Gain fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{evaluate_field, FieldRasters};
use crate::scene::{GridSpec, Kernel, Raster, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub total: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Compensated (Neumaier) sum.
fn accurate_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn summary(raster: &Raster) -> Result<SummaryStats> {
    summarize(raster.values())
}

pub(crate) fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::EmptyRaster);
    }
    let total = accurate_sum(values);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    let count = values.len();
    // rounding can push the mean just outside [min, max]
    let mean = (total / count as f64).clamp(min, max);
    Ok(SummaryStats {
        total,
        mean,
        min,
        max,
        count,
    })
}

/// Which part of a field a uniformity coefficient is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    All,
    Positive,
    Negative,
}

impl Subset {
    pub fn select(self, field: &FieldRasters) -> &Raster {
        match self {
            Subset::All => &field.total,
            Subset::Positive => &field.positive,
            Subset::Negative => &field.negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformityResult {
    pub u: f64,
    pub mean: f64,
    /// Population standard deviation (divides by m).
    pub stddev: f64,
    pub m: usize,
    /// Set when the mean is negative, e.g. a pure disamenity field. U is
    /// still `1 - sd / mean` with the signed mean and exceeds 1 there.
    pub negative_mean: bool,
}

/// Uniformity Coefficient `U = 1 - sd / mean` of a raster.
pub fn uniformity(raster: &Raster) -> Result<UniformityResult> {
    let values = raster.values();
    if values.is_empty() {
        return Err(Error::EmptyRaster);
    }
    // Shifting by the first value keeps constant rasters exact: every
    // deviation is then 0 and U is exactly 1.
    let m = values.len() as f64;
    let shift = values[0];
    let deltas: Vec<f64> = values.iter().map(|v| v - shift).collect();
    let mean_delta = accurate_sum(&deltas) / m;
    let mean = shift + mean_delta;
    if mean == 0.0 {
        return Err(Error::ZeroMean);
    }
    let sq: Vec<f64> = deltas
        .iter()
        .map(|d| {
            let dev = d - mean_delta;
            dev * dev
        })
        .collect();
    let stddev = (accurate_sum(&sq) / m).sqrt();
    Ok(UniformityResult {
        u: 1.0 - stddev / mean,
        mean,
        stddev,
        m: values.len(),
        negative_mean: mean < 0.0,
    })
}

pub fn uniformity_of(field: &FieldRasters, subset: Subset) -> Result<UniformityResult> {
    uniformity(subset.select(field))
}

/// Preference Gap Gain: the person's benefit field minus the majority's.
/// Positive cells are places the person values more than the majority does.
pub fn pgg_field(
    scene: &Scene,
    person: &str,
    majority: Option<&str>,
    kernel: Kernel,
    grid: &GridSpec,
) -> Result<Raster> {
    let mine = evaluate_field(scene, Some(person), kernel, grid)?;
    let theirs = evaluate_field(scene, majority, kernel, grid)?;
    mine.total.zip_with(&theirs.total, |a, b| a - b)
}

/// Signed breakdown of a PGG raster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PggSummary {
    pub stats: SummaryStats,
    pub gain_cells: usize,
    pub loss_cells: usize,
    pub neutral_cells: usize,
    pub gain_total: f64,
    pub loss_total: f64,
}

pub fn pgg_summary(pgg: &Raster) -> Result<PggSummary> {
    let stats = summary(pgg)?;
    let gains: Vec<f64> = pgg.values().iter().copied().filter(|&v| v > 0.0).collect();
    let losses: Vec<f64> = pgg.values().iter().copied().filter(|&v| v < 0.0).collect();
    Ok(PggSummary {
        stats,
        gain_cells: gains.len(),
        loss_cells: losses.len(),
        neutral_cells: stats.count - gains.len() - losses.len(),
        gain_total: accurate_sum(&gains),
        loss_total: accurate_sum(&losses),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::evaluate_amenities;
    use crate::scene::{Amenity, KernelFamily, Profile};
    use proptest::prelude::*;

    fn raster(values: &[f64]) -> Raster {
        let grid = GridSpec::new(0.0, 0.0, 1.0, values.len(), 1).unwrap();
        Raster::new(grid, values.to_vec()).unwrap()
    }

    fn pairwise(values: &[f64]) -> f64 {
        match values.len() {
            0 => 0.0,
            1 => values[0],
            n => pairwise(&values[..n / 2]) + pairwise(&values[n / 2..]),
        }
    }

    #[test]
    fn constant_raster_is_perfectly_uniform() {
        for c in [0.1, 1.0, 3.7, 1e6] {
            let u = uniformity(&raster(&[c; 37])).unwrap();
            assert_eq!(u.u, 1.0);
            assert_eq!(u.stddev, 0.0);
            assert_eq!(u.mean, c);
        }
    }

    #[test]
    fn one_two_three() {
        let u = uniformity(&raster(&[1.0, 2.0, 3.0])).unwrap();
        assert!((u.mean - 2.0).abs() < 1e-15);
        assert!((u.stddev - 0.816_496_580_927_726).abs() < 1e-12);
        assert!((u.u - 0.591_751_709_536_137).abs() < 1e-12);
        assert_eq!(u.m, 3);
        assert!(!u.negative_mean);
    }

    #[test]
    fn zero_mean_and_empty() {
        assert_eq!(uniformity(&raster(&[0.0; 4])), Err(Error::ZeroMean));
        assert_eq!(uniformity(&raster(&[-1.0, 1.0])), Err(Error::ZeroMean));
        assert_eq!(summarize(&[]), Err(Error::EmptyRaster));
    }

    #[test]
    fn negative_mean_is_flagged() {
        let u = uniformity(&raster(&[-1.0, -2.0, -3.0])).unwrap();
        assert!(u.negative_mean);
        assert!(u.u > 1.0);
    }

    #[test]
    fn summary_cases() {
        let s = summary(&raster(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!((s.total, s.mean, s.min, s.max, s.count), (6.0, 2.0, 1.0, 3.0, 3));
        let s = summary(&raster(&[2.5; 8])).unwrap();
        assert_eq!((s.total, s.min, s.max), (20.0, 2.5, 2.5));
        let s = summary(&raster(&[-5.0])).unwrap();
        assert_eq!((s.total, s.mean), (-5.0, -5.0));
    }

    fn pgg_scene() -> Scene {
        Scene::new(vec![
            Amenity::new("park", 2.0, 2.0, 3.0),
            Amenity::new("road", 6.0, 3.0, -1.0),
        ])
        .with_profile(Profile::new("same"))
        .with_profile(Profile::new("fan").override_attractiveness("park", 5.0))
        .with_profile(Profile::new("mover").efficiency(2.5))
    }

    #[test]
    fn pgg_identity_is_zero() {
        let grid = GridSpec::new(0.0, 0.0, 0.5, 17, 11).unwrap();
        let kernel = Kernel::new(KernelFamily::Rational, 1.0).unwrap();
        let z = pgg_field(&pgg_scene(), "same", None, kernel, &grid).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pgg_single_override_is_difference_amenity() {
        let grid = GridSpec::new(0.0, 0.0, 0.5, 17, 11).unwrap();
        let kernel = Kernel::new(KernelFamily::Rational, 1.0).unwrap();
        let p = pgg_field(&pgg_scene(), "fan", None, kernel, &grid).unwrap();
        let diff = evaluate_amenities(&[Amenity::new("d", 2.0, 2.0, 2.0)], &kernel, &grid).unwrap();
        for (a, b) in p.values().iter().zip(diff.total.values()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn pgg_personal_efficiency_zero_at_amenity() {
        let scene = Scene::new(vec![Amenity::new("p", 2.0, 2.0, 3.0)])
            .with_profile(Profile::new("mover").efficiency(2.5));
        let grid = GridSpec::new(0.0, 0.0, 0.5, 9, 9).unwrap();
        let kernel = Kernel::new(KernelFamily::Rational, 1.0).unwrap();
        let p = pgg_field(&scene, "mover", None, kernel, &grid).unwrap();
        assert_eq!(p.get(4, 4), 0.0);
        // two-field oracle
        let a = evaluate_field(&scene, Some("mover"), kernel, &grid).unwrap();
        let b = evaluate_field(&scene, None, kernel, &grid).unwrap();
        for (k, v) in p.values().iter().enumerate() {
            assert_eq!(*v, a.total.values()[k] - b.total.values()[k]);
            if k != grid.index(4, 4) {
                assert!(*v > 0.0);
            }
        }
    }

    #[test]
    fn pgg_antisymmetric() {
        let grid = GridSpec::new(0.0, 0.0, 0.5, 17, 11).unwrap();
        let kernel = Kernel::new(KernelFamily::Exponential, 0.7).unwrap();
        let s = pgg_scene();
        let a = pgg_field(&s, "fan", Some("mover"), kernel, &grid).unwrap();
        let b = pgg_field(&s, "mover", Some("fan"), kernel, &grid).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), (-y).to_bits());
        }
        let sm = pgg_summary(&a).unwrap();
        assert_eq!(sm.gain_cells + sm.loss_cells + sm.neutral_cells, grid.len());
        assert!(sm.gain_total >= 0.0 && sm.loss_total <= 0.0);
    }

    #[test]
    fn pgg_unknown_profile() {
        let grid = GridSpec::new(0.0, 0.0, 1.0, 2, 2).unwrap();
        let kernel = Kernel::new(KernelFamily::Rational, 1.0).unwrap();
        assert_eq!(
            pgg_field(&pgg_scene(), "who", None, kernel, &grid).unwrap_err(),
            Error::UnknownProfile("who".into())
        );
    }

    proptest! {
        #[test]
        fn u_scale_invariant(values in prop::collection::vec(0.01f64..100.0, 1..200)) {
            let base = uniformity(&raster(&values)).unwrap().u;
            for c in [0.5, 2.0, 10.0] {
                let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
                let u = uniformity(&raster(&scaled)).unwrap().u;
                prop_assert!((u - base).abs() < 1e-9);
            }
        }

        #[test]
        fn u_at_most_one_for_positive_mean(values in prop::collection::vec(-50.0f64..100.0, 1..200)) {
            let r = raster(&values);
            if let Ok(u) = uniformity(&r) {
                if u.mean > 0.0 {
                    prop_assert!(u.u <= 1.0);
                    let constant = values.iter().all(|&v| v == values[0]);
                    prop_assert_eq!(constant, (u.u - 1.0).abs() < 1e-12 && u.stddev == 0.0);
                }
            }
        }

        #[test]
        fn summary_matches_pairwise_oracle(values in prop::collection::vec(-1e3f64..1e3, 1..500)) {
            let s = summary(&raster(&values)).unwrap();
            let oracle = pairwise(&values);
            let scale: f64 = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
            prop_assert!((s.total - oracle).abs() <= 1e-9 * scale);
            prop_assert!(s.min <= s.mean && s.mean <= s.max);
            prop_assert!((s.total - s.mean * s.count as f64).abs() <= 1e-9 * scale);
        }
    }
}
