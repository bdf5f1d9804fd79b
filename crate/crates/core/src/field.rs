//! Benefit of points and grids: the kernel-decayed attractiveness of every
//! amenity, summed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scene::{resolve_profile, Amenity, GridSpec, Kernel, Raster, Scene};

/// Benefit one amenity of attractiveness `a` gives at distance `d`.
pub fn kernel_benefit(a: f64, d: f64, kernel: &Kernel) -> Result<f64> {
    if d < 0.0 || d.is_nan() {
        return Err(Error::NegativeDistance(d));
    }
    Ok(kernel.eval(a, d))
}

/// Aggregate benefit at a point, split by the sign of each contributor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointBenefit {
    pub total: f64,
    pub positive_part: f64,
    pub negative_part: f64,
}

/// Sums contributions in amenity order so results are reproducible bit for bit.
pub fn point_benefit(amenities: &[Amenity], kernel: &Kernel, x: f64, y: f64) -> PointBenefit {
    let mut out = PointBenefit::default();
    for a in amenities {
        let b = kernel.eval(a.attractiveness, a.distance_to(x, y));
        out.total += b;
        if a.attractiveness > 0.0 {
            out.positive_part += b;
        } else if a.attractiveness < 0.0 {
            out.negative_part += b;
        }
    }
    out
}

/// Total benefit raster plus its amenity-only and disamenity-only parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRasters {
    pub total: Raster,
    pub positive: Raster,
    pub negative: Raster,
}

/// Evaluates the field of an already-resolved amenity list.
///
/// Rows are computed in parallel; every cell is a pure function of its
/// centre, so the output does not depend on scheduling.
pub fn evaluate_amenities(
    amenities: &[Amenity],
    kernel: &Kernel,
    grid: &GridSpec,
) -> Result<FieldRasters> {
    grid.validate()?;
    let n = grid.len();
    let mut total = vec![0.0; n];
    let mut positive = vec![0.0; n];
    let mut negative = vec![0.0; n];
    total
        .par_chunks_mut(grid.ncols)
        .zip(positive.par_chunks_mut(grid.ncols))
        .zip(negative.par_chunks_mut(grid.ncols))
        .enumerate()
        .for_each(|(row, ((t, p), q))| {
            let y = grid.y(row);
            for col in 0..grid.ncols {
                let b = point_benefit(amenities, kernel, grid.x(col), y);
                t[col] = b.total;
                p[col] = b.positive_part;
                q[col] = b.negative_part;
            }
        });
    Ok(FieldRasters {
        total: Raster::new(*grid, total)?,
        positive: Raster::new(*grid, positive)?,
        negative: Raster::new(*grid, negative)?,
    })
}

/// Benefit field of a scene under an optional profile.
pub fn evaluate_field(
    scene: &Scene,
    profile: Option<&str>,
    kernel: Kernel,
    grid: &GridSpec,
) -> Result<FieldRasters> {
    let resolved = resolve_profile(scene, profile, kernel)?;
    evaluate_amenities(&resolved.amenities, &resolved.kernel, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::KernelFamily::{self, *};
    use proptest::prelude::*;

    fn k(family: KernelFamily, e: f64) -> Kernel {
        Kernel::new(family, e).unwrap()
    }

    #[test]
    fn zero_distance_returns_attractiveness() {
        for f in KernelFamily::ALL {
            for e in [0.1, 1.0, 7.5] {
                assert_eq!(kernel_benefit(3.0, 0.0, &k(f, e)).unwrap(), 3.0);
            }
        }
    }

    #[test]
    fn spot_values() {
        assert_eq!(kernel_benefit(3.0, 2.0, &k(Rational, 2.0)).unwrap(), 1.5);
        let g = kernel_benefit(3.0, 1.0, &k(Gaussian, 0.5)).unwrap();
        assert!((g - 1.819_591_979_137_900_3).abs() < 1e-12);
        let x = kernel_benefit(-2.0, 1.0, &k(Exponential, 1.0)).unwrap();
        assert!((x - -0.735_758_882_342_884_7).abs() < 1e-12);
    }

    #[test]
    fn negative_distance_rejected() {
        assert_eq!(
            kernel_benefit(1.0, -0.5, &k(Rational, 1.0)),
            Err(Error::NegativeDistance(-0.5))
        );
    }

    #[test]
    fn point_benefit_cases() {
        let kr = k(Rational, 1.0);
        assert_eq!(point_benefit(&[], &kr, 4.0, 2.0), PointBenefit::default());
        let one = [Amenity::new("a", 1.0, 1.0, 3.0)];
        assert_eq!(point_benefit(&one, &kr, 1.0, 1.0).total, 3.0);

        // both at d = E
        let kr2 = k(Rational, 2.0);
        let two = [
            Amenity::new("a", 2.0, 0.0, 3.0),
            Amenity::new("b", 0.0, 2.0, -1.0),
        ];
        let b = point_benefit(&two, &kr2, 0.0, 0.0);
        assert_eq!(b.total, 1.0);
        assert_eq!(b.positive_part, 1.5);
        assert_eq!(b.negative_part, -0.5);
    }

    #[test]
    fn three_by_three_ring_values() {
        let grid = GridSpec::new(0.0, 0.0, 1.0, 3, 3).unwrap();
        let scene = Scene::new(vec![Amenity::new("c", 1.0, 1.0, 3.0)]);
        let f = evaluate_field(&scene, None, k(Rational, 1.0), &grid).unwrap();
        let corner = 3.0 / (1.0 + 2f64.sqrt());
        assert!((corner - 1.242_640_687_119_285_2).abs() < 1e-15);
        for (col, row) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
            assert!((f.total.get(col, row) - corner).abs() < 1e-12);
        }
        for (col, row) in [(1, 0), (0, 1), (2, 1), (1, 2)] {
            assert_eq!(f.total.get(col, row), 1.5);
        }
        assert_eq!(f.total.get(1, 1), 3.0);
        assert!(f.negative.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn values_decrease_with_ring_distance() {
        let grid = GridSpec::new(-5.0, -5.0, 1.0, 11, 11).unwrap();
        let scene = Scene::new(vec![Amenity::new("c", 0.0, 0.0, 2.0)]);
        let f = evaluate_field(&scene, None, k(Rational, 1.5), &grid).unwrap();
        let centre = f.total.get(5, 5);
        assert_eq!(centre, 2.0);
        for ring in 1..5 {
            let inner = f.total.get(5 + ring, 5);
            let outer = f.total.get(5 + ring + 1, 5);
            assert!(outer < inner);
        }
        assert_eq!(
            f.total.values().iter().cloned().fold(f64::MIN, f64::max),
            centre
        );
    }

    #[test]
    fn negated_scene_negates_field() {
        let grid = GridSpec::new(0.0, 0.0, 0.7, 9, 6).unwrap();
        let am = vec![
            Amenity::new("a", 1.0, 1.0, 3.0),
            Amenity::new("b", 4.0, 2.0, -1.5),
            Amenity::new("c", 2.5, 3.0, 0.8),
        ];
        let neg: Vec<_> = am
            .iter()
            .map(|a| Amenity::new(a.id.clone(), a.x, a.y, -a.attractiveness))
            .collect();
        for f in KernelFamily::ALL {
            let kk = k(f, 0.9);
            let p = evaluate_amenities(&am, &kk, &grid).unwrap();
            let n = evaluate_amenities(&neg, &kk, &grid).unwrap();
            for (a, b) in p.total.values().iter().zip(n.total.values()) {
                assert_eq!(*a, -*b);
            }
            assert_eq!(p.positive.values(), n.negative.map(|v| -v).unwrap().values());
        }
    }

    #[test]
    fn parallel_matches_sequential_bits() {
        let grid = GridSpec::new(-3.0, -2.0, 0.13, 47, 31).unwrap();
        let am = vec![
            Amenity::new("a", 0.3, 0.1, 2.0),
            Amenity::new("b", -1.0, 1.7, -0.4),
            Amenity::new("c", 2.2, -0.9, 1.1),
        ];
        let kk = k(Gaussian, 0.6);
        let f = evaluate_amenities(&am, &kk, &grid).unwrap();
        // reverse cell order, one point at a time
        for row in (0..grid.nrows).rev() {
            for col in (0..grid.ncols).rev() {
                let (x, y) = grid.center(col, row);
                let b = point_benefit(&am, &kk, x, y);
                assert_eq!(f.total.get(col, row).to_bits(), b.total.to_bits());
            }
        }
    }

    #[test]
    fn unknown_profile_propagates() {
        let grid = GridSpec::new(0.0, 0.0, 1.0, 2, 2).unwrap();
        let scene = Scene::new(vec![Amenity::new("a", 0.0, 0.0, 1.0)]);
        assert_eq!(
            evaluate_field(&scene, Some("nope"), k(Rational, 1.0), &grid).unwrap_err(),
            Error::UnknownProfile("nope".into())
        );
    }

    fn family() -> impl Strategy<Value = KernelFamily> {
        prop_oneof![Just(Rational), Just(Gaussian), Just(Exponential)]
    }

    proptest! {
        #[test]
        fn strictly_decreasing_in_distance(
            f in family(), a in 0.01f64..100.0, e in 0.05f64..5.0,
            d in 0.0f64..3.0, step in 1e-3f64..1.0,
        ) {
            let kk = k(f, e);
            let near = kernel_benefit(a, d, &kk).unwrap();
            let far = kernel_benefit(a, d + step, &kk).unwrap();
            prop_assert!(far < near);
        }

        #[test]
        fn positive_attractiveness_bounded(
            f in family(), a in 0.01f64..100.0, e in 0.05f64..5.0, d in 0.0f64..50.0,
        ) {
            let b = kernel_benefit(a, d, &k(f, e)).unwrap();
            prop_assert!(b <= a);
            if f == Rational {
                prop_assert!(b > 0.0);
            } else {
                prop_assert!(b >= 0.0);
            }
        }

        #[test]
        fn parts_sum_to_total(
            pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -5.0f64..5.0), 0..20),
            x in -10.0f64..10.0, y in -10.0f64..10.0, f in family(), e in 0.1f64..3.0,
        ) {
            let am: Vec<_> = pts.iter().enumerate()
                .map(|(i, &(ax, ay, a))| Amenity::new(i.to_string(), ax, ay, a)).collect();
            let b = point_benefit(&am, &k(f, e), x, y);
            let scale: f64 = 1.0 + b.positive_part.abs() - b.negative_part;
            prop_assert!((b.total - (b.positive_part + b.negative_part)).abs() <= 1e-12 * scale);
        }
    }
}
