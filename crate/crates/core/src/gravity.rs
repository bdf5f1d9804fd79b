//! Gravity-model readings of an amenity set: Huff visit probabilities,
//! Reilly's breaking point, and the breaking point read off the benefit
//! surface as the lowest point between two amenities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::point_benefit;
use crate::scene::{Amenity, Kernel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuffResult {
    /// `(amenity id, probability)` in input order.
    pub probabilities: Vec<(String, f64)>,
}

impl HuffResult {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.probabilities
            .iter()
            .find(|(k, _)| k == id)
            .map(|&(_, p)| p)
    }
}

/// `P_j = (A_j / d_j) / sum_k (A_k / d_k)`.
pub fn huff_probabilities(origin: (f64, f64), amenities: &[Amenity]) -> Result<HuffResult> {
    huff_probabilities_with_exponent(origin, amenities, 1.0)
}

/// Huff probabilities with distance raised to `exponent`. An exponent of 1
/// is the plain ratio form; other values are an extension for sensitivity
/// runs.
pub fn huff_probabilities_with_exponent(
    origin: (f64, f64),
    amenities: &[Amenity],
    exponent: f64,
) -> Result<HuffResult> {
    if amenities.is_empty() {
        return Err(Error::EmptyChoiceSet);
    }
    if !exponent.is_finite() {
        return Err(Error::NonFiniteValue("Huff distance exponent".into()));
    }
    let mut weights = Vec::with_capacity(amenities.len());
    for a in amenities {
        if !(a.attractiveness > 0.0) {
            return Err(Error::NonPositiveAttractiveness(a.id.clone()));
        }
        let d = a.distance_to(origin.0, origin.1);
        if d == 0.0 {
            return Err(Error::OriginOnAmenity(a.id.clone()));
        }
        let w = if exponent == 1.0 {
            a.attractiveness / d
        } else {
            a.attractiveness / d.powf(exponent)
        };
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    Ok(HuffResult {
        probabilities: amenities
            .iter()
            .zip(weights)
            .map(|(a, w)| (a.id.clone(), w / total))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakPoint {
    pub position: (f64, f64),
    pub distance_from_1: f64,
    pub distance_from_2: f64,
    /// Benefit at the point; only the surface-minimum variant sets it.
    pub benefit_at_point: Option<f64>,
}

fn segment(a1: &Amenity, a2: &Amenity) -> Result<f64> {
    let d = a1.distance_to(a2.x, a2.y);
    if d == 0.0 {
        return Err(Error::CoincidentAmenities(a1.id.clone(), a2.id.clone()));
    }
    Ok(d)
}

/// Reilly's breaking point `Br = d / (1 + sqrt(A1 / A2))`, measured from
/// amenity 2. With `A1 > A2` the boundary sits nearer the weaker amenity 2.
pub fn reilly_breakpoint(a1: &Amenity, a2: &Amenity) -> Result<BreakPoint> {
    for a in [a1, a2] {
        if !(a.attractiveness > 0.0) {
            return Err(Error::NonPositiveAttractiveness(a.id.clone()));
        }
    }
    let d = segment(a1, a2)?;
    let br = d / (1.0 + (a1.attractiveness / a2.attractiveness).sqrt());
    let t = br / d;
    Ok(BreakPoint {
        position: (a2.x * (1.0 - t) + a1.x * t, a2.y * (1.0 - t) + a1.y * t),
        distance_from_1: d - br,
        distance_from_2: br,
        benefit_at_point: None,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[lo, hi]` until the bracket is narrower than
/// `tol`. Returns the best evaluated `(x, f(x))`.
pub(crate) fn golden_section(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    [(x1, f1), (x2, f2), (mid, fm)]
        .into_iter()
        .fold((mid, fm), |best, c| if c.1 < best.1 { c } else { best })
}

/// Breaking point as the minimum of the benefit surface on the open segment
/// between two amenities.
///
/// The segment is sampled at `resolution` interior points; every sampled
/// local minimum is refined by golden-section search to within `d / 1e6`
/// and the lowest interior result wins. `context` adds further amenities to
/// the benefit sum (entries sharing an id with the pair are skipped).
pub fn numeric_breakpoint(
    a1: &Amenity,
    a2: &Amenity,
    kernel: &Kernel,
    context: Option<&[Amenity]>,
    resolution: usize,
) -> Result<BreakPoint> {
    if resolution < 3 {
        return Err(Error::InvalidResolution(resolution));
    }
    let d = segment(a1, a2)?;
    let mut set = vec![a1.clone(), a2.clone()];
    if let Some(ctx) = context {
        set.extend(
            ctx.iter()
                .filter(|a| a.id != a1.id && a.id != a2.id)
                .cloned(),
        );
    }
    let (ux, uy) = ((a2.x - a1.x) / d, (a2.y - a1.y) / d);
    let at = |s: f64| (a1.x + ux * s, a1.y + uy * s);
    let benefit = |s: f64| {
        let (x, y) = at(s);
        point_benefit(&set, kernel, x, y).total
    };

    let step = d / (resolution + 1) as f64;
    let samples: Vec<f64> = (0..=resolution + 1)
        .map(|k| if k == resolution + 1 { d } else { k as f64 * step })
        .collect();
    let values: Vec<f64> = samples.iter().map(|&s| benefit(s)).collect();

    let tol = d * 1e-6;
    let mut best: Option<(f64, f64)> = None;
    for k in 1..=resolution {
        if values[k] > values[k - 1] || values[k] > values[k + 1] {
            continue;
        }
        let (s, v) = golden_section(&benefit, samples[k - 1], samples[k + 1], tol);
        // keep the sample if refinement did not improve on it
        let (s, v) = if v <= values[k] { (s, v) } else { (samples[k], values[k]) };
        if s <= tol || s >= d - tol {
            continue;
        }
        if best.map_or(true, |(_, bv)| v < bv) {
            best = Some((s, v));
        }
    }
    let (s, v) = best.ok_or(Error::NoInteriorMinimum)?;
    // A lower sample can only sit on a run that keeps falling into an
    // endpoint, so the segment has no interior minimum.
    if values[1..=resolution].iter().any(|&x| x < v) {
        return Err(Error::NoInteriorMinimum);
    }
    Ok(BreakPoint {
        position: at(s),
        distance_from_1: s,
        distance_from_2: d - s,
        benefit_at_point: Some(v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::KernelFamily::{self, *};
    use proptest::prelude::*;

    fn am(id: &str, x: f64, y: f64, a: f64) -> Amenity {
        Amenity::new(id, x, y, a)
    }

    #[test]
    fn huff_cases() {
        let one = huff_probabilities((0.0, 0.0), &[am("a", 3.0, 4.0, 2.0)]).unwrap();
        assert_eq!(one.probabilities, vec![("a".to_string(), 1.0)]);

        let sym = huff_probabilities((0.0, 0.0), &[am("a", 1.0, 0.0, 2.0), am("b", -1.0, 0.0, 2.0)])
            .unwrap();
        assert_eq!(sym.get("a"), Some(0.5));
        assert_eq!(sym.get("b"), Some(0.5));

        let r = huff_probabilities((0.0, 0.0), &[am("a", 2.0, 0.0, 4.0), am("b", 0.0, 1.0, 1.0)])
            .unwrap();
        assert!((r.get("a").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.get("b").unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn huff_errors() {
        assert_eq!(huff_probabilities((0.0, 0.0), &[]), Err(Error::EmptyChoiceSet));
        assert_eq!(
            huff_probabilities((1.0, 1.0), &[am("a", 1.0, 1.0, 1.0)]),
            Err(Error::OriginOnAmenity("a".into()))
        );
        assert_eq!(
            huff_probabilities((0.0, 0.0), &[am("a", 1.0, 1.0, 1.0), am("b", 2.0, 1.0, -1.0)]),
            Err(Error::NonPositiveAttractiveness("b".into()))
        );
    }

    #[test]
    fn huff_exponent_one_matches_plain() {
        let set = [am("a", 2.0, 0.0, 4.0), am("b", 0.0, 1.0, 1.0), am("c", -3.0, -1.0, 2.0)];
        let plain = huff_probabilities((0.2, 0.1), &set).unwrap();
        let ext = huff_probabilities_with_exponent((0.2, 0.1), &set, 1.0).unwrap();
        assert_eq!(plain, ext);
        let sq = huff_probabilities_with_exponent((0.2, 0.1), &set, 2.0).unwrap();
        // nearer amenity gains share under a stronger distance penalty
        assert!(sq.get("b").unwrap() > plain.get("b").unwrap());
    }

    #[test]
    fn reilly_cases() {
        let b = reilly_breakpoint(&am("1", 0.0, 0.0, 2.0), &am("2", 10.0, 0.0, 2.0)).unwrap();
        assert_eq!(b.distance_from_2, 5.0);
        assert_eq!(b.position, (5.0, 0.0));

        let b = reilly_breakpoint(&am("1", 0.0, 0.0, 4.0), &am("2", 3.0, 0.0, 1.0)).unwrap();
        assert!((b.distance_from_2 - 1.0).abs() < 1e-12);
        assert!((b.distance_from_1 - 2.0).abs() < 1e-12);
        assert!((b.position.0 - 2.0).abs() < 1e-12);
        let rev = reilly_breakpoint(&am("2", 3.0, 0.0, 1.0), &am("1", 0.0, 0.0, 4.0)).unwrap();
        assert!((b.distance_from_2 + rev.distance_from_2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reilly_errors() {
        assert_eq!(
            reilly_breakpoint(&am("1", 0.0, 0.0, 1.0), &am("2", 0.0, 0.0, 1.0)),
            Err(Error::CoincidentAmenities("1".into(), "2".into()))
        );
        assert_eq!(
            reilly_breakpoint(&am("1", 0.0, 0.0, 0.0), &am("2", 1.0, 0.0, 1.0)),
            Err(Error::NonPositiveAttractiveness("1".into()))
        );
    }

    fn kern(f: KernelFamily, e: f64) -> Kernel {
        Kernel::new(f, e).unwrap()
    }

    fn dense_argmin(a1: &Amenity, a2: &Amenity, kernel: &Kernel, n: usize) -> (usize, f64) {
        let d = a1.distance_to(a2.x, a2.y);
        let mut best = (0, f64::INFINITY, 0.0);
        for k in 1..n {
            let s = d * k as f64 / n as f64;
            let t = s / d;
            let (x, y) = (a1.x + (a2.x - a1.x) * t, a1.y + (a2.y - a1.y) * t);
            let v = kernel.eval(a1.attractiveness, a1.distance_to(x, y))
                + kernel.eval(a2.attractiveness, a2.distance_to(x, y));
            if v < best.1 {
                best = (k, v, s);
            }
        }
        (best.0, best.2)
    }

    #[test]
    fn numeric_symmetric_pair_at_midpoint() {
        for f in KernelFamily::ALL {
            let e = if f == Rational { 1.0 } else { 0.2 };
            let b = numeric_breakpoint(&am("1", 0.0, 0.0, 3.0), &am("2", 6.0, 8.0, 3.0), &kern(f, e), None, 101)
                .unwrap();
            assert!((b.distance_from_1 - 5.0).abs() < 1e-5, "{f}: {b:?}");
            assert!((b.position.0 - 3.0).abs() < 1e-5 && (b.position.1 - 4.0).abs() < 1e-5);
        }
    }

    #[test]
    fn numeric_matches_dense_oracle() {
        let a1 = am("1", 0.0, 0.0, 3.0);
        let a2 = am("2", 10.0, 0.0, 1.0);
        let k = kern(Rational, 1.0);
        let b = numeric_breakpoint(&a1, &a2, &k, None, 50).unwrap();
        let (_, s) = dense_argmin(&a1, &a2, &k, 1_000_000);
        assert!((b.distance_from_1 - s).abs() < 10.0 / 1e5);
        // closed form for this pair
        assert!((b.distance_from_1 - 6.607_695_154_586_736).abs() < 1e-4);
        assert_eq!(b.distance_from_1 + b.distance_from_2, 10.0);
    }

    #[test]
    fn numeric_disamenity_has_no_interior_minimum() {
        let a1 = am("1", 0.0, 0.0, -2.0);
        let a2 = am("2", 5.0, 0.0, 3.0);
        let k = kern(Exponential, 0.5);
        let (idx, _) = dense_argmin(&a1, &a2, &k, 100_000);
        assert_eq!(idx, 1, "oracle: minimum sits against the disamenity");
        assert_eq!(
            numeric_breakpoint(&a1, &a2, &k, None, 99),
            Err(Error::NoInteriorMinimum)
        );
    }

    #[test]
    fn numeric_context_shifts_minimum() {
        let a1 = am("1", 0.0, 0.0, 2.0);
        let a2 = am("2", 10.0, 0.0, 2.0);
        let k = kern(Rational, 1.0);
        let plain = numeric_breakpoint(&a1, &a2, &k, None, 201).unwrap();
        let ctx = [a1.clone(), a2.clone(), am("3", 3.0, 1.0, 2.0)];
        let with = numeric_breakpoint(&a1, &a2, &k, Some(&ctx), 201).unwrap();
        assert!(with.distance_from_1 > plain.distance_from_1);
        assert!(with.benefit_at_point.unwrap() > plain.benefit_at_point.unwrap());
    }

    #[test]
    fn numeric_errors() {
        let k = kern(Rational, 1.0);
        let a = am("1", 0.0, 0.0, 1.0);
        assert_eq!(
            numeric_breakpoint(&a, &am("2", 1.0, 0.0, 1.0), &k, None, 2),
            Err(Error::InvalidResolution(2))
        );
        assert!(matches!(
            numeric_breakpoint(&a, &am("2", 0.0, 0.0, 1.0), &k, None, 10),
            Err(Error::CoincidentAmenities(..))
        ));
    }

    #[test]
    fn golden_section_quadratic() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn huff_sums_to_one(
            pts in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0, 0.01f64..50.0), 1..50),
            ox in -100.0f64..100.0, oy in -100.0f64..100.0,
        ) {
            let set: Vec<_> = pts.iter().enumerate().map(|(i, &(x, y, a))| am(&i.to_string(), x, y, a)).collect();
            if let Ok(r) = huff_probabilities((ox, oy), &set) {
                let s: f64 = r.probabilities.iter().map(|p| p.1).sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                prop_assert!(r.probabilities.iter().all(|p| (0.0..=1.0).contains(&p.1)));
            }
        }

        #[test]
        fn reilly_complementary_and_monotone(a1 in 0.01f64..100.0, a2 in 0.01f64..100.0, d in 0.1f64..1e3) {
            let p = am("1", 0.0, 0.0, a1);
            let q = am("2", d, 0.0, a2);
            let fwd = reilly_breakpoint(&p, &q).unwrap();
            let back = reilly_breakpoint(&q, &p).unwrap();
            prop_assert!((fwd.distance_from_2 + back.distance_from_2 - d).abs() <= 1e-12 * d);
            prop_assert!((fwd.distance_from_1 + fwd.distance_from_2 - d).abs() <= 1e-9);
            let stronger = reilly_breakpoint(&am("1", 0.0, 0.0, a1 * 1.5), &q).unwrap();
            prop_assert!(stronger.distance_from_2 < fwd.distance_from_2);
        }

        #[test]
        fn numeric_is_segment_minimum(
            fam in 0usize..3, e in 0.05f64..3.0, d in 1.0f64..12.0,
            a1 in 0.2f64..5.0, a2 in 0.2f64..5.0, res in 3usize..200,
        ) {
            let k = kern(KernelFamily::ALL[fam], e);
            let (p, q) = (am("1", 0.0, 0.0, a1), am("2", d, 0.0, a2));
            if let Ok(b) = numeric_breakpoint(&p, &q, &k, None, res) {
                prop_assert!(b.distance_from_1 > 0.0 && b.distance_from_2 > 0.0);
                let v = b.benefit_at_point.unwrap();
                for i in 1..=res {
                    let s = d * i as f64 / (res + 1) as f64;
                    let f = k.eval(a1, s) + k.eval(a2, d - s);
                    prop_assert!(v <= f, "sample {s} has {f} below {v}");
                }
            }
        }
    }
}
