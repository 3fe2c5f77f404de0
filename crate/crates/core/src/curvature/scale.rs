use std::cmp::Ordering;

use super::estimate::CurvatureEstimate;
use crate::error::{Error, Result};
use crate::geometry::BinaryMask;

pub const DEFAULT_ALPHA: f64 = 3.5;
/// Diagonal of the mask size the default pyramid is tuned for.
pub const REFERENCE_DIAGONAL: f64 = 448.0 * std::f64::consts::SQRT_2;

const DEFAULT_SCALES: [f64; 8] = [5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 60.0, 80.0];

pub fn default_pyramid() -> Vec<f64> {
    DEFAULT_SCALES.to_vec()
}

/// Rescales `pyramid` in proportion to the mask diagonal, keeping every
/// level at or above the minimum observation scale.
pub fn scaled_pyramid(pyramid: &[f64], mask: &BinaryMask) -> Vec<f64> {
    let factor = mask.diagonal() / REFERENCE_DIAGONAL;
    let mut out: Vec<f64> = pyramid.iter().map(|s| (s * factor).max(3.0)).collect();
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    out
}

/// Picks the estimate whose ratio `s / r` is closest to `alpha`.
///
/// Ties go to the smaller scale, then to the lexicographically smaller point,
/// so the result does not depend on the order of `pyramid`.
pub fn motion_functional_scale(pyramid: &[CurvatureEstimate], alpha: f64) -> Result<CurvatureEstimate> {
    let key = |e: &CurvatureEstimate| (e.scale.radius() / e.radius_of_curvature - alpha).abs();
    pyramid
        .iter()
        .min_by(|a, b| {
            key(a)
                .total_cmp(&key(b))
                .then(a.scale.radius().total_cmp(&b.scale.radius()))
                .then(a.point.y.total_cmp(&b.point.y))
                .then(a.point.x.total_cmp(&b.point.x))
                .then(a.radius_of_curvature.total_cmp(&b.radius_of_curvature))
                .then_with(|| a.residual.partial_cmp(&b.residual).unwrap_or(Ordering::Equal))
        })
        .copied()
        .ok_or_else(|| Error::Validation("empty curvature pyramid".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{CurvatureSign, ObservationScale};
    use crate::geometry::Point2;
    use proptest::prelude::*;

    fn entry(s: f64, r: f64) -> CurvatureEstimate {
        CurvatureEstimate {
            point: Point2::new(0.0, 0.0),
            a: -0.5 / r,
            kappa: 1.0 / r,
            radius_of_curvature: r,
            sign: CurvatureSign::Convex,
            normal: Point2::new(0.0, -1.0),
            tangent: Point2::new(-1.0, 0.0),
            scale: ObservationScale::new(s).unwrap(),
            residual: 0.0,
            support_count: 10,
        }
    }

    #[test]
    fn picks_ratio_nearest_alpha() {
        let p = [entry(5.0, 10.0), entry(15.0, 4.3), entry(30.0, 5.0)];
        assert_eq!(motion_functional_scale(&p, DEFAULT_ALPHA).unwrap().scale.radius(), 15.0);
        assert_eq!(motion_functional_scale(&p[..1], DEFAULT_ALPHA).unwrap().scale.radius(), 5.0);
        assert!(motion_functional_scale(&[], DEFAULT_ALPHA).is_err());
    }

    #[test]
    fn ties_prefer_smaller_scale() {
        let q = [entry(12.0, 4.0), entry(8.0, 2.0)];
        // 12/4 = 3.0 and 8/2 = 4.0 are both 0.5 from 3.5.
        assert_eq!(motion_functional_scale(&q, DEFAULT_ALPHA).unwrap().scale.radius(), 8.0);
    }

    #[test]
    fn pyramid_scaling() {
        let small = BinaryMask::empty(112, 112).unwrap();
        let scaled = scaled_pyramid(&default_pyramid(), &small);
        assert!(scaled.iter().all(|s| *s >= 3.0));
        assert!((scaled.last().unwrap() - 20.0).abs() < 1e-9);
        let full = BinaryMask::empty(448, 448).unwrap();
        for (a, b) in scaled_pyramid(&default_pyramid(), &full).iter().zip(default_pyramid()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn order_invariant(entries in prop::collection::vec((3.0f64..100.0, 0.5f64..200.0), 1..10), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let p: Vec<CurvatureEstimate> = entries.iter().map(|&(s, r)| entry(s, r)).collect();
            let mut q = p.clone();
            q.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(motion_functional_scale(&p, 3.5).unwrap(), motion_functional_scale(&q, 3.5).unwrap());
        }
    }
}
