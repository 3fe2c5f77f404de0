use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimate::{estimate_curvature, estimate_from_points, CurvatureEstimate, CurvatureSign, ObservationScale};
use super::scale::motion_functional_scale;
use super::suppress::suppress_irrelevant;
use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, EdgePointSet, Point2};

/// Two-pass estimate: fit once, drop edge points from other surfaces, refit.
///
/// Falls back to the first pass when suppression leaves nothing usable.
pub fn estimate_suppressed(
    mask: &BinaryMask,
    edges: &EdgePointSet,
    c: Point2,
    s: ObservationScale,
    delta: f64,
) -> Result<CurvatureEstimate> {
    let first = estimate_curvature(edges, c, s, mask)?;
    let kept = match suppress_irrelevant(mask, edges, c, &first, delta) {
        Ok(kept) => kept,
        Err(Error::EmptySelection) => return Ok(first),
        Err(e) => return Err(e),
    };
    match estimate_from_points(kept.points(), c, s, mask) {
        Ok(second) => Ok(second),
        Err(Error::InsufficientSupport { .. }) | Err(Error::DegenerateFit) => Ok(first),
        Err(e) => Err(e),
    }
}

/// Finds the edge point nearest `candidate` (within the scale) whose
/// suppressed estimate has `required` sign.
pub fn refine_convexity(
    mask: &BinaryMask,
    edges: &EdgePointSet,
    candidate: Point2,
    required: CurvatureSign,
    s: ObservationScale,
    delta: f64,
) -> Result<Point2> {
    let start = edges.nearest(candidate).ok_or(Error::EmptySelection)?;
    if let Ok(e) = estimate_suppressed(mask, edges, start, s, delta) {
        if e.sign == required {
            return Ok(candidate);
        }
    }
    let mut region: Vec<(f64, Point2)> =
        edges.within(candidate, s.radius()).into_iter().map(|p| (p.distance(candidate), p)).collect();
    region.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, p) in region {
        if p == start {
            continue;
        }
        if let Ok(e) = estimate_suppressed(mask, edges, p, s, delta) {
            if e.sign == required {
                return Ok(p);
            }
        }
    }
    Err(Error::NoMatchingConvexity)
}

/// Full pipeline at one query point: every pyramid level is snapped to the
/// contour, optionally pushed to the required convexity, estimated with
/// suppression, and the motion functional scale is chosen among the levels
/// that succeed.
pub fn multiscale_estimate(
    mask: &BinaryMask,
    edges: &EdgePointSet,
    point: Point2,
    pyramid: &[f64],
    alpha: f64,
    delta: f64,
    required: Option<CurvatureSign>,
) -> Result<CurvatureEstimate> {
    let start = edges.nearest(point).ok_or(Error::EmptySelection)?;
    let levels: Vec<Option<CurvatureEstimate>> = pyramid
        .par_iter()
        .map(|&radius| {
            let s = ObservationScale::new(radius).ok()?;
            let c = match required {
                Some(sign) => {
                    let p = refine_convexity(mask, edges, start, sign, s, delta).ok()?;
                    edges.nearest(p)?
                }
                None => start,
            };
            let e = estimate_suppressed(mask, edges, c, s, delta).ok()?;
            match required {
                Some(sign) if e.sign != sign => None,
                _ => Some(e),
            }
        })
        .collect();
    let levels: Vec<CurvatureEstimate> = levels.into_iter().flatten().collect();
    if levels.is_empty() {
        return Err(if required.is_some() { Error::NoMatchingConvexity } else { Error::InsufficientSupport { found: 0 } });
    }
    motion_functional_scale(&levels, alpha)
}

/// Tool and object geometry at one pair of contact points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactPair {
    pub tool_point: CurvatureEstimate,
    pub object_point: CurvatureEstimate,
}

impl ContactPair {
    pub fn new(tool_point: CurvatureEstimate, object_point: CurvatureEstimate) -> Result<Self> {
        if !tool_point.sign.compatible(object_point.sign) {
            return Err(Error::Validation("two concave surfaces cannot make contact".into()));
        }
        if tool_point.support_count < 5 || object_point.support_count < 5 {
            return Err(Error::InsufficientSupport { found: tool_point.support_count.min(object_point.support_count) });
        }
        Ok(Self { tool_point, object_point })
    }

    pub fn radius_ratio(&self) -> f64 {
        self.tool_point.radius_of_curvature / self.object_point.radius_of_curvature
    }
}

/// Absolute difference of the tool-to-object radius ratios.
pub fn local_score(reference: &ContactPair, target: &ContactPair) -> f64 {
    (reference.radius_ratio() - target.radius_ratio()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{extract_edges, Similarity2};
    use crate::shapes::{Hook, Shape};

    fn disk_mask(r: f64) -> BinaryMask {
        let side = (2.0 * r + 20.0).ceil() as usize;
        let c = Point2::new(side as f64 / 2.0, side as f64 / 2.0);
        Shape::Disk { center: c, radius: r }.rasterize(side, side, &Similarity2::identity()).unwrap()
    }

    #[test]
    fn convex_candidate_unchanged() {
        let mask = disk_mask(25.0);
        let edges = extract_edges(&mask).unwrap();
        let c = edges.points()[3];
        let s = ObservationScale::new(15.0).unwrap();
        assert_eq!(refine_convexity(&mask, &edges, c, CurvatureSign::Convex, s, 2.0).unwrap(), c);
    }

    #[test]
    fn disk_has_no_concave_point() {
        let mask = disk_mask(25.0);
        let edges = extract_edges(&mask).unwrap();
        let s = ObservationScale::new(15.0).unwrap();
        let r = refine_convexity(&mask, &edges, edges.points()[0], CurvatureSign::Concave, s, 2.0);
        assert!(matches!(r, Err(Error::NoMatchingConvexity)));
    }

    #[test]
    fn hook_outer_bend_moves_to_inner_bend() {
        let hook = Hook { inner_radius: 12.0, thickness: 7.0, shaft_length: 60.0, tip_length: 10.0 };
        let pose = Similarity2::translation(60.0, 40.0);
        let mask = hook.shape().rasterize(120, 120, &pose).unwrap();
        let edges = extract_edges(&mask).unwrap();
        let outer = pose.apply(hook.outer_contact());
        let inner = pose.apply(hook.inner_contact());
        let s = ObservationScale::new(12.0).unwrap();
        let p = refine_convexity(&mask, &edges, outer, CurvatureSign::Concave, s, 2.0).unwrap();
        assert!(p.distance(outer) <= 12.0);
        let bend = pose.apply(Point2::new(0.0, 0.0));
        assert!((p.distance(bend) - hook.inner_radius).abs() <= 2.0, "{p:?} not on inner bend near {inner:?}");
    }

    #[test]
    fn local_score_formula() {
        let mask = disk_mask(20.0);
        let edges = extract_edges(&mask).unwrap();
        let s = ObservationScale::new(10.0).unwrap();
        let e = estimate_curvature(&edges, edges.points()[0], s, &mask).unwrap();
        let mut a = e;
        let mut b = e;
        a.radius_of_curvature = 10.0;
        b.radius_of_curvature = 5.0;
        let reference = ContactPair::new(a, b).unwrap();
        assert_eq!(local_score(&reference, &reference), 0.0);
        b.radius_of_curvature = 4.0;
        let target = ContactPair::new(a, b).unwrap();
        assert!((local_score(&reference, &target) - 0.5).abs() < 1e-12);
        assert_eq!(local_score(&reference, &target), local_score(&target, &reference));
    }

    #[test]
    fn concave_pair_rejected() {
        let mask = disk_mask(20.0);
        let edges = extract_edges(&mask).unwrap();
        let s = ObservationScale::new(10.0).unwrap();
        let mut e = estimate_curvature(&edges, edges.points()[0], s, &mask).unwrap();
        e.sign = CurvatureSign::Concave;
        assert!(ContactPair::new(e, e).is_err());
    }
}
