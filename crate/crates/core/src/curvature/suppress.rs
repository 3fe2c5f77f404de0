use super::estimate::CurvatureEstimate;
use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, EdgePointSet, Point2};

/// Default seed offset from the contact point, in pixels.
pub const DEFAULT_DELTA: f64 = 2.0;
/// Number of rays cast from the seed.
pub const RAY_COUNT: usize = 72;
/// Distance from a ray within which an edge point counts as hit.
pub const RAY_CORRIDOR: f64 = 1.5;

const RAY_STEP: f64 = 0.25;

/// Removes in-scale edge points that belong to a different surface than the
/// contact point.
///
/// A seed `S` is placed `delta` pixels from `c` toward the osculating centre
/// of `first_pass`. When that seed falls inside the foreground and the far
/// wall of that foreground lies within the observation scale, the seed is
/// mirrored to the other side of the contour. Rays leave `S` every 5° and
/// stop at the first surface they cross; the surviving points are those
/// within the hit corridor of some ray. The original point order is kept.
pub fn suppress_irrelevant(
    mask: &BinaryMask,
    edges: &EdgePointSet,
    c: Point2,
    first_pass: &CurvatureEstimate,
    delta: f64,
) -> Result<EdgePointSet> {
    if !(delta > 0.0) {
        return Err(Error::Validation(format!("suppression offset must be positive, got {delta}")));
    }
    let scale = first_pass.scale.radius();
    let in_scale = edges.within(c, scale);
    let toward = first_pass.center_direction().normalized();
    let seed = seed_point(mask, c, toward, delta, scale);
    let seed_inside = mask.contains(seed);
    let reach = scale + delta + 2.0;

    let mut segments = Vec::with_capacity(RAY_COUNT);
    for k in 0..RAY_COUNT {
        let theta = (k as f64) * std::f64::consts::TAU / RAY_COUNT as f64;
        let dir = Point2::new(theta.cos(), theta.sin());
        let mut end = 0.0;
        let mut t = RAY_STEP;
        while t <= reach {
            let q = seed + dir * t;
            let (qx, qy) = q.pixel();
            let blocked = if seed_inside { !mask.get(qx, qy) } else { mask.get(qx, qy) && !mask.is_boundary(qx, qy) };
            if blocked {
                break;
            }
            end = t;
            t += RAY_STEP;
        }
        segments.push((dir, end));
    }

    let kept: Vec<Point2> = in_scale
        .into_iter()
        .filter(|p| segments.iter().any(|&(dir, end)| segment_distance(seed, dir, end, *p) <= RAY_CORRIDOR))
        .collect();
    EdgePointSet::from_points(kept)
}

fn seed_point(mask: &BinaryMask, c: Point2, toward: Point2, delta: f64, limit: f64) -> Point2 {
    let seed = c + toward * delta;
    if !mask.contains(seed) {
        return seed;
    }
    let mut t = RAY_STEP;
    while t <= limit {
        if !mask.contains(c + toward * t) {
            return c - toward * delta;
        }
        t += RAY_STEP;
    }
    seed
}

fn segment_distance(origin: Point2, dir: Point2, len: f64, p: Point2) -> f64 {
    let t = (p - origin).dot(dir).clamp(0.0, len);
    p.distance(origin + dir * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{estimate_curvature, ObservationScale};
    use crate::geometry::{extract_edges, Similarity2};
    use crate::shapes::Shape;

    #[test]
    fn disk_keeps_nearly_everything() {
        let mask =
            Shape::Disk { center: Point2::new(50.0, 50.0), radius: 30.0 }.rasterize(100, 100, &Similarity2::identity()).unwrap();
        let edges = extract_edges(&mask).unwrap();
        let s = ObservationScale::new(20.0).unwrap();
        for i in (0..edges.len()).step_by(11) {
            let c = edges.points()[i];
            let first = estimate_curvature(&edges, c, s, &mask).unwrap();
            let kept = suppress_irrelevant(&mask, &edges, c, &first, DEFAULT_DELTA).unwrap();
            let total = edges.within(c, 20.0).len();
            assert!(kept.len() as f64 >= 0.9 * total as f64, "{} of {}", kept.len(), total);
        }
    }

    #[test]
    fn thin_rod_drops_far_face() {
        // Rows 30..=33 are foreground: a 4 px rod with faces at y = 30 and y = 33.
        let mask = BinaryMask::from_fn(100, 64, |_, y| (30..34).contains(&y)).unwrap();
        let edges = extract_edges(&mask).unwrap();
        let s = ObservationScale::new(12.0).unwrap();
        let c = Point2::new(50.0, 30.0);
        let first = estimate_curvature(&edges, c, s, &mask).unwrap();
        let kept = suppress_irrelevant(&mask, &edges, c, &first, DEFAULT_DELTA).unwrap();
        assert!(!kept.is_empty());
        assert!(kept.points().iter().all(|p| p.y == 30.0));
    }

    #[test]
    fn rejects_nonpositive_delta() {
        let mask = BinaryMask::from_fn(40, 40, |x, y| (10..30).contains(&x) && (10..30).contains(&y)).unwrap();
        let edges = extract_edges(&mask).unwrap();
        let s = ObservationScale::new(8.0).unwrap();
        let c = Point2::new(20.0, 10.0);
        let first = estimate_curvature(&edges, c, s, &mask).unwrap();
        assert!(suppress_irrelevant(&mask, &edges, c, &first, 0.0).is_err());
    }
}
