use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory2D;
use crate::geometry::{BinaryMask, Point2, Similarity2};

/// Limits applied by [`verify_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerances {
    /// Minimum allowed distance from the tool to the object or obstacles.
    pub clearance_min: f64,
    /// Largest allowed gap between the two contact points in the contact phase.
    pub contact_gap_max: f64,
    /// Largest tool displacement between consecutive samples.
    pub max_step: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self { clearance_min: 0.0, contact_gap_max: 3.0, max_step: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Collision,
    ContactLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// First keyframe at or after the violating sample.
    pub pose_index: usize,
    pub kind: ViolationKind,
    pub location: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub first_violation: Option<Violation>,
    pub min_clearance: f64,
    pub max_contact_gap: f64,
    pub samples: usize,
}

/// Euclidean distance from every pixel to the nearest pixel whose value is
/// `target`, by the separable squared-distance transform.
struct DistanceField {
    width: usize,
    height: usize,
    dist: Vec<f64>,
}

impl DistanceField {
    fn new(mask: &BinaryMask, target: bool) -> Self {
        let (w, h) = (mask.width(), mask.height());
        let far = ((w * w + h * h) as f64) * 4.0 + 1.0;
        let mut grid: Vec<f64> = mask.bits().iter().map(|&b| if b == target { 0.0 } else { far }).collect();
        let mut line = Vec::new();
        for x in 0..w {
            line.clear();
            line.extend((0..h).map(|y| grid[y * w + x]));
            let out = edt_1d(&line);
            for y in 0..h {
                grid[y * w + x] = out[y];
            }
        }
        for y in 0..h {
            let out = edt_1d(&grid[y * w..(y + 1) * w]);
            grid[y * w..(y + 1) * w].copy_from_slice(&out);
        }
        Self { width: w, height: h, dist: grid.into_iter().map(f64::sqrt).collect() }
    }

    /// Distance at `p`, extended past the grid by the distance to the border.
    fn at(&self, p: Point2) -> f64 {
        let (x, y) = p.pixel();
        let cx = x.clamp(0, self.width as i64 - 1);
        let cy = y.clamp(0, self.height as i64 - 1);
        let outside = (((x - cx).pow(2) + (y - cy).pow(2)) as f64).sqrt();
        self.dist[cy as usize * self.width + cx as usize] + outside
    }
}

fn edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n == 0 {
        return d;
    }
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let meet = |q: usize, p: usize| ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
    for q in 1..n {
        let mut s = meet(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = meet(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *out = (q as f64 - p as f64).powi(2) + f[p];
    }
    d
}

/// Sample fractions in `[0, 1)` between two keyframes, dense enough that the
/// tool moves at most `max_step` between samples. Finer steps only add
/// samples, never move existing ones.
fn subdivision(a: &Similarity2, b: &Similarity2, corners: &[Point2], max_step: f64) -> Vec<f64> {
    let disp = corners.iter().map(|c| a.apply(*c).distance(b.apply(*c))).fold(0.0, f64::max);
    let mut level = 0u32;
    while disp / f64::from(1u32 << level) > max_step && level < 16 {
        level += 1;
    }
    let n = 1u32 << level;
    (0..n).map(|j| f64::from(j) / f64::from(n)).collect()
}

/// Sweeps the tool along `traj` through the object's world and checks for
/// collisions and, during the contact phase, loss of contact.
///
/// The world is the object-mask frame. Tool pixels landing on an object
/// boundary pixel count as touching; landing any deeper counts as
/// penetration. Any overlap with a static obstacle is a collision. During
/// the contact phase the object is carried along by the tool's contact
/// point whenever that point moves into the object, and stays put
/// otherwise.
pub fn verify_trajectory(
    tool_mask: &BinaryMask,
    object_mask: &BinaryMask,
    static_masks: &[BinaryMask],
    traj: &Trajectory2D,
    contact_pair: (Point2, Point2),
    tol: &VerifyTolerances,
) -> VerificationReport {
    let tool_pixels: Vec<Point2> = tool_mask.foreground().map(|(x, y)| Point2::new(x as f64, y as f64)).collect();
    let (p_tool, p_object) = contact_pair;
    let depth = DistanceField::new(object_mask, false);
    let near_object = DistanceField::new(object_mask, true);
    let near_static: Vec<DistanceField> = static_masks.iter().map(|m| DistanceField::new(m, true)).collect();
    let inward = -object_normal(object_mask, p_object);
    let corners = bounding_corners(&tool_pixels);

    let mut report =
        VerificationReport { passed: true, first_violation: None, min_clearance: f64::MAX, max_contact_gap: 0.0, samples: 0 };
    let mut offset = Point2::default();
    let mut last_contact: Option<Point2> = None;
    let poses = traj.poses();

    for i in 0..poses.len() {
        let fractions =
            if i + 1 < poses.len() { subdivision(&poses[i].pose, &poses[i + 1].pose, &corners, tol.max_step) } else { vec![0.0] };
        for f in fractions {
            let pose = if f == 0.0 { poses[i].pose } else { poses[i].pose.lerp(&poses[i + 1].pose, f) };
            let keyframe = if f == 0.0 { i } else { i + 1 };
            let in_contact = traj.in_contact_phase(i) && (f == 0.0 || traj.in_contact_phase(i + 1));
            report.samples += 1;

            let contact = pose.apply(p_tool);
            if in_contact {
                if let Some(prev) = last_contact {
                    let delta = contact - prev;
                    if delta.dot(inward) > 0.0 {
                        offset = offset + delta;
                    }
                }
                last_contact = Some(contact);
            } else {
                last_contact = None;
            }

            let mut overlap = Vec::new();
            let mut penetration = Vec::new();
            for q in &tool_pixels {
                let w = pose.apply(*q);
                let local = w - offset;
                if depth.at(local) - std::f64::consts::SQRT_2 > 1e-9 && object_mask.contains(local) {
                    penetration.push(w);
                }
                let mut clearance = near_object.at(local);
                for (m, field) in static_masks.iter().zip(&near_static) {
                    if m.contains(w) {
                        overlap.push(w);
                    }
                    clearance = clearance.min(field.at(w));
                }
                report.min_clearance = report.min_clearance.min(clearance);
            }

            let collision = if !overlap.is_empty() {
                Some(centroid(&overlap))
            } else if !penetration.is_empty() {
                Some(centroid(&penetration))
            } else if report.min_clearance < tol.clearance_min {
                Some(contact)
            } else {
                None
            };
            if let Some(location) = collision {
                return fail(report, keyframe, ViolationKind::Collision, location);
            }
            if in_contact {
                let gap = contact.distance(p_object + offset);
                report.max_contact_gap = report.max_contact_gap.max(gap);
                if gap > tol.contact_gap_max {
                    return fail(report, keyframe, ViolationKind::ContactLoss, contact);
                }
            }
        }
    }
    if report.min_clearance == f64::MAX {
        report.min_clearance = 0.0;
    }
    report
}

fn fail(mut report: VerificationReport, pose_index: usize, kind: ViolationKind, location: Point2) -> VerificationReport {
    report.passed = false;
    report.first_violation = Some(Violation { pose_index, kind, location });
    if report.min_clearance == f64::MAX {
        report.min_clearance = 0.0;
    }
    report
}

fn centroid(points: &[Point2]) -> Point2 {
    let sum = points.iter().fold(Point2::default(), |a, b| a + *b);
    sum * (1.0 / points.len() as f64)
}

fn bounding_corners(points: &[Point2]) -> Vec<Point2> {
    if points.is_empty() {
        return Vec::new();
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in points {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    vec![Point2::new(x0, y0), Point2::new(x1, y0), Point2::new(x0, y1), Point2::new(x1, y1)]
}

/// Outward normal of `mask` near `p`, from the balance of foreground pixels
/// within a small disk.
pub(crate) fn object_normal(mask: &BinaryMask, p: Point2) -> Point2 {
    let (cx, cy) = p.pixel();
    let mut sum = Point2::default();
    for y in cy - 4..=cy + 4 {
        for x in cx - 4..=cx + 4 {
            let d = Point2::new((x - cx) as f64, (y - cy) as f64);
            if d.norm() <= 4.0 && mask.get(x, y) {
                sum = sum + d;
            }
        }
    }
    if sum.norm() < 1e-12 {
        Point2::new(0.0, -1.0)
    } else {
        -sum.normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::Shape;

    fn square(w: usize, h: usize, x0: usize, y0: usize, side: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y)).unwrap()
    }

    #[test]
    fn edt_matches_brute_force() {
        let m = Shape::Disk { center: Point2::new(12.0, 9.0), radius: 5.0 }.rasterize(30, 20, &Similarity2::identity()).unwrap();
        let field = DistanceField::new(&m, true);
        let fg: Vec<(usize, usize)> = m.foreground().collect();
        for y in 0..20 {
            for x in 0..30 {
                let brute = fg
                    .iter()
                    .map(|&(a, b)| ((a as f64 - x as f64).powi(2) + (b as f64 - y as f64).powi(2)).sqrt())
                    .fold(f64::MAX, f64::min);
                assert!((field.at(Point2::new(x as f64, y as f64)) - brute).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn free_space_passes() {
        let tool = square(20, 20, 2, 2, 5);
        let object = square(100, 100, 80, 80, 10);
        let traj =
            Trajectory2D::from_parts(&[(0.0, 0.0, 10.0, 10.0), (1.0, 0.3, 30.0, 12.0), (2.0, 0.0, 40.0, 20.0)], None).unwrap();
        let r = verify_trajectory(
            &tool,
            &object,
            &[],
            &traj,
            (Point2::new(4.0, 4.0), Point2::new(80.0, 85.0)),
            &VerifyTolerances::default(),
        );
        assert!(r.passed);
        assert!(r.first_violation.is_none());
        assert!(r.min_clearance > 0.0);
        assert!(r.samples > 3);
    }

    #[test]
    fn obstacle_overlap_at_index_two() {
        let tool = square(10, 10, 0, 0, 4);
        let object = square(100, 100, 90, 90, 5);
        let obstacle = square(100, 100, 50, 10, 6);
        let traj =
            Trajectory2D::from_parts(&[(0.0, 0.0, 10.0, 10.0), (1.0, 0.0, 30.0, 10.0), (2.0, 0.0, 51.0, 11.0)], None).unwrap();
        let r = verify_trajectory(
            &tool,
            &object,
            &[obstacle],
            &traj,
            (Point2::new(0.0, 0.0), Point2::new(90.0, 90.0)),
            &VerifyTolerances::default(),
        );
        assert!(!r.passed);
        let v = r.first_violation.unwrap();
        assert_eq!(v.pose_index, 2);
        assert_eq!(v.kind, ViolationKind::Collision);
        assert!(v.location.x >= 50.0 && v.location.x <= 56.0);
    }

    #[test]
    fn pushing_carries_object_and_retreat_loses_contact() {
        // Tool block to the left of a box, pushing right then pulling back.
        let tool = square(10, 10, 0, 0, 6);
        let object = square(120, 60, 40, 20, 20);
        let p_tool = Point2::new(5.0, 3.0);
        let p_object = Point2::new(40.0, 23.0);
        let start = p_object - Point2::new(1.5, 0.0) - p_tool;
        let push =
            Trajectory2D::from_parts(&[(0.0, 0.0, start.x, start.y), (1.0, 0.0, start.x + 20.0, start.y)], Some((0, 1))).unwrap();
        let r = verify_trajectory(&tool, &object, &[], &push, (p_tool, p_object), &VerifyTolerances::default());
        assert!(r.passed, "{r:?}");
        let pull =
            Trajectory2D::from_parts(&[(0.0, 0.0, start.x, start.y), (1.0, 0.0, start.x - 20.0, start.y)], Some((0, 1))).unwrap();
        let r = verify_trajectory(&tool, &object, &[], &pull, (p_tool, p_object), &VerifyTolerances::default());
        assert_eq!(r.first_violation.unwrap().kind, ViolationKind::ContactLoss);
    }

    #[test]
    fn finer_steps_keep_failures() {
        let tool = square(10, 10, 0, 0, 3);
        let object = square(100, 100, 90, 90, 5);
        let obstacle = square(100, 100, 40, 0, 2);
        let traj = Trajectory2D::from_parts(&[(0.0, 0.0, 10.0, 0.0), (1.0, 0.0, 70.0, 0.0)], None).unwrap();
        for step in [4.0, 2.0, 1.0, 0.5, 0.25] {
            let tol = VerifyTolerances { max_step: step, ..Default::default() };
            let r = verify_trajectory(
                &tool,
                &object,
                std::slice::from_ref(&obstacle),
                &traj,
                (Point2::new(0.0, 0.0), Point2::new(90.0, 90.0)),
                &tol,
            );
            assert!(!r.passed, "step {step}");
        }
    }
}
