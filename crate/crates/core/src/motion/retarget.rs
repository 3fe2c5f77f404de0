use serde::{Deserialize, Serialize};

use super::frame::ContactFrame;
use super::trajectory::Trajectory2D;
use crate::error::Result;
use crate::geometry::{Point2, Similarity2};

/// Similarity taking `from` onto `to`: origin to origin, axes to axes.
pub fn frame_alignment(from: &ContactFrame, to: &ContactFrame) -> Similarity2 {
    to.to_similarity().compose(&from.to_similarity().inverse())
}

/// Conjugates every pose by the alignment `A` of `ref_frame` onto
/// `tgt_frame`: `P' = A·P·A⁻¹`. When `A` is a reflection the rotation
/// angles change sign and the result stays rigid.
pub fn retarget_trajectory(ref_traj: &Trajectory2D, ref_frame: &ContactFrame, tgt_frame: &ContactFrame) -> Result<Trajectory2D> {
    let a = frame_alignment(ref_frame, tgt_frame);
    let a_inv = a.inverse();
    ref_traj.map_poses(|p| rigidify(a.compose(p).compose(&a_inv)))
}

/// Retargets a tool trajectory to a new tool and object.
///
/// Poses map tool coordinates into object coordinates, so the tool side is
/// aligned through the tool frames and the object side through the object
/// frames: `P' = (B_O'·B_O⁻¹)·P·(B_T·B_T'⁻¹)`. With identical tool and object
/// frames this reduces to [`retarget_trajectory`].
pub fn retarget_contact_trajectory(
    ref_traj: &Trajectory2D,
    ref_tool: &ContactFrame,
    tgt_tool: &ContactFrame,
    ref_object: &ContactFrame,
    tgt_object: &ContactFrame,
) -> Result<Trajectory2D> {
    let object_side = frame_alignment(ref_object, tgt_object);
    let tool_side = frame_alignment(tgt_tool, ref_tool);
    ref_traj.map_poses(|p| rigidify(object_side.compose(p).compose(&tool_side)))
}

fn rigidify(p: Similarity2) -> Similarity2 {
    debug_assert!(!p.reflect, "retargeted pose picked up a reflection");
    Similarity2::rigid(p.rotation, p.translation)
}

/// Contact waypoint with an optional unit force direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub position: Point2,
    pub force: Option<Point2>,
}

/// Carries waypoints from the reference frame to the target frame.
pub fn transform_waypoints(waypoints: &[Waypoint], ref_frame: &ContactFrame, tgt_frame: &ContactFrame) -> Vec<Waypoint> {
    transform_waypoints_scaled(waypoints, ref_frame, tgt_frame, 1.0)
}

/// As [`transform_waypoints`], with positions scaled by `scale` about the
/// contact origin. Force directions are only rotated.
pub fn transform_waypoints_scaled(
    waypoints: &[Waypoint],
    ref_frame: &ContactFrame,
    tgt_frame: &ContactFrame,
    scale: f64,
) -> Vec<Waypoint> {
    let a = frame_alignment(ref_frame, tgt_frame);
    waypoints
        .iter()
        .map(|w| {
            let offset = (w.position - ref_frame.origin) * scale;
            Waypoint {
                position: tgt_frame.origin + a.apply_vector(offset),
                force: w.force.map(|f| a.apply_vector(f).normalized()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::wrap_angle;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn traj() -> Trajectory2D {
        Trajectory2D::from_parts(
            &[(0.0, 0.0, 0.0, 0.0), (1.0, 0.2, 4.0, -1.0), (2.0, 0.5, 9.0, -3.0), (3.0, 0.4, 12.0, 2.0)],
            Some((1, 3)),
        )
        .unwrap()
    }

    fn frame(ox: f64, oy: f64, angle: f64, h: i8) -> ContactFrame {
        ContactFrame::new(Point2::new(ox, oy), Point2::new(angle.cos(), angle.sin()), h)
    }

    #[test]
    fn identical_frames_are_identity() {
        let f = frame(10.0, 20.0, 0.7, 1);
        let out = retarget_trajectory(&traj(), &f, &f).unwrap();
        for (a, b) in out.poses().iter().zip(traj().poses()) {
            assert_eq!(a.t, b.t);
            assert!(wrap_angle(a.pose.rotation - b.pose.rotation).abs() < 1e-9);
            assert!((a.pose.translation - b.pose.translation).norm() < 1e-9);
        }
    }

    #[test]
    fn quarter_turn_about_contact() {
        let c = Point2::new(5.0, 5.0);
        let f = ContactFrame::new(c, Point2::new(0.0, -1.0), 1);
        let g = ContactFrame::new(c, Point2::new(0.0, -1.0).rotated(FRAC_PI_2), 1);
        let r = Similarity2::rotation_about(FRAC_PI_2, c);
        let out = retarget_trajectory(&traj(), &f, &g).unwrap();
        for (a, b) in out.poses().iter().zip(traj().poses()) {
            let expect = r.compose(&b.pose).compose(&r.inverse());
            assert!((a.pose.apply(c) - r.apply(b.pose.apply(c))).norm() < 1e-9);
            assert!((a.pose.translation - expect.translation).norm() < 1e-9);
        }
    }

    #[test]
    fn waypoint_conventions() {
        let f = frame(0.0, 0.0, -FRAC_PI_2, 1);
        let w = [Waypoint { position: Point2::new(3.0, 1.0), force: Some(Point2::new(1.0, 0.0)) }];
        assert_eq!(transform_waypoints(&w, &f, &f)[0].position, w[0].position);
        let moved = frame(5.0, -2.0, -FRAC_PI_2, 1);
        let t = transform_waypoints(&w, &f, &moved);
        assert!((t[0].position - Point2::new(8.0, -1.0)).norm() < 1e-12);
        assert!((t[0].force.unwrap() - Point2::new(1.0, 0.0)).norm() < 1e-12);
        let turned = frame(0.0, 0.0, 0.0, 1);
        let t = transform_waypoints(&w, &f, &turned);
        assert!((t[0].force.unwrap() - Point2::new(0.0, 1.0)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn contact_path_is_congruent(
            a in -3.0f64..3.0, b in -3.0f64..3.0, ox in -40.0f64..40.0, oy in -40.0f64..40.0, h in prop::bool::ANY
        ) {
            let f = frame(1.0, 2.0, a, 1);
            let g = frame(ox, oy, b, if h { -1 } else { 1 });
            let src = traj();
            let out = retarget_trajectory(&src, &f, &g).unwrap();
            let p: Vec<Point2> = src.poses().iter().map(|q| q.pose.apply(f.origin)).collect();
            let q: Vec<Point2> = out.poses().iter().map(|q| q.pose.apply(g.origin)).collect();
            for i in 0..p.len() {
                for j in 0..p.len() {
                    prop_assert!((p[i].distance(p[j]) - q[i].distance(q[j])).abs() < 1e-6);
                }
            }
            for w in 0..src.len() - 1 {
                let rel_src = src.poses()[w + 1].pose.compose(&src.poses()[w].pose.inverse());
                let rel_out = out.poses()[w + 1].pose.compose(&out.poses()[w].pose.inverse());
                prop_assert!((wrap_angle(rel_src.rotation).abs() - wrap_angle(rel_out.rotation).abs()).abs() < 1e-9);
                let local_src = f.to_similarity().inverse().compose(&rel_src).compose(&f.to_similarity());
                let local_out = g.to_similarity().inverse().compose(&rel_out).compose(&g.to_similarity());
                prop_assert!((local_src.translation.norm() - local_out.translation.norm()).abs() < 1e-9);
            }
        }

        #[test]
        fn two_frame_places_contact(
            a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0, h in prop::bool::ANY
        ) {
            let hand = if h { -1 } else { 1 };
            let rt = frame(3.0, 4.0, a, 1);
            let tt = frame(-7.0, 2.0, b, hand);
            let ro = frame(30.0, 10.0, c, 1);
            let to = frame(12.0, -5.0, d, hand);
            let src = traj();
            let out = retarget_contact_trajectory(&src, &rt, &tt, &ro, &to).unwrap();
            for (p, q) in src.poses().iter().zip(out.poses()) {
                let before = ro.to_local(p.pose.apply(rt.origin));
                let after = to.to_local(q.pose.apply(tt.origin));
                prop_assert!((before - after).norm() < 1e-9);
                prop_assert!(!q.pose.reflect);
            }
        }
    }
}
