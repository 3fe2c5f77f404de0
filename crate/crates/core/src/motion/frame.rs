use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureEstimate;
use crate::geometry::{Point2, Similarity2};

/// Orthonormal frame at a contact point. `y_axis` is the outward normal and
/// `x_axis` is the normal turned by −90°, negated for left-handed frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactFrame {
    pub origin: Point2,
    pub x_axis: Point2,
    pub y_axis: Point2,
    pub handedness: i8,
}

impl ContactFrame {
    pub fn new(origin: Point2, normal: Point2, handedness: i8) -> Self {
        let y_axis = normal.normalized();
        let base = Point2::new(y_axis.y, -y_axis.x);
        let x_axis = if handedness < 0 { -base } else { base };
        Self { origin, x_axis, y_axis, handedness: if handedness < 0 { -1 } else { 1 } }
    }

    /// Same origin and normal with the opposite handedness.
    pub fn mirrored(&self) -> Self {
        Self::new(self.origin, self.y_axis, -self.handedness)
    }

    /// Map from frame coordinates to image coordinates.
    pub fn to_similarity(&self) -> Similarity2 {
        let base = Point2::new(self.y_axis.y, -self.y_axis.x);
        Similarity2 { rotation: base.y.atan2(base.x), reflect: self.handedness < 0, scale: 1.0, translation: self.origin }
    }

    pub fn to_local(&self, p: Point2) -> Point2 {
        let d = p - self.origin;
        Point2::new(d.dot(self.x_axis), d.dot(self.y_axis))
    }

    pub fn to_world(&self, u: Point2) -> Point2 {
        self.origin + self.x_axis * u.x + self.y_axis * u.y
    }
}

pub fn build_frame(estimate: &CurvatureEstimate) -> ContactFrame {
    ContactFrame::new(estimate.point, estimate.normal, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_convention() {
        let f = ContactFrame::new(Point2::new(3.0, 4.0), Point2::new(0.0, -1.0), 1);
        assert!((f.x_axis - Point2::new(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(f, ContactFrame::new(Point2::new(3.0, 4.0), Point2::new(0.0, -1.0), 1));
        let m = f.mirrored();
        assert!((m.x_axis - Point2::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(m.handedness, -1);
    }

    proptest! {
        #[test]
        fn similarity_matches_axes(angle in -3.2f64..3.2, ox in -50.0f64..50.0, oy in -50.0f64..50.0, h in prop::bool::ANY, ux in -9.0f64..9.0, uy in -9.0f64..9.0) {
            let f = ContactFrame::new(Point2::new(ox, oy), Point2::new(angle.cos(), angle.sin()), if h { -1 } else { 1 });
            prop_assert!(f.x_axis.dot(f.y_axis).abs() < 1e-9);
            prop_assert!((f.x_axis.norm() - 1.0).abs() < 1e-9);
            let u = Point2::new(ux, uy);
            prop_assert!((f.to_similarity().apply(u) - f.to_world(u)).norm() < 1e-9);
            prop_assert!((f.to_local(f.to_world(u)) - u).norm() < 1e-9);
        }
    }
}
