//! Planar primitives: points, binary masks, boundary extraction, similarity
//! transforms and the 24-member pose-variant family.
//!
//! Coordinates are pixel coordinates with pixel centres at integer positions,
//! `x` growing to the right (column) and `y` growing downward (row). Every
//! module in the crate uses this convention.

mod edges;
mod mask;
mod transform;
mod variant;

pub use edges::{extract_edges, EdgePointSet};
pub use mask::BinaryMask;
#[cfg(test)]
pub(crate) use transform::wrap_angle;
pub use transform::Similarity2;
pub use variant::{apply_variant, variant_canvas_side, variant_canvas_transform, variant_transform, PoseVariant, VARIANT_COUNT};

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A sub-pixel position (or a 2-vector, when used as a direction).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            self
        }
    }

    /// Rotates the vector by `angle` radians using the crate's rotation
    /// matrix `[[cos, -sin], [sin, cos]]` (clockwise on screen with y down).
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Nearest pixel `(col, row)`; may be negative.
    pub fn pixel(self) -> (i64, i64) {
        (self.x.round() as i64, self.y.round() as i64)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}
