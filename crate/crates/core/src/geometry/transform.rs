use serde::{Deserialize, Serialize};

use super::Point2;

/// Planar similarity `p ↦ scale · R(rotation) · F(p) + translation`, where
/// `F` mirrors about the vertical axis (`x ↦ -x`) when `reflect` is set and
/// `R` is `[[cos, -sin], [sin, cos]]`. With y pointing down, a positive
/// rotation turns clockwise on screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity2 {
    pub rotation: f64,
    pub reflect: bool,
    pub scale: f64,
    pub translation: Point2,
}

impl Default for Similarity2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Similarity2 {
    pub const fn identity() -> Self {
        Self { rotation: 0.0, reflect: false, scale: 1.0, translation: Point2::new(0.0, 0.0) }
    }

    pub fn rigid(rotation: f64, translation: Point2) -> Self {
        Self { rotation, reflect: false, scale: 1.0, translation }
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self::rigid(0.0, Point2::new(dx, dy))
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation_about(angle: f64, center: Point2) -> Self {
        let t = center - center.rotated(angle);
        Self::rigid(angle, t)
    }

    /// Applies only the linear part (no translation); maps directions.
    pub fn apply_vector(&self, v: Point2) -> Point2 {
        let v = if self.reflect { Point2::new(-v.x, v.y) } else { v };
        v.rotated(self.rotation) * self.scale
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        self.apply_vector(p) + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Similarity2) -> Similarity2 {
        let inner_rot = if self.reflect { -other.rotation } else { other.rotation };
        Similarity2 {
            rotation: self.rotation + inner_rot,
            reflect: self.reflect ^ other.reflect,
            scale: self.scale * other.scale,
            translation: self.apply(other.translation),
        }
    }

    pub fn inverse(&self) -> Similarity2 {
        let mut inv = Similarity2 {
            rotation: if self.reflect { self.rotation } else { -self.rotation },
            reflect: self.reflect,
            scale: 1.0 / self.scale,
            translation: Point2::default(),
        };
        inv.translation = -inv.apply_vector(self.translation);
        inv
    }

    /// Rotation angle wrapped to `(-π, π]`.
    pub fn normalized_rotation(&self) -> f64 {
        wrap_angle(self.rotation)
    }

    pub fn is_rigid(&self) -> bool {
        !self.reflect && (self.scale - 1.0).abs() < 1e-12
    }

    /// Linear interpolation between two transforms with the same reflection
    /// and scale, taking the short way round for the rotation.
    pub fn lerp(&self, other: &Similarity2, t: f64) -> Similarity2 {
        let dr = wrap_angle(other.rotation - self.rotation);
        Similarity2 {
            rotation: self.rotation + dr * t,
            reflect: self.reflect,
            scale: self.scale + (other.scale - self.scale) * t,
            translation: self.translation + (other.translation - self.translation) * t,
        }
    }
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut a = a % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}
