//! Analytic planar shapes and their rasterization, used to build fixtures
//! with known geometry (disks, annuli, rods, hooks) and synthetic scenes.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{BinaryMask, Point2, Similarity2};

/// A region of the plane described in its own canonical frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Disk {
        center: Point2,
        radius: f64,
    },
    Annulus {
        center: Point2,
        inner: f64,
        outer: f64,
    },
    /// Axis-aligned rectangle `|x - cx| <= hx, |y - cy| <= hy`.
    Rect {
        center: Point2,
        half_x: f64,
        half_y: f64,
    },
    /// Points with `normal · p >= offset`.
    HalfPlane {
        normal: Point2,
        offset: f64,
    },
    Union(Vec<Shape>),
    Intersection(Vec<Shape>),
    Difference(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Shape::Disk { center, radius } => p.distance(*center) <= *radius,
            Shape::Annulus { center, inner, outer } => {
                let d = p.distance(*center);
                d >= *inner && d <= *outer
            }
            Shape::Rect { center, half_x, half_y } => (p.x - center.x).abs() <= *half_x && (p.y - center.y).abs() <= *half_y,
            Shape::HalfPlane { normal, offset } => normal.dot(p) >= *offset,
            Shape::Union(parts) => parts.iter().any(|s| s.contains(p)),
            Shape::Intersection(parts) => parts.iter().all(|s| s.contains(p)),
            Shape::Difference(a, b) => a.contains(p) && !b.contains(p),
        }
    }

    /// Rasterizes the shape placed by `pose` (canonical → image) onto a
    /// `width × height` canvas, sampling pixel centres.
    pub fn rasterize(&self, width: usize, height: usize, pose: &Similarity2) -> Result<BinaryMask> {
        let inv = pose.inverse();
        BinaryMask::from_fn(width, height, |x, y| self.contains(inv.apply(Point2::new(x as f64, y as f64))))
    }
}

/// A J-shaped hook: a straight shaft, a half-ring bend and a short tip.
///
/// Canonical frame: the bend centre is the origin, the shaft runs up the
/// left side (negative y), the bend is the lower half ring and the cavity
/// opens toward negative y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hook {
    pub inner_radius: f64,
    pub thickness: f64,
    pub shaft_length: f64,
    pub tip_length: f64,
}

impl Hook {
    pub fn shape(&self) -> Shape {
        let r = self.inner_radius;
        let w = self.thickness;
        Shape::Union(vec![
            Shape::Rect {
                center: Point2::new(-r - w / 2.0, -self.shaft_length / 2.0),
                half_x: w / 2.0,
                half_y: self.shaft_length / 2.0,
            },
            Shape::Intersection(vec![
                Shape::Annulus { center: Point2::default(), inner: r, outer: r + w },
                Shape::HalfPlane { normal: Point2::new(0.0, 1.0), offset: 0.0 },
            ]),
            Shape::Rect {
                center: Point2::new(r + w / 2.0, -self.tip_length / 2.0),
                half_x: w / 2.0,
                half_y: self.tip_length / 2.0,
            },
        ])
    }

    /// Deepest point of the inner (concave) bend.
    pub fn inner_contact(&self) -> Point2 {
        Point2::new(0.0, self.inner_radius)
    }

    /// Outermost point of the outer (convex) bend.
    pub fn outer_contact(&self) -> Point2 {
        Point2::new(0.0, self.inner_radius + self.thickness)
    }

    /// Unit direction the cavity opens toward (out of the inner bend).
    pub fn opening(&self) -> Point2 {
        Point2::new(0.0, -1.0)
    }

    /// Bounding extent of the canonical shape: `(min, max)` corners.
    pub fn extent(&self) -> (Point2, Point2) {
        let r = self.inner_radius + self.thickness;
        (Point2::new(-r, -self.shaft_length.max(self.tip_length)), Point2::new(r, r))
    }
}
