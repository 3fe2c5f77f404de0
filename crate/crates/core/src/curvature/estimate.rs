use serde::{Deserialize, Serialize};

use super::fit::fit_parabola;
use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, EdgePointSet, Point2};

/// Radius cap for straight edges, in pixels.
pub const R_CAP: f64 = 1e4;
/// Below this curvature an edge is treated as flat.
pub const FLAT_KAPPA: f64 = 1e-3;

const PROBE_CAP: f64 = 2.5;
const PROBE_MIN: f64 = 1.5;
const LOCAL_RADIUS: f64 = 3.0;
const ORIGIN_WINDOW: f64 = 3.0;
const TIE_RADIUS: f64 = 5.0;
const TIE_GAP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureSign {
    Convex,
    Concave,
    Flat,
}

impl CurvatureSign {
    /// Whether two surfaces with these signs can touch: concave against
    /// concave is the only rejected combination.
    pub fn compatible(self, other: CurvatureSign) -> bool {
        !(self == CurvatureSign::Concave && other == CurvatureSign::Concave)
    }
}

/// Radius of the edge neighbourhood used for one estimate.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ObservationScale(f64);

impl ObservationScale {
    pub const MIN: f64 = 3.0;

    pub fn new(radius: f64) -> Result<Self> {
        if radius.is_finite() && radius >= Self::MIN {
            Ok(Self(radius))
        } else {
            Err(Error::Validation(format!("observation scale must be at least {} px, got {radius}", Self::MIN)))
        }
    }

    pub fn radius(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ObservationScale {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ObservationScale> for f64 {
    fn from(s: ObservationScale) -> f64 {
        s.0
    }
}

/// Local geometry at one contour point.
///
/// The fit frame has its `y'` axis along `normal`, so `a > 0` places the
/// osculating centre outside the foreground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEstimate {
    pub point: Point2,
    pub a: f64,
    pub kappa: f64,
    #[serde(rename = "r")]
    pub radius_of_curvature: f64,
    pub sign: CurvatureSign,
    pub normal: Point2,
    pub tangent: Point2,
    pub scale: ObservationScale,
    pub residual: f64,
    pub support_count: usize,
}

impl CurvatureEstimate {
    /// Unit vector from the point toward the osculating centre.
    pub fn center_direction(&self) -> Point2 {
        if self.a > 0.0 {
            self.normal
        } else {
            -self.normal
        }
    }
}

/// Classifies the curvature by probing the mask a short distance toward the
/// osculating centre.
pub fn curvature_sign(mask: &BinaryMask, c: Point2, toward_center: Point2, r: f64, kappa: f64) -> CurvatureSign {
    if kappa < FLAT_KAPPA {
        return CurvatureSign::Flat;
    }
    let q = c + toward_center.normalized() * r.clamp(PROBE_MIN, PROBE_CAP);
    if mask.contains(q) {
        CurvatureSign::Convex
    } else {
        CurvatureSign::Concave
    }
}

/// Estimates curvature at `c` from every edge point within the scale.
pub fn estimate_curvature(edges: &EdgePointSet, c: Point2, s: ObservationScale, mask: &BinaryMask) -> Result<CurvatureEstimate> {
    let support = edges.within(c, s.radius());
    estimate_from_points(&support, c, s, mask)
}

/// Estimates curvature at `c` from an explicit support set.
pub fn estimate_from_points(support: &[Point2], c: Point2, s: ObservationScale, mask: &BinaryMask) -> Result<CurvatureEstimate> {
    if support.len() < 5 {
        return Err(Error::InsufficientSupport { found: support.len() });
    }
    let axis = principal_axis(support).or_else(|| {
        let local: Vec<Point2> = support.iter().copied().filter(|p| p.distance(c) <= TIE_RADIUS).collect();
        principal_axis(&local)
    });
    let axis = axis.unwrap_or(Point2::new(1.0, 0.0));
    let normal = outward_normal(mask, c, Point2::new(-axis.y, axis.x));
    let tangent = Point2::new(normal.y, -normal.x);

    let mut local: Vec<Point2> = support
        .iter()
        .map(|p| {
            let d = *p - c;
            Point2::new(d.dot(tangent), d.dot(normal))
        })
        .collect();
    let level = origin_level(&local);
    for p in &mut local {
        p.y -= level;
    }
    let (a, residual) = fit_parabola(&local)?;
    let kappa = 2.0 * a.abs();
    let radius_of_curvature = if kappa > 0.0 { (1.0 / kappa).min(R_CAP) } else { R_CAP };
    let toward = if a > 0.0 { normal } else { -normal };
    let sign = curvature_sign(mask, c, toward, radius_of_curvature, kappa);
    Ok(CurvatureEstimate {
        point: c,
        a,
        kappa,
        radius_of_curvature,
        sign,
        normal,
        tangent,
        scale: s,
        residual,
        support_count: support.len(),
    })
}

/// Mean normal offset of the support points closest to the origin, used to
/// place the frame origin on the contour rather than on the pixel centre.
fn origin_level(local: &[Point2]) -> f64 {
    let near: Vec<f64> = local.iter().filter(|p| p.norm() <= ORIGIN_WINDOW).map(|p| p.y).collect();
    if near.is_empty() {
        0.0
    } else {
        near.iter().sum::<f64>() / near.len() as f64
    }
}

/// Unit eigenvector of the largest covariance eigenvalue, or `None` when the
/// eigenvalues are within `TIE_GAP` of each other relative to their sum.
fn principal_axis(points: &[Point2]) -> Option<Point2> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = points.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let half_diff = 0.5 * (sxx - syy);
    let gap = (half_diff * half_diff + sxy * sxy).sqrt();
    if 2.0 * gap <= TIE_GAP * (sxx + syy) {
        return None;
    }
    let theta = 0.5 * sxy.atan2(half_diff);
    let mut axis = Point2::new(theta.cos(), theta.sin());
    if axis.x < 0.0 || (axis.x == 0.0 && axis.y < 0.0) {
        axis = -axis;
    }
    Some(axis)
}

/// Orients `candidate` so that it points away from the local foreground mass.
fn outward_normal(mask: &BinaryMask, c: Point2, candidate: Point2) -> Point2 {
    let (cx, cy) = c.pixel();
    let reach = LOCAL_RADIUS.ceil() as i64;
    let mut balance = 0.0;
    for y in cy - reach..=cy + reach {
        for x in cx - reach..=cx + reach {
            let d = Point2::new((x - cx) as f64, (y - cy) as f64);
            if d.norm() <= LOCAL_RADIUS && mask.get(x, y) {
                balance += d.dot(candidate);
            }
        }
    }
    if balance > 0.0 || (balance == 0.0 && mask.contains(c + candidate * 2.0)) {
        -candidate
    } else {
        candidate
    }
}
