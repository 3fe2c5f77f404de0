use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Similarity2};

/// One timestamped rigid pose. The pose maps tool-mask coordinates into the
/// world, which is the object-mask coordinate frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPose {
    pub t: f64,
    pub pose: Similarity2,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct PoseRecord {
    t: f64,
    theta: f64,
    dx: f64,
    dy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrajectoryRecord {
    poses: Vec<PoseRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    contact_phase: Option<[usize; 2]>,
}

/// Planar rigid trajectory of the tool, with an optional inclusive index
/// range during which the tool is meant to stay in contact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryRecord", into = "TrajectoryRecord")]
pub struct Trajectory2D {
    poses: Vec<TimedPose>,
    contact_phase: Option<(usize, usize)>,
}

impl Trajectory2D {
    pub fn new(poses: Vec<TimedPose>, contact_phase: Option<(usize, usize)>) -> Result<Self> {
        if poses.is_empty() {
            return Err(Error::Validation("trajectory has no poses".into()));
        }
        for (i, p) in poses.iter().enumerate() {
            if !p.t.is_finite() || !p.pose.rotation.is_finite() || !p.pose.translation.is_finite() {
                return Err(Error::Validation(format!("pose {i} is not finite")));
            }
            if p.pose.reflect || p.pose.scale != 1.0 {
                return Err(Error::Validation(format!("pose {i} is not rigid")));
            }
            if i > 0 && p.t <= poses[i - 1].t {
                return Err(Error::Validation(format!("timestamps must increase strictly (pose {i})")));
            }
        }
        if let Some((a, b)) = contact_phase {
            if a > b || b >= poses.len() {
                return Err(Error::Validation(format!("contact phase [{a}, {b}] outside {} poses", poses.len())));
            }
        }
        Ok(Self { poses, contact_phase })
    }

    /// Builds a trajectory from `(t, theta, dx, dy)` tuples.
    pub fn from_parts(parts: &[(f64, f64, f64, f64)], contact_phase: Option<(usize, usize)>) -> Result<Self> {
        let poses = parts
            .iter()
            .map(|&(t, theta, dx, dy)| TimedPose { t, pose: Similarity2::rigid(theta, Point2::new(dx, dy)) })
            .collect();
        Self::new(poses, contact_phase)
    }

    pub fn poses(&self) -> &[TimedPose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn contact_phase(&self) -> Option<(usize, usize)> {
        self.contact_phase
    }

    pub fn in_contact_phase(&self, index: usize) -> bool {
        self.contact_phase.is_some_and(|(a, b)| (a..=b).contains(&index))
    }

    /// Applies `f` to every pose, keeping timestamps and the contact phase.
    pub fn map_poses(&self, mut f: impl FnMut(&Similarity2) -> Similarity2) -> Result<Self> {
        let poses = self.poses.iter().map(|p| TimedPose { t: p.t, pose: f(&p.pose) }).collect();
        Self::new(poses, self.contact_phase)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

impl TryFrom<TrajectoryRecord> for Trajectory2D {
    type Error = Error;

    fn try_from(r: TrajectoryRecord) -> Result<Self> {
        let parts: Vec<_> = r.poses.iter().map(|p| (p.t, p.theta, p.dx, p.dy)).collect();
        Self::from_parts(&parts, r.contact_phase.map(|[a, b]| (a, b)))
    }
}

impl From<Trajectory2D> for TrajectoryRecord {
    fn from(t: Trajectory2D) -> Self {
        TrajectoryRecord {
            poses: t
                .poses
                .iter()
                .map(|p| PoseRecord { t: p.t, theta: p.pose.rotation, dx: p.pose.translation.x, dy: p.pose.translation.y })
                .collect(),
            contact_phase: t.contact_phase.map(|(a, b)| [a, b]),
        }
    }
}
