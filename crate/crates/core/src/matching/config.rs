use serde::{Deserialize, Serialize};

use crate::curvature::{default_pyramid, scaled_pyramid, DEFAULT_ALPHA, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::features::GlobalMatchParams;
use crate::geometry::BinaryMask;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    /// Weight of the curvature penalty in the combined score.
    pub lambda: f64,
    /// Number of global matches kept.
    pub k: usize,
    /// Patch side for the patch similarity.
    pub m: usize,
    pub alpha: f64,
    /// Suppression seed offset, in pixels.
    pub delta: f64,
    /// Observation scales for a 448 px-class mask.
    pub pyramid: Vec<f64>,
    /// Rescale `pyramid` with each mask's diagonal.
    pub scale_pyramid: bool,
    /// Candidates tried by the verifier before falling back.
    pub max_sim_candidates: usize,
    /// PCA output dimension for the descriptors.
    pub pca_dim: Option<usize>,
    /// Grid side of the fallback descriptor.
    pub fallback_grid: usize,
    /// Stride through the object contour when proposing object points.
    pub object_stride: usize,
    /// Number of object points kept.
    pub object_candidates: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            k: 3,
            m: 3,
            alpha: DEFAULT_ALPHA,
            delta: DEFAULT_DELTA,
            pyramid: default_pyramid(),
            scale_pyramid: true,
            max_sim_candidates: 5,
            pca_dim: Some(16),
            fallback_grid: 64,
            object_stride: 4,
            object_candidates: 16,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Validation(format!("invalid {what}")));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda");
        }
        if self.k == 0 {
            return bad("top-k");
        }
        if self.m == 0 || self.m.is_multiple_of(2) {
            return bad("patch side (must be odd)");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha");
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad("delta");
        }
        if self.pyramid.is_empty() || self.pyramid.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return bad("pyramid");
        }
        if self.max_sim_candidates == 0 || self.fallback_grid < 4 || self.object_stride == 0 || self.object_candidates == 0 {
            return bad("candidate counts");
        }
        if self.pca_dim == Some(0) {
            return bad("PCA dimension");
        }
        Ok(())
    }

    pub fn pyramid_for(&self, mask: &BinaryMask) -> Vec<f64> {
        if self.scale_pyramid {
            scaled_pyramid(&self.pyramid, mask)
        } else {
            self.pyramid.iter().map(|s| s.max(3.0)).collect()
        }
    }

    pub fn global_params(&self) -> GlobalMatchParams {
        GlobalMatchParams { k: self.k, m: self.m, pca_dim: self.pca_dim }
    }
}
