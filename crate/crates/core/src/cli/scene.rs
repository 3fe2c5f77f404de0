use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FallbackFeatures, FeatureSource, FileFeatures};
use crate::geometry::{BinaryMask, Point2};
use crate::matching::{MatchConfig, ReferenceDemo};
use crate::motion::{Trajectory2D, VerifyTolerances};
use crate::suite::SceneParams;

/// Marker used in place of a feature stem to request fallback descriptors.
pub const FALLBACK_FEATURES: &str = "fallback";

fn fallback() -> String {
    FALLBACK_FEATURES.to_string()
}

fn is_fallback(s: &String) -> bool {
    s == FALLBACK_FEATURES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSpec {
    pub tool_mask: PathBuf,
    pub object_mask: PathBuf,
    pub p_t: Point2,
    pub p_o: Point2,
    pub trajectory: PathBuf,
    #[serde(default = "fallback", skip_serializing_if = "is_fallback")]
    pub features: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub tool_mask: PathBuf,
    pub object_mask: PathBuf,
    #[serde(default = "fallback", skip_serializing_if = "is_fallback")]
    pub features: String,
}

/// On-disk scene description. Paths are relative to the scene file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub demo: DemoSpec,
    pub targets: Vec<TargetSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<PathBuf>,
    #[serde(default)]
    pub config: MatchConfig,
    #[serde(default)]
    pub tolerances: VerifyTolerances,
    /// Generator parameters, present on synthetic scenes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated: Option<SceneParams>,
}

impl SceneFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Where descriptors come from for one mask.
#[derive(Debug, Clone)]
pub enum Features {
    Fallback(FallbackFeatures),
    Files(FileFeatures),
}

impl Features {
    fn resolve(spec: &str, base: &Path, grid: usize, force_fallback: bool) -> Self {
        if force_fallback || spec == FALLBACK_FEATURES {
            Features::Fallback(FallbackFeatures { grid })
        } else {
            Features::Files(FileFeatures { stem: base.join(spec) })
        }
    }

    pub fn source(&self) -> &dyn FeatureSource {
        match self {
            Features::Fallback(f) => f,
            Features::Files(f) => f,
        }
    }
}

pub struct LoadedTarget {
    pub tool_mask: BinaryMask,
    pub object_mask: BinaryMask,
    pub features: Features,
}

/// A scene with every referenced file read.
pub struct LoadedScene {
    pub path: PathBuf,
    pub file: SceneFile,
    pub demo: ReferenceDemo,
    pub demo_features: Features,
    pub targets: Vec<LoadedTarget>,
    pub obstacles: Vec<BinaryMask>,
}

impl LoadedScene {
    /// Reads the scene and everything it references. With `force_fallback`
    /// every feature stem is replaced by fallback descriptors.
    pub fn load(path: impl AsRef<Path>, force_fallback: bool) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = SceneFile::read(&path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let grid = file.config.fallback_grid;

        let d = &file.demo;
        let trajectory = Trajectory2D::load(base.join(&d.trajectory))?;
        let demo = ReferenceDemo::new(
            BinaryMask::load(base.join(&d.tool_mask))?,
            BinaryMask::load(base.join(&d.object_mask))?,
            d.p_t,
            d.p_o,
            trajectory,
        )?;
        let demo_features = Features::resolve(&d.features, &base, grid, force_fallback);
        let targets = file
            .targets
            .iter()
            .map(|t| {
                Ok(LoadedTarget {
                    tool_mask: BinaryMask::load(base.join(&t.tool_mask))?,
                    object_mask: BinaryMask::load(base.join(&t.object_mask))?,
                    features: Features::resolve(&t.features, &base, grid, force_fallback),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let obstacles = file.obstacles.iter().map(|p| BinaryMask::load(base.join(p))).collect::<Result<Vec<_>>>()?;
        Ok(Self { path, file, demo, demo_features, targets, obstacles })
    }
}
