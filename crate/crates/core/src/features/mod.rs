//! Dense feature maps and global contact proposal.
//!
//! A [`FeatureMap`] is a grid of descriptors laid over a pose-variant canvas
//! (see [`crate::geometry::apply_variant`]). The global stage reduces the
//! pooled reference and variant maps with PCA, scores every foreground cell
//! of every variant with a patch-aggregated cosine similarity, and keeps the
//! best `k` cells.

mod fallback;
mod fmap;
mod global;
mod pca;
mod similarity;

pub use fallback::{compute_fallback_features, shape_context, FallbackFeatures, DESCRIPTOR_DIM};
pub use fmap::{load_feature_map, variant_path, write_feature_map, FeatureMap, FileFeatures};
pub use global::{global_match, FeatureSource, GlobalMatch, GlobalMatchOutput, GlobalMatchParams, VariantScores};
pub use pca::{pca_reduce, PcaBasis};
pub use similarity::{cosine, patch_similarity, patch_similarity_cells};
