//! Contact-point analogy engine.
//!
//! Given one reference demonstration (tool and object silhouettes, annotated
//! contact points and a planar tool trajectory), the engine proposes
//! functionally corresponding contact points on new tool/object pairs,
//! retargets the trajectory onto them and checks it with a 2D sweep.
//!
//! The pipeline is split into:
//! - [`geometry`]: masks, boundary extraction, similarity transforms, pose variants
//! - [`features`]: dense descriptor maps, PCA, patch similarity, global top-k
//! - [`curvature`]: parabola-fit curvature, scale selection, suppression, convexity search
//! - [`matching`]: candidate generation, combined scoring, tool selection
//! - [`motion`]: contact frames, retargeting, waypoints, verification
//! - [`cli`]: scene files, reports, synthetic suites and benchmarking

pub mod cli;
pub mod curvature;
pub mod error;
pub mod features;
pub mod geometry;
pub mod matching;
pub mod motion;
pub mod shapes;
pub mod suite;

pub use error::{Error, Result};
