//! Two-stage contact matching: global feature similarity on the tool, local
//! curvature agreement on the tool/object pair.
//!
//! Candidates are ranked by `s_dino − λ·s_curv`, where `s_curv` is the
//! difference of tool-to-object radius ratios between the demonstration and
//! the candidate.

mod config;
mod demo;
mod pipeline;

pub use config::MatchConfig;
pub use demo::{ReferenceDemo, ANNOTATION_TOLERANCE};
pub use pipeline::{
    match_contact, match_contact_detailed, propose_object_point, rank_candidates, reference_geometry, select_tool,
    MatchCandidate, MatchResult, ReferenceGeometry, ToolChoice, ToolOption,
};
