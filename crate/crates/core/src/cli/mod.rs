//! Command surface behind the `contact-analogy` binary: scene files, match
//! reports, synthetic suites and benchmarking.
//!
//! Exit codes: 0 on success, 1 when no geometric match exists, 2 when
//! matches exist but none verifies (with fallback disabled), 3 for I/O,
//! format and validation errors.

mod commands;
mod scene;
pub mod viz;

use serde_json::json;

pub use commands::{
    cmd_bench, cmd_gen_suite, cmd_match, cmd_select_tool, match_scene, suite_scenes, write_bench_csv, BenchRow, BenchSummary,
    MatchReport, Overrides, SuiteManifest, Timings, ToolSelectionReport, SUITE_MANIFEST,
};
pub use scene::{DemoSpec, Features, LoadedScene, LoadedTarget, SceneFile, TargetSpec, FALLBACK_FEATURES};

use crate::error::Error;

pub const EXIT_NO_CANDIDATES: i32 = 1;
pub const EXIT_NOT_VERIFIED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoCandidates(_)
        | Error::NoMatchingConvexity
        | Error::EmptySelection
        | Error::InsufficientSupport { .. }
        | Error::DegenerateFit => EXIT_NO_CANDIDATES,
        Error::NoVerifiedCandidate => EXIT_NOT_VERIFIED,
        _ => EXIT_INPUT,
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::EmptyMask => "empty_mask",
        Error::InvalidMask(_) => "invalid_mask",
        Error::NoForeground => "no_foreground",
        Error::Format(_) => "format",
        Error::Dimension { .. } => "dimension",
        Error::DegenerateData(_) => "degenerate_data",
        Error::DegenerateFit => "degenerate_fit",
        Error::InsufficientSupport { .. } => "insufficient_support",
        Error::EmptySelection => "empty_selection",
        Error::NoMatchingConvexity => "no_matching_convexity",
        Error::NoCandidates(_) => "no_candidates",
        Error::NoVerifiedCandidate => "no_verified_candidate",
        Error::Validation(_) => "validation",
        Error::Io { .. } => "io",
        Error::Image { .. } => "image",
        Error::Json { .. } => "json",
    }
}

/// Machine-readable error for stderr.
pub fn error_json(e: &Error, code: i32) -> serde_json::Value {
    let path = match e {
        Error::Io { path, .. } | Error::Image { path, .. } | Error::Json { path, .. } => Some(path.display().to_string()),
        _ => None,
    };
    json!({ "error": kind(e), "message": e.to_string(), "path": path, "exit_code": code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_taxonomy() {
        assert_eq!(exit_code(&Error::NoCandidates("x".into())), 1);
        assert_eq!(exit_code(&Error::NoVerifiedCandidate), 2);
        assert_eq!(exit_code(&Error::Validation("x".into())), 3);
        let io = Error::io("a/b.png", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert_eq!(exit_code(&io), 3);
        let v = error_json(&io, 3);
        assert_eq!(v["error"], "io");
        assert_eq!(v["path"], "a/b.png");
    }
}
