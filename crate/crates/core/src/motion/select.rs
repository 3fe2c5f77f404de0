use log::info;
use serde::{Deserialize, Serialize};

use super::frame::build_frame;
use super::retarget::retarget_contact_trajectory;
use super::trajectory::Trajectory2D;
use super::verify::{verify_trajectory, VerificationReport, VerifyTolerances};
use crate::error::{Error, Result};
use crate::geometry::BinaryMask;
use crate::matching::{MatchCandidate, ReferenceDemo, ReferenceGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionOptions {
    pub max_sim_candidates: usize,
    /// Return the top candidate unverified when nothing passes.
    pub fallback: bool,
    pub tolerances: VerifyTolerances,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        Self { max_sim_candidates: 5, fallback: true, tolerances: VerifyTolerances::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Rank of the selected candidate (0-based).
    pub rank: usize,
    pub candidate: MatchCandidate,
    pub trajectory: Trajectory2D,
    pub verified: bool,
    /// One report per verification run, in rank order.
    pub reports: Vec<VerificationReport>,
}

/// Tool trajectory for `candidate`, carried over from the demonstration.
/// Candidates matched on a mirrored pose get left-handed frames on both the
/// tool and the object so that the motion stays rigid.
pub fn candidate_trajectory(
    demo: &ReferenceDemo,
    reference: &ReferenceGeometry,
    candidate: &MatchCandidate,
) -> Result<Trajectory2D> {
    let ref_tool = build_frame(&reference.tool);
    let ref_object = build_frame(&reference.object);
    let mut tgt_tool = build_frame(&candidate.tool_estimate);
    let mut tgt_object = build_frame(&candidate.object_estimate);
    if candidate.variant.reflect() {
        tgt_tool = tgt_tool.mirrored();
        tgt_object = tgt_object.mirrored();
    }
    retarget_contact_trajectory(&demo.trajectory, &ref_tool, &tgt_tool, &ref_object, &tgt_object)
}

/// Returns the first of at most `limit` items accepted by `check`, with the
/// outcomes of every check made.
pub fn first_passing<T, R>(
    items: &[T],
    limit: usize,
    mut check: impl FnMut(&T) -> Result<(bool, R)>,
) -> Result<(Option<usize>, Vec<R>)> {
    let mut outcomes = Vec::new();
    for (i, item) in items.iter().take(limit).enumerate() {
        let (ok, outcome) = check(item)?;
        outcomes.push(outcome);
        if ok {
            return Ok((Some(i), outcomes));
        }
    }
    Ok((None, outcomes))
}

/// Verifies ranked candidates in order and returns the first that passes.
pub fn rank_and_verify(
    candidates: &[MatchCandidate],
    demo: &ReferenceDemo,
    reference: &ReferenceGeometry,
    tool_mask: &BinaryMask,
    object_mask: &BinaryMask,
    obstacles: &[BinaryMask],
    options: &SelectionOptions,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates("nothing to verify".into()));
    }
    let mut trajectories = Vec::new();
    let (passed, reports) = first_passing(candidates, options.max_sim_candidates, |c| {
        let traj = candidate_trajectory(demo, reference, c)?;
        let report = verify_trajectory(
            tool_mask,
            object_mask,
            obstacles,
            &traj,
            (c.tool_estimate.point, c.object_estimate.point),
            &options.tolerances,
        );
        trajectories.push(traj);
        Ok((report.passed, report))
    })?;
    match passed {
        Some(rank) => {
            info!("candidate {rank} verified after {} runs", reports.len());
            Ok(Selection {
                rank,
                candidate: candidates[rank].clone(),
                trajectory: trajectories.swap_remove(rank),
                verified: true,
                reports,
            })
        }
        None if options.fallback => {
            info!("no candidate verified; falling back to the top-ranked match");
            let trajectory = trajectories.swap_remove(0);
            Ok(Selection { rank: 0, candidate: candidates[0].clone(), trajectory, verified: false, reports })
        }
        None => Err(Error::NoVerifiedCandidate),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stops_at_first_pass() {
        let mut runs = 0;
        let (hit, out) = first_passing(&[true, true], 5, |&b| {
            runs += 1;
            Ok((b, ()))
        })
        .unwrap();
        assert_eq!((hit, out.len(), runs), (Some(0), 1, 1));
    }

    #[test]
    fn third_rank_after_three_runs() {
        let (hit, out) = first_passing(&[false, false, true, true], 5, |&b| Ok((b, b))).unwrap();
        assert_eq!(hit, Some(2));
        assert_eq!(out, vec![false, false, true]);
    }

    #[test]
    fn respects_limit() {
        let (hit, out) = first_passing(&[false, false, true], 2, |&b| Ok((b, ()))).unwrap();
        assert_eq!(hit, None);
        assert_eq!(out.len(), 2);
    }
}
