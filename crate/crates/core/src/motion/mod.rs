//! Contact frames, trajectory retargeting and geometric verification.

mod frame;
mod retarget;
mod select;
mod trajectory;
mod verify;

pub use frame::{build_frame, ContactFrame};
pub use retarget::{
    frame_alignment, retarget_contact_trajectory, retarget_trajectory, transform_waypoints, transform_waypoints_scaled, Waypoint,
};
pub use select::{candidate_trajectory, first_passing, rank_and_verify, Selection, SelectionOptions};
pub use trajectory::{TimedPose, Trajectory2D};
pub use verify::{verify_trajectory, VerificationReport, VerifyTolerances, Violation, ViolationKind};
