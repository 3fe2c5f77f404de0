//! Local curvature at contact points.
//!
//! An estimate at observation scale `s` takes the edge points within `s` of
//! the query point, finds their principal axis, and fits `y' = a·x'²` in the
//! local frame centred on the point, giving `κ = 2|a|` and `r = 1/κ`.
//! Estimates over a pyramid of scales are reduced to the scale whose ratio
//! `s / r` is closest to `α` (the motion functional scale). Edge points that
//! belong to a different side of the object are removed by casting rays from
//! a seed just off the contact point, and a local search enforces the
//! convexity required by the reference.

mod estimate;
mod fit;
mod refine;
mod scale;
mod suppress;

pub use estimate::{
    curvature_sign, estimate_curvature, estimate_from_points, CurvatureEstimate, CurvatureSign, ObservationScale, FLAT_KAPPA,
    R_CAP,
};
pub use fit::fit_parabola;
pub use refine::{estimate_suppressed, local_score, multiscale_estimate, refine_convexity, ContactPair};
pub use scale::{default_pyramid, motion_functional_scale, scaled_pyramid, DEFAULT_ALPHA, REFERENCE_DIAGONAL};
pub use suppress::{suppress_irrelevant, DEFAULT_DELTA, RAY_CORRIDOR, RAY_COUNT};
