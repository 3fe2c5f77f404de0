use crate::error::{Error, Result};
use crate::geometry::{extract_edges, BinaryMask, Point2};
use crate::motion::Trajectory2D;

/// Largest distance between an annotated contact point and the contour.
pub const ANNOTATION_TOLERANCE: f64 = 1.0;

/// One demonstrated contact: the tool and object masks, the contact point on
/// each, and the tool trajectory in the object frame.
#[derive(Debug, Clone)]
pub struct ReferenceDemo {
    pub tool_mask: BinaryMask,
    pub object_mask: BinaryMask,
    pub p_t: Point2,
    pub p_o: Point2,
    pub trajectory: Trajectory2D,
}

impl ReferenceDemo {
    pub fn new(
        tool_mask: BinaryMask,
        object_mask: BinaryMask,
        p_t: Point2,
        p_o: Point2,
        trajectory: Trajectory2D,
    ) -> Result<Self> {
        check_on_edge(&tool_mask, p_t, "tool")?;
        check_on_edge(&object_mask, p_o, "object")?;
        Ok(Self { tool_mask, object_mask, p_t, p_o, trajectory })
    }
}

fn check_on_edge(mask: &BinaryMask, p: Point2, what: &str) -> Result<()> {
    let edges = extract_edges(mask)?;
    let nearest = edges.nearest(p).ok_or(Error::EmptyMask)?;
    if nearest.distance(p) > ANNOTATION_TOLERANCE + 1e-9 {
        return Err(Error::Validation(format!(
            "{what} contact ({}, {}) is {:.2} px from the contour",
            p.x,
            p.y,
            nearest.distance(p)
        )));
    }
    Ok(())
}
