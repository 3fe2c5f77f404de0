use serde::{Deserialize, Serialize};

use super::{BinaryMask, Point2, Similarity2};
use crate::error::{Error, Result};

pub const VARIANT_COUNT: usize = 24;
const ROTATION_STEP: f64 = std::f64::consts::PI / 6.0;

/// One of 24 pose variants: 12 rotations in 30° steps, optionally preceded
/// by a horizontal flip. Indices 0..12 are unflipped, 12..24 flipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PoseVariant(u8);

impl PoseVariant {
    pub const IDENTITY: PoseVariant = PoseVariant(0);

    pub fn new(index: usize) -> Result<Self> {
        if index < VARIANT_COUNT {
            Ok(Self(index as u8))
        } else {
            Err(Error::Validation(format!("pose variant index {index} out of range 0..24")))
        }
    }

    pub fn from_parts(reflect: bool, k: usize) -> Self {
        Self((k % 12 + if reflect { 12 } else { 0 }) as u8)
    }

    pub fn all() -> impl Iterator<Item = PoseVariant> {
        (0..VARIANT_COUNT as u8).map(PoseVariant)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn reflect(self) -> bool {
        self.0 >= 12
    }

    /// Rotation step count `k`, the rotation being `k · 30°`.
    pub fn step(self) -> usize {
        self.0 as usize % 12
    }

    pub fn rotation(self) -> f64 {
        self.step() as f64 * ROTATION_STEP
    }
}

impl TryFrom<u8> for PoseVariant {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        PoseVariant::new(v as usize)
    }
}

impl From<PoseVariant> for u8 {
    fn from(v: PoseVariant) -> u8 {
        v.0
    }
}

/// Maps coordinates of a `width × height` image to the same image after the
/// variant: flip about the vertical centre line, then rotate about the image
/// centre `(width/2, height/2)`.
pub fn variant_transform(variant: PoseVariant, width: usize, height: usize) -> Similarity2 {
    let center = Point2::new(width as f64 / 2.0, height as f64 / 2.0);
    let rot = Similarity2::rotation_about(variant.rotation(), center);
    if variant.reflect() {
        let flip = Similarity2 { rotation: 0.0, reflect: true, scale: 1.0, translation: Point2::new(width as f64, 0.0) };
        rot.compose(&flip)
    } else {
        rot
    }
}

/// Side of the square canvas that holds any rotation of a `width × height` mask.
pub fn variant_canvas_side(width: usize, height: usize) -> usize {
    (width as f64).hypot(height as f64).ceil() as usize
}

fn canvas_offset(width: usize, height: usize) -> (usize, usize) {
    let side = variant_canvas_side(width, height);
    ((side - width) / 2, (side - height) / 2)
}

/// Maps original mask coordinates to coordinates on the variant canvas
/// produced by [`apply_variant`].
pub fn variant_canvas_transform(variant: PoseVariant, width: usize, height: usize) -> Similarity2 {
    let side = variant_canvas_side(width, height);
    let (ox, oy) = canvas_offset(width, height);
    variant_transform(variant, side, side).compose(&Similarity2::translation(ox as f64, oy as f64))
}

/// Centres the mask on a rotation-safe square canvas and resamples it under
/// the variant with nearest-neighbour lookup.
pub fn apply_variant(mask: &BinaryMask, variant: PoseVariant) -> BinaryMask {
    let side = variant_canvas_side(mask.width(), mask.height());
    let inv = variant_canvas_transform(variant, mask.width(), mask.height()).inverse();
    BinaryMask::from_fn(side, side, |x, y| mask.contains(inv.apply(Point2::new(x as f64, y as f64))))
        .expect("canvas is at least as large as the mask")
}
