use std::path::Path;

use image::{GrayImage, Luma, Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::features::VariantScores;
use crate::geometry::{BinaryMask, Point2};

pub const PRIMARY: [u8; 3] = [230, 40, 40];
pub const SECONDARY: [u8; 3] = [40, 120, 230];

const CROSS_ARM: i64 = 4;
const HEATMAP_UPSCALE: u32 = 4;

fn save_err(path: &Path, e: image::ImageError) -> Error {
    Error::Image { path: path.to_path_buf(), message: e.to_string() }
}

/// Mask in gray with a cross at each point; `points` pairs a position with
/// its colour and later crosses are drawn over earlier ones.
pub fn overlay(mask: &BinaryMask, points: &[(Point2, [u8; 3])]) -> RgbImage {
    let mut img = RgbImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        if mask.get(x as i64, y as i64) {
            Rgb([170, 170, 170])
        } else {
            Rgb([0, 0, 0])
        }
    });
    for (p, color) in points {
        let (cx, cy) = (p.x.round() as i64, p.y.round() as i64);
        for d in -CROSS_ARM..=CROSS_ARM {
            for (x, y) in [(cx + d, cy), (cx, cy + d)] {
                if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
                    img.put_pixel(x as u32, y as u32, Rgb(*color));
                }
            }
        }
    }
    img
}

pub fn save_overlay(mask: &BinaryMask, points: &[(Point2, [u8; 3])], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    overlay(mask, points).save_with_format(path, image::ImageFormat::Png).map_err(|e| save_err(path, e))
}

/// Similarity scores of one variant as gray levels: -1 is black, 1 is
/// white, cells without a score stay black.
pub fn heatmap(scores: &VariantScores) -> GrayImage {
    let k = HEATMAP_UPSCALE;
    GrayImage::from_fn(scores.cols as u32 * k, scores.rows as u32 * k, |x, y| {
        let s = scores.scores[(y / k) as usize * scores.cols + (x / k) as usize];
        if s.is_nan() {
            Luma([0])
        } else {
            Luma([(((s + 1.0) / 2.0).clamp(0.0, 1.0) * 255.0).round() as u8])
        }
    })
}

pub fn save_heatmap(scores: &VariantScores, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    heatmap(scores).save_with_format(path, image::ImageFormat::Png).map_err(|e| save_err(path, e))
}
