use std::sync::OnceLock;

use super::fmap::FeatureMap;
use super::global::FeatureSource;
use crate::error::{Error, Result};
use crate::geometry::{apply_variant, BinaryMask, Point2, PoseVariant};

const ANGULAR_BINS: usize = 8;
const RINGS: usize = 3;
/// Log-spaced ring edges as fractions of the outer radius.
const RING_EDGES: [f64; RINGS + 1] = [0.0, 0.25, 0.5, 1.0];
const RADIAL_SAMPLES: usize = 3;
const ANGULAR_SAMPLES: usize = 3;
/// Outer radius in units of the mask's radius of gyration.
const OUTER_RADIUS_GYRATIONS: f64 = 2.0;

pub const DESCRIPTOR_DIM: usize = ANGULAR_BINS * RINGS;

/// Unit-radius sample offsets per bin, index `ring * 8 + angular_bin`.
/// Bins 2..8 are exact quarter turns of bins 0..2, so rotating the mask by
/// 90° permutes descriptor bins without rounding differences.
fn sample_table() -> &'static Vec<Vec<Point2>> {
    static TABLE: OnceLock<Vec<Vec<Point2>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let bin_width = 2.0 * std::f64::consts::PI / ANGULAR_BINS as f64;
        let mut table = vec![Vec::new(); DESCRIPTOR_DIM];
        for ring in 0..RINGS {
            let (lo, hi) = (RING_EDGES[ring], RING_EDGES[ring + 1]);
            for bin in 0..2 {
                let mut base = Vec::new();
                for i in 0..RADIAL_SAMPLES {
                    let rho = lo + (hi - lo) * (i as f64 + 0.5) / RADIAL_SAMPLES as f64;
                    for j in 0..ANGULAR_SAMPLES {
                        let a = (bin as f64 + (j as f64 + 0.5) / ANGULAR_SAMPLES as f64) * bin_width;
                        base.push(Point2::new(rho * a.cos(), rho * a.sin()));
                    }
                }
                for quarter in 0..4 {
                    let rotated = base.iter().map(|p| (0..quarter).fold(*p, |q, _| Point2::new(-q.y, q.x))).collect();
                    table[ring * ANGULAR_BINS + bin + 2 * quarter] = rotated;
                }
            }
        }
        table
    })
}

/// Log-polar occupancy histogram of the foreground around `center`:
/// 8 angular bins × 3 rings out to `outer_radius`, each entry the fraction
/// of the bin's samples that land on foreground. Angular bin `b` spans
/// `[45°·b, 45°·(b+1))` measured as `atan2(dy, dx)` in pixel coordinates.
pub fn shape_context(mask: &BinaryMask, center: Point2, outer_radius: f64) -> [f32; DESCRIPTOR_DIM] {
    let mut out = [0f32; DESCRIPTOR_DIM];
    for (bin, samples) in sample_table().iter().enumerate() {
        let hits = samples.iter().filter(|s| mask.contains(center + **s * outer_radius)).count();
        out[bin] = hits as f32 / samples.len() as f32;
    }
    out
}

/// Shape-context descriptors on an `n × n` grid covering the mask's larger
/// side. The outer radius scales with the mask's radius of gyration so that
/// descriptors are comparable across object sizes.
pub fn compute_fallback_features(mask: &BinaryMask, n: usize) -> Result<FeatureMap> {
    if n < 4 {
        return Err(Error::Validation(format!("feature grid size {n} is below 4")));
    }
    let gyration = mask.radius_of_gyration().ok_or(Error::EmptyMask)?;
    let outer = (OUTER_RADIUS_GYRATIONS * gyration).max(2.0);
    let cell_size = mask.width().max(mask.height()) as f32 / n as f32;
    let mut values = Vec::with_capacity(n * n * DESCRIPTOR_DIM);
    let cs = cell_size as f64;
    for row in 0..n {
        for col in 0..n {
            let c = Point2::new((col as f64 + 0.5) * cs - 0.5, (row as f64 + 0.5) * cs - 0.5);
            values.extend_from_slice(&shape_context(mask, c, outer));
        }
    }
    FeatureMap::new(n, n, DESCRIPTOR_DIM, cell_size, values)
}

/// Computes descriptors on the variant canvas of the mask itself; needs no
/// external files.
#[derive(Debug, Clone, Copy)]
pub struct FallbackFeatures {
    pub grid: usize,
}

impl Default for FallbackFeatures {
    fn default() -> Self {
        Self { grid: 64 }
    }
}

impl FeatureSource for FallbackFeatures {
    fn variant_map(&self, mask: &BinaryMask, variant: PoseVariant) -> Result<Option<FeatureMap>> {
        compute_fallback_features(&apply_variant(mask, variant), self.grid).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(n: usize, c: f64, r: f64) -> BinaryMask {
        BinaryMask::from_fn(n, n, |x, y| (x as f64 - c).hypot(y as f64 - c) <= r).unwrap()
    }

    #[test]
    fn far_background_cells_are_near_zero() {
        let mut m = BinaryMask::empty(128, 128).unwrap();
        for y in 5..20 {
            for x in 5..20 {
                m.set(x, y, true);
            }
        }
        let f = compute_fallback_features(&m, 16).unwrap();
        assert!(f.cell(15, 15).iter().all(|v| *v < 0.01));
        assert!(f.cell(1, 1).iter().any(|v| *v > 0.5));
    }

    #[test]
    fn deterministic() {
        let m = disk(60, 30.0, 12.0);
        assert_eq!(compute_fallback_features(&m, 8).unwrap(), compute_fallback_features(&m.clone(), 8).unwrap());
    }

    #[test]
    fn disk_descriptors_shift_by_two_bins_per_quarter_turn() {
        // Oracle: on a disk centred on a pixel, the boundary point rotated by
        // +90° about the centre sees the same occupancy with every angular
        // bin advanced by two.
        let (c, r) = (50.0, 20.0);
        let m = disk(101, c, r);
        let a = shape_context(&m, Point2::new(c + r, c), 30.0);
        let b = shape_context(&m, Point2::new(c, c + r), 30.0);
        for ring in 0..RINGS {
            for bin in 0..ANGULAR_BINS {
                let shifted = ring * ANGULAR_BINS + (bin + 2) % ANGULAR_BINS;
                assert!((a[ring * ANGULAR_BINS + bin] - b[shifted]).abs() <= 1e-6);
            }
        }
        assert!(a.iter().any(|v| *v > 0.0) && a.contains(&0.0));
    }

    #[test]
    fn empty_mask_is_rejected() {
        assert!(matches!(compute_fallback_features(&BinaryMask::empty(8, 8).unwrap(), 4), Err(Error::EmptyMask)));
    }
}
