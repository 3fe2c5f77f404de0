use super::fmap::FeatureMap;
use crate::geometry::Point2;

/// Cosine similarity; a zero vector on either side gives 0.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (*x as f64, *y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Mean cosine similarity over corresponding offsets of two `m × m` patches
/// centred on the given cells. Offsets falling outside either grid add
/// nothing, but the normaliser stays `m²`.
pub fn patch_similarity_cells(
    f_ref: &FeatureMap,
    f_tgt: &FeatureMap,
    ref_cell: (i64, i64),
    tgt_cell: (i64, i64),
    m: usize,
) -> f64 {
    let half = (m / 2) as i64;
    let inside = |f: &FeatureMap, r: i64, c: i64| r >= 0 && c >= 0 && (r as usize) < f.rows() && (c as usize) < f.cols();
    let mut sum = 0.0;
    for dr in -half..=half {
        for dc in -half..=half {
            let (r1, c1) = (ref_cell.0 + dr, ref_cell.1 + dc);
            let (r2, c2) = (tgt_cell.0 + dr, tgt_cell.1 + dc);
            if inside(f_ref, r1, c1) && inside(f_tgt, r2, c2) {
                sum += cosine(f_ref.cell(r1 as usize, c1 as usize), f_tgt.cell(r2 as usize, c2 as usize));
            }
        }
    }
    sum / (m * m) as f64
}

/// [`patch_similarity_cells`] for canvas points, each mapped to its cell by
/// its own map's cell size.
pub fn patch_similarity(f_ref: &FeatureMap, f_tgt: &FeatureMap, p_ref: Point2, p_tgt: Point2, m: usize) -> f64 {
    patch_similarity_cells(f_ref, f_tgt, f_ref.cell_of(p_ref), f_tgt.cell_of(p_tgt), m)
}
