use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fmap::FeatureMap;
use super::pca::pca_reduce;
use super::similarity::patch_similarity_cells;
use crate::error::{Error, Result};
use crate::geometry::{apply_variant, variant_canvas_transform, BinaryMask, Point2, PoseVariant};

const NMS_RADIUS_CELLS: i64 = 2;

/// Supplies a feature map for each pose variant of a mask, expressed on the
/// variant canvas of [`apply_variant`]. `Ok(None)` skips the variant.
pub trait FeatureSource: Sync {
    fn variant_map(&self, mask: &BinaryMask, variant: PoseVariant) -> Result<Option<FeatureMap>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalMatchParams {
    pub k: usize,
    /// Patch side, odd.
    pub m: usize,
    /// PCA output dimension; `None` scores raw descriptors.
    pub pca_dim: Option<usize>,
}

impl Default for GlobalMatchParams {
    fn default() -> Self {
        Self { k: 3, m: 3, pca_dim: Some(16) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalMatch {
    /// Foreground pixel of the target mask, in original target coordinates.
    pub point: Point2,
    pub variant: PoseVariant,
    pub s_dino: f64,
    /// `(row, col)` of the winning cell in the variant's grid.
    pub cell: (usize, usize),
    /// Representative foreground pixel of the cell on the variant canvas.
    pub canvas_point: Point2,
}

/// Scores of every foreground cell of one variant (`NaN` elsewhere).
#[derive(Debug, Clone)]
pub struct VariantScores {
    pub variant: PoseVariant,
    pub rows: usize,
    pub cols: usize,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GlobalMatchOutput {
    pub matches: Vec<GlobalMatch>,
    pub scores: Vec<VariantScores>,
}

struct CellHit {
    score: f64,
    row: usize,
    col: usize,
    canvas_point: Point2,
}

/// Foreground cells of `canvas` on `map`'s grid with, for each, the
/// foreground pixel closest to the cell centre shifted by `offset` cells.
fn foreground_cells(map: &FeatureMap, canvas: &BinaryMask, offset: Point2) -> Vec<(usize, usize, Point2)> {
    let shift = offset * map.cell_size();
    let mut best: Vec<Option<(f64, Point2)>> = vec![None; map.rows() * map.cols()];
    for (x, y) in canvas.foreground() {
        let p = Point2::new(x as f64, y as f64);
        let (r, c) = map.cell_of(p);
        if r < 0 || c < 0 || r as usize >= map.rows() || c as usize >= map.cols() {
            continue;
        }
        let (r, c) = (r as usize, c as usize);
        let d = p.distance(map.cell_center(r, c) + shift);
        let slot = &mut best[r * map.cols() + c];
        if slot.is_none_or(|(bd, _)| d < bd) {
            *slot = Some((d, p));
        }
    }
    best.iter().enumerate().filter_map(|(i, b)| b.map(|(_, p)| (i / map.cols(), i % map.cols(), p))).collect()
}

/// Greedy non-maximum suppression within one variant; returns at most `keep`.
fn suppress(mut hits: Vec<CellHit>, keep: usize) -> Vec<CellHit> {
    hits.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.row.cmp(&b.row)).then(a.col.cmp(&b.col)));
    let mut kept: Vec<CellHit> = Vec::new();
    for h in hits {
        if kept.len() == keep {
            break;
        }
        let near = kept.iter().any(|k| {
            (k.row as i64 - h.row as i64).abs() <= NMS_RADIUS_CELLS && (k.col as i64 - h.col as i64).abs() <= NMS_RADIUS_CELLS
        });
        if !near {
            kept.push(h);
        }
    }
    kept
}

/// Proposes the `k` target points most similar to `p_ref` across all pose
/// variants of the target mask.
///
/// `f_ref` is the reference map and `p_ref` a point on its canvas. The
/// reference and every available variant map are pooled for PCA, each
/// foreground cell of each variant is scored by patch similarity, cells are
/// thinned by non-maximum suppression (radius 2 cells) within each variant,
/// and the survivors are ranked by score, then variant index, row, column.
/// Within a winning cell, the reported point is the foreground pixel closest
/// to the position `p_ref` occupies inside its own cell.
pub fn global_match(
    f_ref: &FeatureMap,
    mask_tgt: &BinaryMask,
    p_ref: Point2,
    params: &GlobalMatchParams,
    source: &dyn FeatureSource,
) -> Result<GlobalMatchOutput> {
    if mask_tgt.is_empty() {
        return Err(Error::NoForeground);
    }
    if params.m.is_multiple_of(2) || params.k == 0 {
        return Err(Error::Validation(format!("patch side {} must be odd and k {} positive", params.m, params.k)));
    }
    let variants: Vec<(PoseVariant, BinaryMask, FeatureMap)> = PoseVariant::all()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|v| Ok(source.variant_map(mask_tgt, v)?.map(|f| (v, apply_variant(mask_tgt, v), f))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    debug!("global match over {} variant maps", variants.len());

    let (f_ref, maps) = match params.pca_dim {
        Some(d) => {
            let mut pooled = Vec::with_capacity(variants.len() + 1);
            pooled.push(f_ref.clone());
            pooled.extend(variants.iter().map(|(_, _, f)| f.clone()));
            let d = d.min(f_ref.dim());
            let (_, mut projected) = pca_reduce(&pooled, d)?;
            let rest = projected.split_off(1);
            (projected.pop().unwrap(), rest)
        }
        None => (f_ref.clone(), variants.iter().map(|(_, _, f)| f.clone()).collect()),
    };
    let ref_cell = f_ref.cell_of(p_ref);
    let sub_cell =
        if ref_cell.0 >= 0 && ref_cell.1 >= 0 && (ref_cell.0 as usize) < f_ref.rows() && (ref_cell.1 as usize) < f_ref.cols() {
            (p_ref - f_ref.cell_center(ref_cell.0 as usize, ref_cell.1 as usize)) * (1.0 / f_ref.cell_size())
        } else {
            Point2::default()
        };

    let per_variant: Vec<(Vec<CellHit>, VariantScores)> = variants
        .par_iter()
        .zip(maps.par_iter())
        .map(|((v, canvas, _), map)| {
            let mut scores = vec![f64::NAN; map.rows() * map.cols()];
            let hits: Vec<CellHit> = foreground_cells(map, canvas, sub_cell)
                .into_iter()
                .map(|(row, col, canvas_point)| {
                    let score = patch_similarity_cells(&f_ref, map, ref_cell, (row as i64, col as i64), params.m);
                    scores[row * map.cols() + col] = score;
                    CellHit { score, row, col, canvas_point }
                })
                .collect();
            (suppress(hits, params.k), VariantScores { variant: *v, rows: map.rows(), cols: map.cols(), scores })
        })
        .collect();

    let mut ranked: Vec<(PoseVariant, CellHit)> = Vec::new();
    let mut scores = Vec::with_capacity(per_variant.len());
    for ((v, _, _), (hits, s)) in variants.iter().zip(per_variant) {
        ranked.extend(hits.into_iter().map(|h| (*v, h)));
        scores.push(s);
    }
    ranked
        .sort_by(|(va, a), (vb, b)| b.score.total_cmp(&a.score).then(va.cmp(vb)).then(a.row.cmp(&b.row)).then(a.col.cmp(&b.col)));
    let matches = ranked
        .into_iter()
        .take(params.k)
        .map(|(v, h)| {
            let back = variant_canvas_transform(v, mask_tgt.width(), mask_tgt.height()).inverse().apply(h.canvas_point);
            let point = mask_tgt.nearest_foreground(back).expect("target has foreground");
            GlobalMatch { point, variant: v, s_dino: h.score, cell: (h.row, h.col), canvas_point: h.canvas_point }
        })
        .collect();
    Ok(GlobalMatchOutput { matches, scores })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FallbackFeatures;
    use crate::suite::reference_demo;

    fn self_query(mask: &BinaryMask, p: Point2, params: &GlobalMatchParams) -> (FeatureMap, Point2, GlobalMatchOutput) {
        let f = FallbackFeatures::default();
        let f_ref = f.variant_map(mask, PoseVariant::IDENTITY).unwrap().unwrap();
        let p_ref = variant_canvas_transform(PoseVariant::IDENTITY, mask.width(), mask.height()).apply(p);
        let out = global_match(&f_ref, mask, p_ref, params, &f).unwrap();
        (f_ref, p_ref, out)
    }

    #[test]
    fn self_match_returns_the_query_point() {
        let (demo, _) = reference_demo().unwrap();
        let (f_ref, _, out) = self_query(&demo.tool_mask, demo.p_t, &GlobalMatchParams::default());
        let top = &out.matches[0];
        assert_eq!(top.variant, PoseVariant::IDENTITY);
        assert!(top.s_dino >= 0.999, "{}", top.s_dino);
        assert!(top.point.distance(demo.p_t) <= f_ref.cell_size(), "{:?} vs {:?}", top.point, demo.p_t);
        assert_eq!(out.matches.len(), 3);
        assert_eq!(out.scores.len(), 24);
    }

    #[test]
    fn quarter_turn_is_recovered() {
        let (demo, _) = reference_demo().unwrap();
        let quarter = PoseVariant::from_parts(false, 3);
        let turned = apply_variant(&demo.tool_mask, quarter);
        let to_turned = variant_canvas_transform(quarter, demo.tool_mask.width(), demo.tool_mask.height());

        let f = FallbackFeatures::default();
        let f_ref = f.variant_map(&demo.tool_mask, PoseVariant::IDENTITY).unwrap().unwrap();
        let p_ref =
            variant_canvas_transform(PoseVariant::IDENTITY, demo.tool_mask.width(), demo.tool_mask.height()).apply(demo.p_t);
        let out = global_match(&f_ref, &turned, p_ref, &GlobalMatchParams::default(), &f).unwrap();
        let back = to_turned.inverse().apply(out.matches[0].point);
        assert!(back.distance(demo.p_t) <= 2.0 * f_ref.cell_size(), "{back:?} vs {:?}", demo.p_t);
    }

    struct Scaled(FallbackFeatures, f32);

    impl FeatureSource for Scaled {
        fn variant_map(&self, mask: &BinaryMask, variant: PoseVariant) -> Result<Option<FeatureMap>> {
            Ok(self.0.variant_map(mask, variant)?.map(|m| m.scaled(self.1)))
        }
    }

    #[test]
    fn uniform_feature_scaling_keeps_the_ranking() {
        let (demo, placed) = reference_demo().unwrap();
        let f = FallbackFeatures::default();
        let f_ref = f.variant_map(&demo.tool_mask, PoseVariant::IDENTITY).unwrap().unwrap();
        let p_ref =
            variant_canvas_transform(PoseVariant::IDENTITY, demo.tool_mask.width(), demo.tool_mask.height()).apply(demo.p_t);
        for pca_dim in [None, Some(16)] {
            let params = GlobalMatchParams { k: 5, pca_dim, ..GlobalMatchParams::default() };
            let a = global_match(&f_ref, &placed.mask, p_ref, &params, &f).unwrap();
            let b = global_match(&f_ref.scaled(0.25), &placed.mask, p_ref, &params, &Scaled(f, 0.25)).unwrap();
            let key = |o: &GlobalMatchOutput| o.matches.iter().map(|m| (m.variant, m.cell, m.point)).collect::<Vec<_>>();
            assert_eq!(key(&a), key(&b), "pca {pca_dim:?}");
        }
    }

    #[test]
    fn matches_lie_on_the_target_and_respect_suppression() {
        let (demo, _) = reference_demo().unwrap();
        let params = GlobalMatchParams { k: 24, ..GlobalMatchParams::default() };
        let (f_ref, _, out) = self_query(&demo.tool_mask, demo.p_t, &params);
        assert!(out.matches.windows(2).all(|w| w[0].s_dino >= w[1].s_dino));
        for (i, a) in out.matches.iter().enumerate() {
            assert!(demo.tool_mask.contains(a.point));
            let back = variant_canvas_transform(a.variant, demo.tool_mask.width(), demo.tool_mask.height())
                .inverse()
                .apply(a.canvas_point);
            assert!(a.point.distance(back) <= f_ref.cell_size());
            for b in &out.matches[i + 1..] {
                if a.variant == b.variant {
                    let far = (a.cell.0 as i64 - b.cell.0 as i64).abs() > 2 || (a.cell.1 as i64 - b.cell.1 as i64).abs() > 2;
                    assert!(far, "{:?} {:?}", a.cell, b.cell);
                }
            }
        }
    }

    #[test]
    fn invalid_queries() {
        let (demo, _) = reference_demo().unwrap();
        let f = FallbackFeatures::default();
        let f_ref = f.variant_map(&demo.tool_mask, PoseVariant::IDENTITY).unwrap().unwrap();
        let empty = BinaryMask::empty(20, 20).unwrap();
        assert!(matches!(
            global_match(&f_ref, &empty, Point2::default(), &GlobalMatchParams::default(), &f),
            Err(Error::NoForeground)
        ));
        let even = GlobalMatchParams { m: 4, ..GlobalMatchParams::default() };
        assert!(matches!(global_match(&f_ref, &demo.tool_mask, Point2::default(), &even, &f), Err(Error::Validation(_))));
    }
}
