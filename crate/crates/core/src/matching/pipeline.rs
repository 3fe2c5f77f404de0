use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::MatchConfig;
use super::demo::ReferenceDemo;
use crate::curvature::{local_score, multiscale_estimate, ContactPair, CurvatureEstimate};
use crate::error::{Error, Result};
use crate::features::{global_match, FeatureSource, GlobalMatch, GlobalMatchOutput};
use crate::geometry::{extract_edges, variant_canvas_transform, BinaryMask, Point2, PoseVariant};

/// One scored tool/object contact pair on the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchCandidate {
    pub p_t_prime: Point2,
    pub p_o_prime: Point2,
    pub variant: PoseVariant,
    pub s_dino: f64,
    pub s_curv: f64,
    pub combined: f64,
    /// Position of the originating match in the global ranking.
    pub global_rank: usize,
    pub tool_estimate: CurvatureEstimate,
    pub object_estimate: CurvatureEstimate,
}

impl MatchCandidate {
    pub fn contact_pair(&self) -> ContactPair {
        ContactPair { tool_point: self.tool_estimate, object_point: self.object_estimate }
    }
}

/// Curvature at the demonstrated contact points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceGeometry {
    pub tool: CurvatureEstimate,
    pub object: CurvatureEstimate,
}

impl ReferenceGeometry {
    pub fn pair(&self) -> ContactPair {
        ContactPair { tool_point: self.tool, object_point: self.object }
    }
}

/// Ranked candidates together with the intermediate results behind them.
#[derive(Debug, Clone)]
pub struct MatchResult {
    pub candidates: Vec<MatchCandidate>,
    pub reference: ReferenceGeometry,
    pub global: GlobalMatchOutput,
}

/// Curvature of the demonstrated contact on both masks.
pub fn reference_geometry(demo: &ReferenceDemo, config: &MatchConfig) -> Result<ReferenceGeometry> {
    let estimate = |mask: &BinaryMask, p: Point2| -> Result<CurvatureEstimate> {
        let edges = extract_edges(mask)?;
        multiscale_estimate(mask, &edges, p, &config.pyramid_for(mask), config.alpha, config.delta, None)
    };
    Ok(ReferenceGeometry { tool: estimate(&demo.tool_mask, demo.p_t)?, object: estimate(&demo.object_mask, demo.p_o)? })
}

/// Proposes object contact points by curvature alone.
///
/// Every `object_stride`-th contour point is estimated at its motion
/// functional scale; points whose sign matches the reference are ranked by
/// how close their radius is to the reference radius. Each kept point is
/// then compared with the contour points skipped around it, and replaced by
/// whichever of them is closer still.
pub fn propose_object_point(
    object_mask: &BinaryMask,
    reference: &CurvatureEstimate,
    config: &MatchConfig,
) -> Result<Vec<(Point2, CurvatureEstimate)>> {
    let edges = extract_edges(object_mask)?;
    let pyramid = config.pyramid_for(object_mask);
    let points = edges.points();
    let stride = config.object_stride;
    let estimate = |i: usize| -> Option<CurvatureEstimate> {
        multiscale_estimate(object_mask, &edges, points[i], &pyramid, config.alpha, config.delta, None)
            .ok()
            .filter(|e| e.sign == reference.sign)
    };
    let gap = |e: &CurvatureEstimate| (e.radius_of_curvature - reference.radius_of_curvature).abs();
    let order = |a: &(usize, CurvatureEstimate), b: &(usize, CurvatureEstimate)| {
        gap(&a.1).total_cmp(&gap(&b.1)).then(a.1.point.y.total_cmp(&b.1.point.y)).then(a.1.point.x.total_cmp(&b.1.point.x))
    };

    let probes: Vec<usize> = (0..points.len()).step_by(stride).collect();
    let mut found: Vec<(usize, CurvatureEstimate)> = probes.par_iter().filter_map(|&i| estimate(i).map(|e| (i, e))).collect();
    found.sort_by(order);
    found.truncate(config.object_candidates);

    let half = stride / 2;
    let mut refined: Vec<(usize, CurvatureEstimate)> = found
        .par_iter()
        .map(|&(i, e)| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(points.len() - 1);
            (lo..=hi)
                .filter(|&j| j != i && points[j].distance(points[i]) <= stride as f64)
                .filter_map(|j| estimate(j).map(|f| (j, f)))
                .fold((i, e), |best, cand| if order(&cand, &best).is_lt() { cand } else { best })
        })
        .collect();
    refined.sort_by(order);
    refined.dedup_by(|a, b| a.1.point == b.1.point);
    if refined.is_empty() {
        return Err(Error::NoCandidates(format!("no object contour point has {:?} curvature", reference.sign)));
    }
    Ok(refined.into_iter().map(|(_, e)| (e.point, e)).collect())
}

/// Ranks contact pairs on a new tool and object against the demonstration.
pub fn match_contact(
    demo: &ReferenceDemo,
    demo_features: &dyn FeatureSource,
    tool_mask: &BinaryMask,
    tool_features: &dyn FeatureSource,
    object_mask: &BinaryMask,
    config: &MatchConfig,
) -> Result<Vec<MatchCandidate>> {
    match_contact_detailed(demo, demo_features, tool_mask, tool_features, object_mask, config).map(|r| r.candidates)
}

pub fn match_contact_detailed(
    demo: &ReferenceDemo,
    demo_features: &dyn FeatureSource,
    tool_mask: &BinaryMask,
    tool_features: &dyn FeatureSource,
    object_mask: &BinaryMask,
    config: &MatchConfig,
) -> Result<MatchResult> {
    config.validate()?;
    let reference = reference_geometry(demo, config)?;
    debug!(
        "reference tool r={:.2} {:?}, object r={:.2} {:?}",
        reference.tool.radius_of_curvature, reference.tool.sign, reference.object.radius_of_curvature, reference.object.sign
    );

    let f_ref = demo_features
        .variant_map(&demo.tool_mask, PoseVariant::IDENTITY)?
        .ok_or_else(|| Error::Validation("reference feature map for the identity pose is missing".into()))?;
    let canvas = variant_canvas_transform(PoseVariant::IDENTITY, demo.tool_mask.width(), demo.tool_mask.height());
    let global = global_match(&f_ref, tool_mask, canvas.apply(demo.p_t), &config.global_params(), tool_features)?;
    if global.matches.is_empty() {
        return Err(Error::NoCandidates("global matching returned no tool points".into()));
    }

    let tool_edges = extract_edges(tool_mask)?;
    let tool_pyramid = config.pyramid_for(tool_mask);
    let refined: Vec<(usize, &GlobalMatch, CurvatureEstimate)> = global
        .matches
        .iter()
        .enumerate()
        .filter_map(|(rank, g)| {
            let est = multiscale_estimate(
                tool_mask,
                &tool_edges,
                g.point,
                &tool_pyramid,
                config.alpha,
                config.delta,
                Some(reference.tool.sign),
            );
            match est {
                Ok(e) => Some((rank, g, e)),
                Err(e) => {
                    debug!("global match {rank} at ({}, {}) dropped: {e}", g.point.x, g.point.y);
                    None
                }
            }
        })
        .collect();
    if refined.is_empty() {
        return Err(Error::NoCandidates("no global match has the reference tool convexity".into()));
    }

    let objects = propose_object_point(object_mask, &reference.object, config)?;
    let reference_pair = reference.pair();
    let mut candidates = Vec::new();
    for (rank, g, tool) in &refined {
        for (p_o, object) in &objects {
            let Ok(pair) = ContactPair::new(*tool, *object) else {
                continue;
            };
            let s_curv = local_score(&reference_pair, &pair);
            candidates.push(MatchCandidate {
                p_t_prime: tool.point,
                p_o_prime: *p_o,
                variant: g.variant,
                s_dino: g.s_dino,
                s_curv,
                combined: g.s_dino - config.lambda * s_curv,
                global_rank: *rank,
                tool_estimate: *tool,
                object_estimate: *object,
            });
        }
    }
    rank_candidates(&mut candidates);
    if candidates.is_empty() {
        return Err(Error::NoCandidates("no sign-compatible tool/object pair".into()));
    }
    info!("{} candidates, best combined {:.4}", candidates.len(), candidates[0].combined);
    Ok(MatchResult { candidates, reference, global })
}

/// Sorts by combined score, then `s_dino`, then tool and object point
/// `(row, col)`, and drops repeated point pairs.
pub fn rank_candidates(candidates: &mut Vec<MatchCandidate>) {
    candidates.sort_by(|a, b| {
        b.combined
            .total_cmp(&a.combined)
            .then(b.s_dino.total_cmp(&a.s_dino))
            .then(a.p_t_prime.y.total_cmp(&b.p_t_prime.y))
            .then(a.p_t_prime.x.total_cmp(&b.p_t_prime.x))
            .then(a.p_o_prime.y.total_cmp(&b.p_o_prime.y))
            .then(a.p_o_prime.x.total_cmp(&b.p_o_prime.x))
            .then(a.global_rank.cmp(&b.global_rank))
    });
    let mut seen = std::collections::HashSet::new();
    candidates.retain(|c| {
        seen.insert((c.p_t_prime.x.to_bits(), c.p_t_prime.y.to_bits(), c.p_o_prime.x.to_bits(), c.p_o_prime.y.to_bits()))
    });
}

/// A candidate tool for [`select_tool`].
pub struct ToolOption<'a> {
    pub mask: &'a BinaryMask,
    pub features: &'a dyn FeatureSource,
}

/// Result of choosing among several tools.
#[derive(Debug, Clone)]
pub struct ToolChoice {
    pub index: usize,
    pub best: MatchCandidate,
    pub result: MatchResult,
    /// Per-tool outcome: the best combined score, or the error message.
    pub outcomes: Vec<std::result::Result<f64, String>>,
}

/// Matches every tool and returns the one whose best candidate scores
/// highest, preferring the lower index on ties.
pub fn select_tool(
    demo: &ReferenceDemo,
    demo_features: &dyn FeatureSource,
    tools: &[ToolOption<'_>],
    object_mask: &BinaryMask,
    config: &MatchConfig,
) -> Result<ToolChoice> {
    if tools.is_empty() {
        return Err(Error::Validation("no tools to choose from".into()));
    }
    let results: Vec<Result<MatchResult>> =
        tools.par_iter().map(|t| match_contact_detailed(demo, demo_features, t.mask, t.features, object_mask, config)).collect();
    let mut chosen: Option<(usize, MatchResult)> = None;
    let mut outcomes = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(m) => {
                let score = m.candidates[0].combined;
                outcomes.push(Ok(score));
                if chosen.as_ref().is_none_or(|(_, c)| score > c.candidates[0].combined) {
                    chosen = Some((i, m));
                }
            }
            Err(e @ (Error::NoCandidates(_) | Error::NoMatchingConvexity)) => outcomes.push(Err(e.to_string())),
            Err(e) => return Err(e),
        }
    }
    let (index, result) = chosen.ok_or_else(|| Error::NoCandidates("every tool failed to match".into()))?;
    Ok(ToolChoice { index, best: result.candidates[0].clone(), result, outcomes })
}
