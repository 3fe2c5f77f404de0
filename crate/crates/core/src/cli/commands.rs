use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scene::{DemoSpec, LoadedScene, SceneFile, TargetSpec, FALLBACK_FEATURES};
use super::viz::{save_heatmap, save_overlay, PRIMARY, SECONDARY};
use crate::error::{Error, Result};
use crate::matching::{
    match_contact_detailed, select_tool, MatchCandidate, MatchConfig, MatchResult, ReferenceGeometry, ToolOption,
};
use crate::motion::{rank_and_verify, Selection, SelectionOptions};
use crate::suite::{generate_scenes, reference_demo, PlacedHook};

/// Command-line adjustments applied on top of a scene's configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub patch: Option<usize>,
    pub topk: Option<usize>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub pyramid: Option<Vec<f64>>,
    pub fallback_features: bool,
    pub max_sim_candidates: Option<usize>,
    pub no_fallback_select: bool,
}

impl Overrides {
    pub fn apply(&self, config: &MatchConfig) -> Result<MatchConfig> {
        let mut c = config.clone();
        if let Some(v) = self.lambda {
            c.lambda = v;
        }
        if let Some(v) = self.patch {
            c.m = v;
        }
        if let Some(v) = self.topk {
            c.k = v;
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = &self.pyramid {
            c.pyramid = v.clone();
        }
        if let Some(v) = self.max_sim_candidates {
            c.max_sim_candidates = v;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Wall-clock seconds spent in each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load: f64,
    pub matching: f64,
    pub verification: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSelectionReport {
    pub index: usize,
    /// Best combined score per tool, `None` where matching found nothing.
    pub scores: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub scene: PathBuf,
    pub config: MatchConfig,
    pub reference: ReferenceGeometry,
    pub candidates: Vec<MatchCandidate>,
    pub selection: Selection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_selection: Option<ToolSelectionReport>,
    pub timings: Timings,
}

impl MatchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json { path: PathBuf::new(), source })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

fn selection_options(scene: &LoadedScene, config: &MatchConfig, overrides: &Overrides) -> SelectionOptions {
    SelectionOptions {
        max_sim_candidates: config.max_sim_candidates,
        fallback: !overrides.no_fallback_select,
        tolerances: scene.file.tolerances,
    }
}

fn write_viz(dir: &Path, scene: &LoadedScene, tool: usize, result: &MatchResult, selection: &Selection) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let demo = &scene.demo;
    let target = &scene.targets[tool];
    save_overlay(&demo.tool_mask, &[(demo.p_t, PRIMARY)], dir.join("reference_tool.png"))?;
    save_overlay(&demo.object_mask, &[(demo.p_o, PRIMARY)], dir.join("reference_object.png"))?;
    let mut tool_points: Vec<_> = result.candidates.iter().map(|c| (c.p_t_prime, SECONDARY)).collect();
    tool_points.push((selection.candidate.p_t_prime, PRIMARY));
    save_overlay(&target.tool_mask, &tool_points, dir.join("target_tool.png"))?;
    let mut object_points: Vec<_> = result.candidates.iter().map(|c| (c.p_o_prime, SECONDARY)).collect();
    object_points.push((selection.candidate.p_o_prime, PRIMARY));
    save_overlay(&target.object_mask, &object_points, dir.join("target_object.png"))?;
    for s in &result.global.scores {
        save_heatmap(s, dir.join(format!("similarity_v{:02}.png", s.variant.index())))?;
    }
    Ok(())
}

fn match_loaded(scene: &LoadedScene, overrides: &Overrides, viz: Option<&Path>, load: f64) -> Result<MatchReport> {
    let started = Instant::now();
    let config = overrides.apply(&scene.file.config)?;
    let target = scene.targets.first().ok_or_else(|| Error::Validation("scene has no targets".into()))?;
    let result = match_contact_detailed(
        &scene.demo,
        scene.demo_features.source(),
        &target.tool_mask,
        target.features.source(),
        &target.object_mask,
        &config,
    )?;
    let matching = started.elapsed().as_secs_f64();
    let verify_started = Instant::now();
    let selection = rank_and_verify(
        &result.candidates,
        &scene.demo,
        &result.reference,
        &target.tool_mask,
        &target.object_mask,
        &scene.obstacles,
        &selection_options(scene, &config, overrides),
    )?;
    let verification = verify_started.elapsed().as_secs_f64();
    if let Some(dir) = viz {
        write_viz(dir, scene, 0, &result, &selection)?;
    }
    Ok(MatchReport {
        scene: scene.path.clone(),
        config,
        reference: result.reference,
        candidates: result.candidates,
        selection,
        tool_selection: None,
        timings: Timings { load, matching, verification, total: load + matching + verification },
    })
}

/// Matches the first target of a scene and verifies the ranked candidates.
/// Matches an already loaded scene's first target.
pub fn match_scene(scene: &LoadedScene, overrides: &Overrides) -> Result<MatchReport> {
    match_loaded(scene, overrides, None, 0.0)
}

pub fn cmd_match(scene_path: impl AsRef<Path>, overrides: &Overrides, viz: Option<&Path>) -> Result<MatchReport> {
    let started = Instant::now();
    let scene = LoadedScene::load(scene_path, overrides.fallback_features)?;
    match_loaded(&scene, overrides, viz, started.elapsed().as_secs_f64())
}

/// Chooses among the scene's target tools for the first target's object,
/// then verifies the chosen tool's candidates.
pub fn cmd_select_tool(scene_path: impl AsRef<Path>, overrides: &Overrides, viz: Option<&Path>) -> Result<MatchReport> {
    let started = Instant::now();
    let scene = LoadedScene::load(scene_path, overrides.fallback_features)?;
    let load = started.elapsed().as_secs_f64();
    let config = overrides.apply(&scene.file.config)?;
    let object = &scene.targets.first().ok_or_else(|| Error::Validation("scene lists no tools".into()))?.object_mask;
    if scene.targets.iter().any(|t| t.object_mask != *object) {
        warn!("targets disagree on the object mask; using the first");
    }

    let match_started = Instant::now();
    let tools: Vec<ToolOption<'_>> =
        scene.targets.iter().map(|t| ToolOption { mask: &t.tool_mask, features: t.features.source() }).collect();
    let choice = select_tool(&scene.demo, scene.demo_features.source(), &tools, object, &config)?;
    let matching = match_started.elapsed().as_secs_f64();
    info!("tool {} selected", choice.index);

    let verify_started = Instant::now();
    let tool = &scene.targets[choice.index];
    let selection = rank_and_verify(
        &choice.result.candidates,
        &scene.demo,
        &choice.result.reference,
        &tool.tool_mask,
        object,
        &scene.obstacles,
        &selection_options(&scene, &config, overrides),
    )?;
    let verification = verify_started.elapsed().as_secs_f64();
    if let Some(dir) = viz {
        write_viz(dir, &scene, choice.index, &choice.result, &selection)?;
    }
    Ok(MatchReport {
        scene: scene.path.clone(),
        config,
        reference: choice.result.reference,
        candidates: choice.result.candidates,
        selection,
        tool_selection: Some(ToolSelectionReport {
            index: choice.index,
            scores: choice.outcomes.iter().map(|o| o.as_ref().ok().copied()).collect(),
        }),
        timings: Timings { load, matching, verification, total: load + matching + verification },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub seed: u64,
    pub count: usize,
    /// Scene files relative to the suite directory.
    pub scenes: Vec<PathBuf>,
}

pub const SUITE_MANIFEST: &str = "suite.json";

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes the reference demonstration and `count` generated hook/disk
/// scenes under `out`.
pub fn cmd_gen_suite(seed: u64, count: usize, out: impl AsRef<Path>) -> Result<SuiteManifest> {
    if count == 0 {
        return Err(Error::Validation("scene count must be at least 1".into()));
    }
    let out = out.as_ref();
    let reference_dir = out.join("reference");
    create_dir(&reference_dir)?;
    let (demo, _) = reference_demo()?;
    demo.tool_mask.save(reference_dir.join("tool.png"))?;
    demo.object_mask.save(reference_dir.join("object.png"))?;
    demo.trajectory.save(reference_dir.join("trajectory.json"))?;

    let demo_spec = |prefix: &str| DemoSpec {
        tool_mask: Path::new(prefix).join("tool.png"),
        object_mask: Path::new(prefix).join("object.png"),
        p_t: demo.p_t,
        p_o: demo.p_o,
        trajectory: Path::new(prefix).join("trajectory.json"),
        features: FALLBACK_FEATURES.into(),
    };
    let target = |tool: &str, object: &str| TargetSpec {
        tool_mask: tool.into(),
        object_mask: object.into(),
        features: FALLBACK_FEATURES.into(),
    };
    SceneFile {
        demo: demo_spec(""),
        targets: vec![target("tool.png", "object.png")],
        obstacles: Vec::new(),
        config: MatchConfig::default(),
        tolerances: Default::default(),
        generated: None,
    }
    .write(reference_dir.join("scene.json"))?;

    let mut scenes = Vec::with_capacity(count);
    for (i, scene) in generate_scenes(seed, count)?.into_iter().enumerate() {
        let name = format!("scene_{i:03}");
        let dir = out.join(&name);
        create_dir(&dir)?;
        scene.tool.mask.save(dir.join("tool.png"))?;
        scene.object_mask.save(dir.join("object.png"))?;
        SceneFile {
            demo: demo_spec("../reference"),
            targets: vec![target("tool.png", "object.png")],
            obstacles: Vec::new(),
            config: MatchConfig::default(),
            tolerances: Default::default(),
            generated: Some(scene.params),
        }
        .write(dir.join("scene.json"))?;
        scenes.push(Path::new(&name).join("scene.json"));
    }
    let manifest = SuiteManifest { seed, count, scenes };
    let path = out.join(SUITE_MANIFEST);
    let text = serde_json::to_string_pretty(&manifest).map_err(|source| Error::Json { path: path.clone(), source })?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// One benchmark row; `seconds` is the only timing column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scene: String,
    /// `verified`, `unverified`, `no_candidates`, `no_verified_candidate` or `error`.
    pub status: String,
    pub verified: bool,
    pub runs: usize,
    pub rank: Option<usize>,
    pub tool_x: Option<f64>,
    pub tool_y: Option<f64>,
    pub object_x: Option<f64>,
    pub object_y: Option<f64>,
    pub combined: Option<f64>,
    /// Whether the tool point lies on the generated hook's inner bend.
    pub inner_bend: Option<bool>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub scenes: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// `NaN` when nothing succeeded.
    pub mean_runs_per_success: f64,
    pub mean_seconds: f64,
    pub rows: Vec<BenchRow>,
}

/// Scene files of a suite: from its manifest when present, otherwise every
/// `*/scene.json` in name order.
pub fn suite_scenes(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let manifest = dir.join(SUITE_MANIFEST);
    let scenes = if manifest.exists() {
        let text = std::fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
        let m: SuiteManifest = serde_json::from_str(&text).map_err(|source| Error::Json { path: manifest.clone(), source })?;
        m.scenes.into_iter().map(|p| dir.join(p)).collect()
    } else {
        let mut found: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path().join("scene.json")))
            .filter(|p| p.is_file())
            .collect();
        found.sort();
        found
    };
    if scenes.is_empty() {
        return Err(Error::Validation(format!("{} contains no scenes", dir.display())));
    }
    Ok(scenes)
}

fn bench_row(name: String, scene: &LoadedScene, overrides: &Overrides) -> BenchRow {
    let started = Instant::now();
    let outcome = match_loaded(scene, overrides, None, 0.0);
    let seconds = started.elapsed().as_secs_f64();
    let mut row = BenchRow {
        scene: name,
        status: String::new(),
        verified: false,
        runs: 0,
        rank: None,
        tool_x: None,
        tool_y: None,
        object_x: None,
        object_y: None,
        combined: None,
        inner_bend: None,
        seconds,
    };
    match outcome {
        Ok(report) => {
            let s = &report.selection;
            row.status = if s.verified { "verified" } else { "unverified" }.into();
            row.verified = s.verified;
            row.runs = s.reports.len();
            row.rank = Some(s.rank);
            row.tool_x = Some(s.candidate.p_t_prime.x);
            row.tool_y = Some(s.candidate.p_t_prime.y);
            row.object_x = Some(s.candidate.p_o_prime.x);
            row.object_y = Some(s.candidate.p_o_prime.y);
            row.combined = Some(s.candidate.combined);
            row.inner_bend = scene.file.generated.and_then(|p| {
                PlacedHook::new(p.hook(), p.rotation(), p.reflect).ok().map(|h| h.on_inner_bend(s.candidate.p_t_prime, 2.0))
            });
        }
        Err(e) => {
            row.status = match e {
                Error::NoCandidates(_) | Error::NoMatchingConvexity => "no_candidates",
                Error::NoVerifiedCandidate => "no_verified_candidate",
                _ => "error",
            }
            .into();
            warn!("{}: {e}", row.scene);
        }
    }
    row
}

/// Runs every scene of a suite. All scenes are loaded before any is matched,
/// so a missing file fails the whole run. Rows follow the suite order.
pub fn cmd_bench(suite_dir: impl AsRef<Path>, overrides: &Overrides) -> Result<BenchSummary> {
    let dir = suite_dir.as_ref();
    let paths = suite_scenes(dir)?;
    let scenes = paths.iter().map(|p| LoadedScene::load(p, overrides.fallback_features)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<BenchRow> = paths
        .par_iter()
        .zip(scenes.par_iter())
        .map(|(p, s)| {
            let name = p.strip_prefix(dir).unwrap_or(p).parent().unwrap_or(Path::new("")).display().to_string();
            bench_row(name, s, overrides)
        })
        .collect();

    let successes: Vec<&BenchRow> = rows.iter().filter(|r| r.verified).collect();
    let n = rows.len();
    Ok(BenchSummary {
        scenes: n,
        successes: successes.len(),
        success_rate: successes.len() as f64 / n as f64,
        mean_runs_per_success: successes.iter().map(|r| r.runs as f64).sum::<f64>() / successes.len() as f64,
        mean_seconds: rows.iter().map(|r| r.seconds).sum::<f64>() / n as f64,
        rows,
    })
}

pub fn write_bench_csv(rows: &[BenchRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |e: csv::Error| Error::Format(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
