//! Procedural hook-and-disk scenes and the reference hook demonstration.
//!
//! The reference tool is a hook with a 12 px inner bend pulling a 10 px ball
//! that sits inside the bend. Scenes pair a random hook
//! (inner radius 8–30 px, one of twelve 30° orientations, optionally
//! mirrored) with a random disk no larger than three quarters of the bend.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{extract_edges, BinaryMask, Point2, Similarity2};
use crate::matching::ReferenceDemo;
use crate::motion::{TimedPose, Trajectory2D};
use crate::shapes::{Hook, Shape};

pub const REFERENCE_BALL_RADIUS: f64 = 10.0;
/// Gap between the contact points while in contact, in pixels.
pub const CONTACT_STANDOFF: f64 = 1.5;
pub const APPROACH_DISTANCE: f64 = 4.0;
pub const PULL_DISTANCE: f64 = 40.0;
pub const INNER_RADIUS_RANGE: (f64, f64) = (8.0, 30.0);
pub const DISK_RADIUS_RANGE: (f64, f64) = (6.0, 35.0);
/// Largest disk radius as a fraction of the hook's inner radius.
pub const DISK_FILL: f64 = 0.75;

pub fn reference_hook() -> Hook {
    Hook { inner_radius: 12.0, thickness: 7.0, shaft_length: 122.0, tip_length: 10.0 }
}

/// Hook rasterized on a square canvas centred on its bend.
#[derive(Debug, Clone)]
pub struct PlacedHook {
    pub hook: Hook,
    pub mask: BinaryMask,
    /// Canonical hook coordinates to mask coordinates.
    pub pose: Similarity2,
}

impl PlacedHook {
    pub fn new(hook: Hook, rotation: f64, reflect: bool) -> Result<Self> {
        let (lo, hi) = hook.extent();
        let reach = [lo, hi, Point2::new(lo.x, hi.y), Point2::new(hi.x, lo.y)].iter().map(|p| p.norm()).fold(0.0, f64::max);
        let side = (2.0 * reach).ceil() as usize + 8;
        let half = side as f64 / 2.0;
        let pose = Similarity2 { rotation, reflect, scale: 1.0, translation: Point2::new(half, half) };
        let mask = hook.shape().rasterize(side, side, &pose)?;
        Ok(Self { hook, mask, pose })
    }

    pub fn bend_center(&self) -> Point2 {
        self.pose.apply(Point2::default())
    }

    /// Contour pixel nearest the deepest point of the inner bend.
    pub fn inner_contact(&self) -> Result<Point2> {
        snap(&self.mask, self.pose.apply(self.hook.inner_contact()))
    }

    pub fn outer_contact(&self) -> Result<Point2> {
        snap(&self.mask, self.pose.apply(self.hook.outer_contact()))
    }

    /// Whether `p` lies on the inner bend: on the bend half of the hook and
    /// no farther from the bend centre than the inner radius plus `slack`.
    pub fn on_inner_bend(&self, p: Point2, slack: f64) -> bool {
        let local = self.pose.inverse().apply(p);
        local.y >= -slack && local.norm() <= self.hook.inner_radius + slack
    }
}

/// Disk centred on a square canvas with `margin` pixels around it.
pub fn disk_mask(radius: f64, margin: usize) -> Result<(BinaryMask, Point2)> {
    let side = (2.0 * radius).ceil() as usize + 2 * margin;
    let center = Point2::new(side as f64 / 2.0, side as f64 / 2.0);
    Ok((Shape::Disk { center, radius }.rasterize(side, side, &Similarity2::identity())?, center))
}

fn snap(mask: &BinaryMask, p: Point2) -> Result<Point2> {
    extract_edges(mask)?.nearest(p).ok_or(Error::EmptyMask)
}

/// Approach, touch, then pull along `pull` with the contact points held
/// `CONTACT_STANDOFF` apart along `normal`. Poses map tool coordinates to
/// object coordinates.
pub fn pull_trajectory(p_t: Point2, p_o: Point2, normal: Point2, pull: Point2) -> Result<Trajectory2D> {
    let at = |gap: f64, travel: f64| p_o + normal * (CONTACT_STANDOFF + gap) + pull * travel - p_t;
    let keys = [
        (0.0, at(APPROACH_DISTANCE, 0.0)),
        (1.0, at(0.0, 0.0)),
        (2.0, at(0.0, PULL_DISTANCE / 2.0)),
        (3.0, at(0.0, PULL_DISTANCE)),
    ];
    let poses = keys.iter().map(|&(t, d)| TimedPose { t, pose: Similarity2::rigid(0.0, d) }).collect();
    Trajectory2D::new(poses, Some((1, 3)))
}

/// The reference demonstration: a hook hanging with its cavity facing down,
/// caught under the top of a ball and pulling it downward.
pub fn reference_demo() -> Result<(ReferenceDemo, PlacedHook)> {
    let placed = PlacedHook::new(reference_hook(), std::f64::consts::PI, false)?;
    let p_t = placed.inner_contact()?;
    let (ball, center) = disk_mask(REFERENCE_BALL_RADIUS, 86)?;
    let p_o = snap(&ball, center - Point2::new(0.0, REFERENCE_BALL_RADIUS))?;
    let normal = (p_o - center).normalized();
    let trajectory = pull_trajectory(p_t, p_o, normal, -normal)?;
    let demo = ReferenceDemo::new(placed.mask.clone(), ball, p_t, p_o, trajectory)?;
    Ok((demo, placed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneParams {
    pub inner_radius: f64,
    pub thickness: f64,
    pub shaft_length: f64,
    pub tip_length: f64,
    /// Orientation bin, multiples of 30°.
    pub rotation_bin: usize,
    pub reflect: bool,
    pub disk_radius: f64,
}

impl SceneParams {
    pub fn sample(rng: &mut impl Rng) -> Self {
        let inner_radius = rng.random_range(INNER_RADIUS_RANGE.0..=INNER_RADIUS_RANGE.1);
        let thickness = rng.random_range(6.0..=8.0);
        let tip_length = rng.random_range(10.0..=14.0);
        let rotation_bin = rng.random_range(0..12);
        let reflect = rng.random_bool(0.5);
        let disk_max = DISK_RADIUS_RANGE.1.min(DISK_FILL * inner_radius).max(DISK_RADIUS_RANGE.0);
        let disk_radius = rng.random_range(DISK_RADIUS_RANGE.0..=disk_max);
        Self { inner_radius, thickness, shaft_length: 110.0 + inner_radius, tip_length, rotation_bin, reflect, disk_radius }
    }

    pub fn hook(&self) -> Hook {
        Hook {
            inner_radius: self.inner_radius,
            thickness: self.thickness,
            shaft_length: self.shaft_length,
            tip_length: self.tip_length,
        }
    }

    pub fn rotation(&self) -> f64 {
        (self.rotation_bin as f64).to_radians() * 30.0
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedScene {
    pub params: SceneParams,
    pub tool: PlacedHook,
    pub object_mask: BinaryMask,
}

impl GeneratedScene {
    pub fn from_params(params: SceneParams) -> Result<Self> {
        let tool = PlacedHook::new(params.hook(), params.rotation(), params.reflect)?;
        let (object_mask, _) = disk_mask(params.disk_radius, 40)?;
        Ok(Self { params, tool, object_mask })
    }
}

/// `count` scenes drawn from a generator seeded with `seed`.
pub fn generate_scenes(seed: u64, count: usize) -> Result<Vec<GeneratedScene>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| GeneratedScene::from_params(SceneParams::sample(&mut rng))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_demo_is_consistent() {
        let (demo, placed) = reference_demo().unwrap();
        assert!(placed.on_inner_bend(demo.p_t, 1.0));
        let contact = demo.trajectory.poses()[1].pose.apply(demo.p_t);
        assert!((contact.distance(demo.p_o) - CONTACT_STANDOFF).abs() < 1e-9);
        assert_eq!(demo.trajectory.contact_phase(), Some((1, 3)));
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = generate_scenes(7, 4).unwrap();
        let b = generate_scenes(7, 4).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.params, y.params);
            assert_eq!(x.tool.mask, y.tool.mask);
        }
    }

    #[test]
    fn parameters_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = SceneParams::sample(&mut rng);
            assert!((8.0..=30.0).contains(&p.inner_radius));
            assert!((6.0..=35.0).contains(&p.disk_radius));
            assert!(p.disk_radius <= DISK_FILL * p.inner_radius + 1e-12);
            assert!(p.rotation_bin < 12);
        }
    }
}
