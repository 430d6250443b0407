//! The three synthetic tabletop tasks: scene samplers, oracle keypose
//! policies and success predicates. Scenes are plain point clouds over a
//! fixed one-metre workspace; "execution" elsewhere is teleportation between
//! keyposes, so a task is fully described by its sampler and its tolerance.

use inhand_geometry::{Aabb, Pose, Quat, Vec3};
use inhand_pipeline::Action;
use inhand_render::PointCloud;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::BenchError;

/// Every word the instruction templates may emit. The set hashes into the
/// default 256-bucket vocabulary without collisions, so two instructions
/// that differ in meaning never look identical to the model.
pub const VOCABULARY: [&str; 24] = [
    "reach", "the", "red", "green", "blue", "yellow", "purple", "cyan", "sphere", "cube", "block",
    "peg", "hole", "stack", "on", "top", "of", "insert", "into", "touch", "move", "to", "place",
    "target",
];

/// Object centers may never sit closer than this, so the success tolerances
/// always discriminate between the right target and a distractor.
pub const MIN_TARGET_SEPARATION: f64 = 0.02;

const TABLE_COLOR: [f32; 3] = [0.45, 0.42, 0.40];
const PLATE_COLOR: [f32; 3] = [0.35, 0.38, 0.45];
const RIM_COLOR: [f32; 3] = [0.95, 0.55, 0.10];
const PEG_COLOR: [f32; 3] = [0.75, 0.75, 0.80];

const PALETTE: [(&str, [f32; 3]); 6] = [
    ("red", [0.85, 0.10, 0.10]),
    ("green", [0.10, 0.75, 0.15]),
    ("blue", [0.12, 0.20, 0.90]),
    ("yellow", [0.90, 0.85, 0.10]),
    ("purple", [0.55, 0.15, 0.80]),
    ("cyan", [0.10, 0.80, 0.80]),
];

/// The shared one-metre tabletop volume; the table plane sits at z = 0.
pub fn workspace() -> Aabb {
    Aabb::new(Vec3::new(-0.5, -0.5, 0.0), Vec3::new(0.5, 0.5, 1.0))
}

/// Resting pose of the end effector before and between episodes.
pub fn home_pose() -> Pose {
    Pose::new(Vec3::new(0.0, 0.0, 0.6), Quat::IDENTITY)
}

/// Success predicate parameters for one task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub translation_m: f64,
    pub rotation_deg: f64,
}

impl Tolerance {
    /// A predicted pose counts as hitting `target` when both the position
    /// and the orientation land within the task's bounds. Gripper flags are
    /// deliberately not part of the predicate.
    pub fn satisfied_by(&self, predicted: &Pose, target: &Pose) -> bool {
        (predicted.translation - target.translation).norm() <= self.translation_m
            && predicted.rotation.angle_to(&target.rotation).to_degrees() <= self.rotation_deg
    }
}

/// One sampled episode: the static scene, its instruction, and the oracle
/// keypose sequence that solves it.
#[derive(Debug, Clone)]
pub struct Scene {
    pub cloud: PointCloud,
    pub instruction: String,
    /// Gripper state at the first frame.
    pub start_open: bool,
    /// Oracle keypose actions, in execution order.
    pub actions: Vec<Action>,
    /// Centers of the objects relevant to the goal, for the separation
    /// invariant.
    pub targets: Vec<Vec3>,
}

pub trait Task: Send + Sync {
    fn id(&self) -> &'static str;
    fn tolerance(&self) -> Tolerance;
    fn sample_scene(&self, rng: &mut ChaCha8Rng) -> Result<Scene, BenchError>;
}

/// All benchmark tasks, in their canonical order.
pub fn registry() -> Vec<Box<dyn Task>> {
    vec![Box::new(ReachColor), Box::new(StackOffset), Box::new(PegInsert)]
}

pub fn find_task(id: &str) -> Result<Box<dyn Task>, BenchError> {
    registry()
        .into_iter()
        .find(|t| t.id() == id)
        .ok_or_else(|| {
            let known: Vec<&str> = registry().iter().map(|t| t.id()).collect();
            BenchError::Usage(format!("unknown task {id:?}; available: {}", known.join(", ")))
        })
}

// ---------------------------------------------------------------------------
// Scene-building helpers

/// Rejection-samples `n` xy positions in `[lo, hi]^2` with pairwise distance
/// at least `min_sep`. Returns `None` when the attempt budget runs out.
fn scatter_xy(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: f64,
    hi: f64,
    min_sep: f64,
    max_attempts: usize,
) -> Option<Vec<(f64, f64)>> {
    let mut accepted: Vec<(f64, f64)> = Vec::with_capacity(n);
    for _ in 0..max_attempts {
        if accepted.len() == n {
            break;
        }
        let candidate = (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
        let clear = accepted
            .iter()
            .all(|p| (p.0 - candidate.0).hypot(p.1 - candidate.1) >= min_sep);
        if clear {
            accepted.push(candidate);
        }
    }
    (accepted.len() == n).then_some(accepted)
}

fn constraint_failure(task: &str, attempts: usize) -> BenchError {
    BenchError::SceneConstraints {
        task: task.to_string(),
        attempts,
    }
}

struct CloudBuilder {
    positions: Vec<Vec3>,
    colors: Vec<[f32; 3]>,
}

impl CloudBuilder {
    fn with_table() -> Self {
        let mut b = CloudBuilder {
            positions: Vec::new(),
            colors: Vec::new(),
        };
        let n = 28;
        for iy in 0..n {
            for ix in 0..n {
                let grid = |i: usize| -0.48 + 0.96 * i as f64 / (n - 1) as f64;
                b.push(Vec3::new(grid(ix), grid(iy), 0.0), TABLE_COLOR);
            }
        }
        b
    }

    fn push(&mut self, p: Vec3, color: [f32; 3]) {
        self.positions.push(p);
        self.colors.push(color);
    }

    /// Fibonacci-spiral sampling of a sphere surface.
    fn sphere(&mut self, center: Vec3, radius: f64, color: [f32; 3]) {
        let n = 160;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        for i in 0..n {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let ring = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            let dir = Vec3::new(ring * phi.cos(), ring * phi.sin(), z);
            self.push(center + dir * radius, color);
        }
    }

    /// All six faces of an axis-aligned cube, then yawed about its center.
    fn cube(&mut self, center: Vec3, half: f64, yaw: f64, color: [f32; 3]) {
        let rot = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), yaw);
        let steps = 6;
        let line = |i: usize| -half + 2.0 * half * i as f64 / (steps - 1) as f64;
        for a in 0..steps {
            for b in 0..steps {
                let (u, v) = (line(a), line(b));
                for local in [
                    Vec3::new(half, u, v),
                    Vec3::new(-half, u, v),
                    Vec3::new(u, half, v),
                    Vec3::new(u, -half, v),
                    Vec3::new(u, v, half),
                    Vec3::new(u, v, -half),
                ] {
                    self.push(center + rot.rotate(local), color);
                }
            }
        }
    }

    /// Square plate at height `z` with a circular hole cut around
    /// `(cx, cy)`, plus a bright rim ring marking the hole's edge.
    fn plate_with_hole(&mut self, cx: f64, cy: f64, z: f64, half: f64, hole_r: f64) {
        let n = 26;
        for iy in 0..n {
            for ix in 0..n {
                let grid = |i: usize| -half + 2.0 * half * i as f64 / (n - 1) as f64;
                let (dx, dy) = (grid(ix), grid(iy));
                if dx.hypot(dy) >= hole_r {
                    self.push(Vec3::new(cx + dx, cy + dy, z), PLATE_COLOR);
                }
            }
        }
        let rim = 32;
        for i in 0..rim {
            let t = std::f64::consts::TAU * i as f64 / rim as f64;
            self.push(
                Vec3::new(cx + hole_r * t.cos(), cy + hole_r * t.sin(), z),
                RIM_COLOR,
            );
        }
    }

    /// Vertical peg hanging below `top` (where the gripper holds it).
    fn peg(&mut self, top: Vec3, radius: f64, length: f64) {
        let rings = 6;
        let around = 10;
        for ri in 0..rings {
            let z = top.z - length * ri as f64 / (rings - 1) as f64;
            for i in 0..around {
                let t = std::f64::consts::TAU * i as f64 / around as f64;
                self.push(
                    Vec3::new(top.x + radius * t.cos(), top.y + radius * t.sin(), z),
                    PEG_COLOR,
                );
            }
        }
        self.push(Vec3::new(top.x, top.y, top.z - length), PEG_COLOR);
    }

    fn build(self) -> PointCloud {
        PointCloud::new(self.positions, self.colors).expect("builder keeps lengths in sync")
    }
}

fn action(translation: Vec3, rotation: Quat, gripper_open: bool, collide: bool) -> Action {
    Action {
        pose: Pose::new(translation, rotation),
        gripper_open,
        collide,
    }
}

/// Shuffled palette indices; the first entries name the scene's objects.
fn color_order(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..PALETTE.len()).collect();
    order.shuffle(rng);
    order
}

// ---------------------------------------------------------------------------
// reach-color: language grounding over three colored spheres.

struct ReachColor;

const SPHERE_R: f64 = 0.035;

impl Task for ReachColor {
    fn id(&self) -> &'static str {
        "reach-color"
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            translation_m: 0.01,
            rotation_deg: 15.0,
        }
    }

    fn sample_scene(&self, rng: &mut ChaCha8Rng) -> Result<Scene, BenchError> {
        let order = color_order(rng);
        let spots = scatter_xy(rng, 3, -0.35, 0.35, 0.12, 100)
            .ok_or_else(|| constraint_failure(self.id(), 100))?;

        let mut cloud = CloudBuilder::with_table();
        let mut centers = Vec::new();
        for (spot, &color) in spots.iter().zip(&order) {
            let center = Vec3::new(spot.0, spot.1, SPHERE_R);
            cloud.sphere(center, SPHERE_R, PALETTE[color].1);
            centers.push(center);
        }

        let target = centers[0];
        Ok(Scene {
            cloud: cloud.build(),
            instruction: format!("reach the {} sphere", PALETTE[order[0]].0),
            start_open: true,
            actions: vec![
                action(target + Vec3::new(0.0, 0.0, 0.12), Quat::IDENTITY, true, true),
                action(target, Quat::IDENTITY, false, false),
            ],
            targets: centers,
        })
    }
}

// ---------------------------------------------------------------------------
// stack-offset: relative placement of one yawed cube onto another.

struct StackOffset;

const CUBE_HALF: f64 = 0.025;

impl Task for StackOffset {
    fn id(&self) -> &'static str {
        "stack-offset"
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            translation_m: 0.01,
            rotation_deg: 15.0,
        }
    }

    fn sample_scene(&self, rng: &mut ChaCha8Rng) -> Result<Scene, BenchError> {
        let order = color_order(rng);
        let spots = scatter_xy(rng, 2, -0.30, 0.30, 0.15, 100)
            .ok_or_else(|| constraint_failure(self.id(), 100))?;
        let quarter = std::f64::consts::FRAC_PI_4;
        let yaw1 = rng.gen_range(-quarter..=quarter);
        let yaw2 = rng.gen_range(-quarter..=quarter);

        let c1 = Vec3::new(spots[0].0, spots[0].1, CUBE_HALF);
        let c2 = Vec3::new(spots[1].0, spots[1].1, CUBE_HALF);
        let mut cloud = CloudBuilder::with_table();
        cloud.cube(c1, CUBE_HALF, yaw1, PALETTE[order[0]].1);
        cloud.cube(c2, CUBE_HALF, yaw2, PALETTE[order[1]].1);

        let up = Vec3::new(0.0, 0.0, 1.0);
        let rot1 = Quat::from_axis_angle(up, yaw1);
        let rot2 = Quat::from_axis_angle(up, yaw2);
        // The moved cube ends up resting on the stationary one.
        let goal = Vec3::new(c2.x, c2.y, 3.0 * CUBE_HALF);

        Ok(Scene {
            cloud: cloud.build(),
            instruction: format!(
                "stack the {} cube on the {} cube",
                PALETTE[order[0]].0,
                PALETTE[order[1]].0
            ),
            start_open: true,
            actions: vec![
                action(c1 + Vec3::new(0.0, 0.0, 0.12), rot1, true, true),
                action(c1, rot1, false, true),
                action(goal + Vec3::new(0.0, 0.0, 0.10), rot2, false, true),
                action(goal, rot2, true, false),
            ],
            targets: vec![c1, c2],
        })
    }
}

// ---------------------------------------------------------------------------
// peg-insert-2cm: precision insertion into a 2 cm hole.

struct PegInsert;

const PLATE_Z: f64 = 0.10;
const HOLE_R: f64 = 0.01;
const PEG_LEN: f64 = 0.05;

impl Task for PegInsert {
    fn id(&self) -> &'static str {
        "peg-insert-2cm"
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            translation_m: 0.003,
            rotation_deg: 10.0,
        }
    }

    fn sample_scene(&self, rng: &mut ChaCha8Rng) -> Result<Scene, BenchError> {
        let spot = scatter_xy(rng, 1, -0.25, 0.25, 0.0, 100)
            .ok_or_else(|| constraint_failure(self.id(), 100))?[0];
        let (hx, hy) = spot;

        let mut cloud = CloudBuilder::with_table();
        cloud.plate_with_hole(hx, hy, PLATE_Z, 0.10, HOLE_R);
        // The peg starts already grasped, hanging below the home pose.
        cloud.peg(home_pose().translation, 0.008, PEG_LEN);

        // Gripper heights that leave the peg tip 2 cm above, then 2 cm
        // through, the plate plane.
        let hover = Vec3::new(hx, hy, PLATE_Z + PEG_LEN + 0.08);
        let insert = Vec3::new(hx, hy, PLATE_Z + PEG_LEN - 0.02);
        Ok(Scene {
            cloud: cloud.build(),
            instruction: "insert the peg into the hole".to_string(),
            start_open: false,
            actions: vec![
                action(hover, Quat::IDENTITY, false, true),
                action(insert, Quat::IDENTITY, true, false),
            ],
            targets: vec![Vec3::new(hx, hy, PLATE_Z)],
        })
    }
}
