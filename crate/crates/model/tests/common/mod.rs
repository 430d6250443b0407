//! Shared fixtures: a small config and rendered stages over a random cloud.

use inhand_geometry::{camera_rig_from_action, Aabb, Pose, Quat, RigConfig, Vec3};
use inhand_model::ModelConfig;
use inhand_render::{render_stage, PointCloud, RenderedStage};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deliberately tiny config so forward passes run in milliseconds.
pub fn small_config() -> ModelConfig {
    let mut cfg = ModelConfig::toy();
    cfg.image_resolution = 16;
    cfg.patch = 8;
    cfg.language_tokens = 4;
    cfg.layers = 2;
    cfg.model_dim = 24;
    cfg.heads = 2;
    cfg.vocab_size = 64;
    cfg
}

pub fn workspace() -> Aabb {
    Aabb::new(Vec3::new(-0.5, -0.5, 0.0), Vec3::new(0.5, 0.5, 1.0))
}

pub fn random_cloud(seed: u64, n: usize) -> PointCloud {
    let ws = workspace();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = Vec::with_capacity(n);
    let mut col = Vec::with_capacity(n);
    for _ in 0..n {
        pos.push(Vec3::new(
            rng.gen_range(ws.min.x..ws.max.x),
            rng.gen_range(ws.min.y..ws.max.y),
            rng.gen_range(ws.min.z..ws.max.z),
        ));
        col.push([rng.gen::<f32>(), rng.gen::<f32>(), rng.gen::<f32>()]);
    }
    PointCloud::new(pos, col).unwrap()
}

/// Renders all three stages: the fixed stage-0 rig plus zoomed rigs anchored
/// at `anchor`.
pub fn rendered_stages(cloud: &PointCloud, anchor: &Pose, resolution: usize) -> Vec<RenderedStage> {
    let ws = workspace();
    let rig_cfg = RigConfig::for_workspace(&ws, resolution);
    (0..3)
        .map(|stage| {
            let rig = camera_rig_from_action(anchor, stage, &ws, &rig_cfg).unwrap();
            render_stage(cloud, &rig, 1)
        })
        .collect()
}

pub fn sample_anchor() -> Pose {
    Pose::new(
        Vec3::new(0.1, -0.15, 0.4),
        Quat::from_axis_angle(Vec3::new(0.2, 1.0, 0.1), 0.6),
    )
}
