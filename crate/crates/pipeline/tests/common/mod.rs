#![allow(dead_code)]

use inhand_geometry::{Aabb, Pose, Quat, Vec3};
use inhand_model::ModelConfig;
use inhand_render::PointCloud;

pub fn tiny_config() -> ModelConfig {
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

pub fn home_pose() -> Pose {
    Pose::new(Vec3::new(0.0, 0.0, 0.6), Quat::IDENTITY)
}

/// Deterministic unit directions via the Fibonacci sphere.
fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).sqrt();
            let t = golden * i as f64;
            Vec3::new(r * t.cos(), y, r * t.sin())
        })
        .collect()
}

/// A gray tabletop grid plus one colored sphere: the smallest scene that
/// still gives every virtual view something to lock onto.
pub fn table_scene(target: Vec3, radius: f64, color: [f32; 3]) -> PointCloud {
    let mut positions = Vec::new();
    let mut colors = Vec::new();
    let n = 24;
    for i in 0..n {
        for j in 0..n {
            let x = -0.45 + 0.9 * (i as f64 + 0.5) / n as f64;
            let y = -0.45 + 0.9 * (j as f64 + 0.5) / n as f64;
            positions.push(Vec3::new(x, y, 0.0));
            colors.push([0.45, 0.42, 0.40]);
        }
    }
    for d in fibonacci_sphere(96) {
        positions.push(target + d * radius);
        colors.push(color);
    }
    PointCloud::new(positions, colors).expect("scene cloud")
}
