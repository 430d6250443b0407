//! Wall-clock budget for the default configuration: one forward plus one
//! backward pass must stay under two seconds.

mod common;

use common::{random_cloud, rendered_stages, sample_anchor};
use inhand_geometry::Pose;
use inhand_model::{Model, ModelConfig, Proprio};
use std::time::Instant;

#[test]
fn toy_forward_backward_under_two_seconds() {
    let cfg = ModelConfig::toy();
    let model = Model::new(cfg.clone(), 1).unwrap();
    let cloud = random_cloud(2, 2000);
    let stages = rendered_stages(&cloud, &sample_anchor(), cfg.image_resolution);
    let prop = Proprio {
        gripper_open: false,
        timestep: 0.0,
        pose: Pose::IDENTITY,
    };

    // Warm-up pass so allocator effects don't dominate the measurement.
    let out = model.forward(&stages, "reach the target", &prop).unwrap();
    drop(out);

    let start = Instant::now();
    let out = model.forward(&stages, "reach the target", &prop).unwrap();
    let mut loss = out.stages[0].heatmap_logits.sum();
    for sp in &out.stages {
        loss = loss
            .add(&sp.rotation_logits.sum())
            .add(&sp.open_logit.sum())
            .add(&sp.collide_logit.sum());
    }
    loss.backward();
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 2.0,
        "forward+backward took {:.3}s",
        elapsed.as_secs_f64()
    );
}
