use inhand_geometry::{Aabb, Pose, RigConfig};
use inhand_model::{decode_action, DecodedAction, Model, Proprio};
use inhand_render::{render_stage, PointCloud, RenderedStage};

use crate::{prediction_context, Action, PipelineError, RigSource};

#[derive(Debug, Clone)]
pub struct InferenceSettings {
    pub workspace: Aabb,
    pub zoom_enabled: bool,
    pub splat_radius: usize,
}

/// One stage's decoded action plus where its rig came from.
#[derive(Debug, Clone)]
pub struct StagePrediction {
    pub action: DecodedAction,
    pub source: RigSource,
    /// The anchoring pose had to be pulled back inside the workspace.
    pub clamped: bool,
}

#[derive(Debug, Clone)]
pub struct InferenceResult {
    pub stages: Vec<StagePrediction>,
    pub final_action: Action,
}

/// Runs the full autoregressive loop: render the workspace rig, predict,
/// re-anchor an in-hand rig at the prediction, and repeat for every stage.
/// Each forward pass sees all views rendered so far, exactly like training.
///
/// Fails with a geometry error if a predicted pose leaves the tolerated
/// margin around the workspace — the caller decides whether that counts as a
/// diverged episode.
pub fn infer(
    model: &Model,
    cloud: &PointCloud,
    instruction: &str,
    proprio: &Proprio,
    settings: &InferenceSettings,
) -> Result<InferenceResult, PipelineError> {
    let config = model.config();
    let mut rig_config =
        RigConfig::for_workspace(&settings.workspace, config.image_resolution);
    rig_config.zoom_enabled = settings.zoom_enabled;

    let mut rendered: Vec<RenderedStage> = Vec::with_capacity(config.stages);
    let mut stages: Vec<StagePrediction> = Vec::with_capacity(config.stages);
    let mut previous = Pose::IDENTITY;

    for stage in 0..config.stages {
        let ctx = prediction_context(&previous, stage, &settings.workspace, &rig_config)?;
        rendered.push(render_stage(cloud, &ctx.rig, settings.splat_radius));

        let output = model.forward(&rendered, instruction, proprio)?;
        let head = output.stages.last().expect("one output per rendered stage");
        let action = decode_action(head, &ctx.rig, &ctx.base_pose, config.direct_pose)?;
        previous = action.pose;
        stages.push(StagePrediction {
            action,
            source: ctx.source,
            clamped: ctx.rig.clamped,
        });
    }

    let last = &stages.last().expect("at least one stage").action;
    let final_action = Action {
        pose: last.pose,
        gripper_open: last.gripper_open,
        collide: last.collide,
    };
    Ok(InferenceResult {
        stages,
        final_action,
    })
}
