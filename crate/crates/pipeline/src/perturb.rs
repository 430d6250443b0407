use inhand_geometry::{camera_rig_from_action, Aabb, CameraRig, Pose, Quat, RigConfig, Vec3};
use rand::Rng;

use crate::{Action, PipelineError};

/// Where a stage's camera rig came from. Training rigs for later stages sit
/// at jittered ground truth; inference rigs sit at the previous prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RigSource {
    FixedWorkspace,
    PerturbedGroundTruth,
    Predicted,
}

/// One stage's rendering and decoding frame: the rig to render through and
/// the pose that this stage's refinement composes onto.
#[derive(Debug, Clone)]
pub struct StageContext {
    pub rig: CameraRig,
    pub base_pose: Pose,
    pub source: RigSource,
}

/// Jitter bounds for in-hand rig anchors during training. Translation is
/// uniform in a ball whose radius is a fraction of the stage's viewing
/// half-extent; rotation is a uniform axis with a uniform angle.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationSpec {
    /// Ball radius as a fraction of the stage half-extent; must be below 1 so
    /// the ground truth always stays inside the perturbed view.
    pub translation_frac: f64,
    pub max_rotation_deg: f64,
}

fn unit_direction(rng: &mut impl Rng) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

impl PerturbationSpec {
    pub fn standard() -> Self {
        PerturbationSpec {
            translation_frac: 0.15,
            max_rotation_deg: 10.0,
        }
    }

    /// No jitter: rigs anchor exactly at the ground-truth action.
    pub fn zero() -> Self {
        PerturbationSpec {
            translation_frac: 0.0,
            max_rotation_deg: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.translation_frac.is_finite() && (0.0..1.0).contains(&self.translation_frac)) {
            return Err(PipelineError::Validation(format!(
                "translation_frac {} outside [0, 1)",
                self.translation_frac
            )));
        }
        if !(self.max_rotation_deg.is_finite() && (0.0..=180.0).contains(&self.max_rotation_deg)) {
            return Err(PipelineError::Validation(format!(
                "max_rotation_deg {} outside [0, 180]",
                self.max_rotation_deg
            )));
        }
        Ok(())
    }

    fn sample(&self, radius: f64, rng: &mut impl Rng) -> Pose {
        let offset =
            unit_direction(rng) * (radius * self.translation_frac * rng.gen_range(0f64..=1.0).cbrt());
        let angle = self.max_rotation_deg.to_radians() * rng.gen_range(0f64..=1.0);
        Pose::new(offset, Quat::from_axis_angle(unit_direction(rng), angle))
    }
}

/// Builds the per-stage contexts for one training sample: the fixed
/// workspace rig for stage 0, then ground truth jittered by `spec` for every
/// later stage. The jitter ball is strictly smaller than the stage view, so
/// the labeled action always stays inside every rendered frustum.
pub fn training_contexts(
    gt: &Action,
    workspace: &Aabb,
    cfg: &RigConfig,
    stages: usize,
    spec: &PerturbationSpec,
    rng: &mut impl Rng,
) -> Result<Vec<StageContext>, PipelineError> {
    spec.validate()?;
    let mut out = Vec::with_capacity(stages);
    for stage in 0..stages {
        if stage == 0 {
            out.push(StageContext {
                rig: camera_rig_from_action(&gt.pose, 0, workspace, cfg)?,
                base_pose: Pose::IDENTITY,
                source: RigSource::FixedWorkspace,
            });
            continue;
        }
        let half_extent = if cfg.zoom_enabled {
            workspace.half_extent() * 0.5f64.powi(stage as i32)
        } else {
            workspace.half_extent()
        };
        let jitter = spec.sample(half_extent, rng);
        let base = Pose::new(
            gt.pose.translation + jitter.translation,
            jitter.rotation.mul(&gt.pose.rotation),
        );
        out.push(StageContext {
            rig: camera_rig_from_action(&base, stage, workspace, cfg)?,
            base_pose: base,
            source: RigSource::PerturbedGroundTruth,
        });
    }
    Ok(out)
}

/// Builds the context for one stage at inference time. Stage 0 ignores the
/// pose (the rig is the fixed workspace view); later stages anchor at the
/// previous prediction and fail if it has left the tolerated margin around
/// the workspace.
pub fn prediction_context(
    pose: &Pose,
    stage: usize,
    workspace: &Aabb,
    cfg: &RigConfig,
) -> Result<StageContext, PipelineError> {
    let rig = camera_rig_from_action(pose, stage, workspace, cfg)?;
    Ok(if stage == 0 {
        StageContext {
            rig,
            base_pose: Pose::IDENTITY,
            source: RigSource::FixedWorkspace,
        }
    } else {
        StageContext {
            rig,
            base_pose: *pose,
            source: RigSource::Predicted,
        }
    })
}
