//! Demonstration synthesis, dataset storage, supervision targets, and the
//! training/inference loops that connect the renderer to the model.
//!
//! The flow mirrors deployment: demonstrations are dense trajectories whose
//! keyposes become (observation, next-action) pairs; training renders each
//! sample through a workspace rig plus jittered in-hand rigs and supervises
//! heatmaps, rotation bins, and gripper flags; inference re-anchors each
//! stage's rig at the previous stage's prediction.

mod dataset;
mod error;
mod infer;
mod keypose;
mod perturb;
mod ply;
mod targets;
mod trajectory;
mod train;
mod types;

pub use dataset::{load_dataset, load_demonstration, save_demonstration};
pub use error::PipelineError;
pub use infer::{infer, InferenceResult, InferenceSettings, StagePrediction};
pub use keypose::extract_keyposes;
pub use perturb::{
    prediction_context, training_contexts, PerturbationSpec, RigSource, StageContext,
};
pub use targets::{make_targets, StageTargets, TargetSet};
pub use train::{keypose_samples, StepReport, TrainSample, Trainer, TrainerConfig};
pub use trajectory::synthesize_trajectory;
pub use types::{Action, Demonstration, Frame};
