use inhand_autodiff::{Adam, AdamConfig, Tensor};
use inhand_geometry::{Aabb, Pose, Quat, RigConfig};
use inhand_model::{Model, Proprio, StageOutput};
use inhand_render::{render_stage, PointCloud, RenderedStage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{
    make_targets, training_contexts, Action, Demonstration, PerturbationSpec, PipelineError,
    RigSource, StageContext, StageTargets,
};

/// One supervised pair: the observation at a keypose (or the start) and the
/// next keypose action to predict from it.
#[derive(Debug, Clone)]
pub struct TrainSample {
    pub instruction: String,
    pub cloud: PointCloud,
    pub proprio: Proprio,
    pub target: Action,
}

/// Slices a demonstration into training samples: the j-th sample observes
/// the previous keypose frame (the start frame for j = 0) and is labeled
/// with action j. The proprioceptive timestep is j / K, the same clock the
/// evaluation loop feeds back at step j.
pub fn keypose_samples(demo: &Demonstration) -> Vec<TrainSample> {
    let k = demo.actions.len();
    (0..k)
        .map(|j| {
            let frame = &demo.frames[if j == 0 { 0 } else { demo.keyposes[j - 1] }];
            TrainSample {
                instruction: demo.instruction.clone(),
                cloud: frame.cloud.clone(),
                proprio: Proprio {
                    gripper_open: frame.gripper_open,
                    timestep: j as f64 / k as f64,
                    pose: frame.pose,
                },
                target: demo.actions[j].clone(),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct TrainerConfig {
    pub workspace: Aabb,
    pub perturbation: PerturbationSpec,
    /// Heatmap target spread in pixels; `<= 0` trains against one-hots.
    pub sigma_px: f64,
    pub splat_radius: usize,
    pub zoom_enabled: bool,
    pub adam: AdamConfig,
    /// Root seed for the per-sample perturbation draws.
    pub seed: u64,
}

impl TrainerConfig {
    pub fn new(workspace: Aabb) -> Self {
        TrainerConfig {
            workspace,
            perturbation: PerturbationSpec::standard(),
            sigma_px: 1.5,
            splat_radius: 1,
            zoom_enabled: true,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

/// One optimizer step's bookkeeping. `components` holds, per stage, the
/// summed-over-batch `[pose, open, collide]` loss terms; their total equals
/// `loss` up to f32 accumulation error.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub loss: f64,
    pub components: Vec<[f64; 3]>,
    pub sources: Vec<RigSource>,
    pub samples: usize,
}

/// Owns the model, the optimizer, and the rig/perturbation policy; turns
/// batches of [`TrainSample`]s into gradient steps.
pub struct Trainer {
    model: Model,
    config: TrainerConfig,
    rig_config: RigConfig,
    optimizer: Adam<f32>,
    step_index: u64,
}

impl Trainer {
    pub fn new(model: Model, config: TrainerConfig) -> Result<Self, PipelineError> {
        config.perturbation.validate()?;
        if !(config.sigma_px.is_finite()) {
            return Err(PipelineError::Validation(format!(
                "sigma_px {} is not finite",
                config.sigma_px
            )));
        }
        let mut rig_config =
            RigConfig::for_workspace(&config.workspace, model.config().image_resolution);
        rig_config.zoom_enabled = config.zoom_enabled;
        let optimizer = Adam::new(config.adam);
        Ok(Trainer {
            model,
            config,
            rig_config,
            optimizer,
            step_index: 0,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn config(&self) -> &TrainerConfig {
        &self.config
    }

    pub fn steps_taken(&self) -> u64 {
        self.step_index
    }

    pub fn into_model(self) -> Model {
        self.model
    }

    /// Computes the batch loss and leaves its gradients accumulated on the
    /// parameters without stepping the optimizer.
    pub fn accumulate(&mut self, batch: &[TrainSample]) -> Result<StepReport, PipelineError> {
        if batch.is_empty() {
            return Err(PipelineError::Validation("empty batch".into()));
        }
        self.model.params().zero_grads();

        let stages = self.model.config().stages;
        let mut report = StepReport {
            loss: 0.0,
            components: vec![[0.0; 3]; stages],
            sources: Vec::new(),
            samples: batch.len(),
        };
        for sample in batch {
            let contexts = self.sample_contexts(sample)?;
            if report.sources.is_empty() {
                report.sources = contexts.iter().map(|c| c.source).collect();
            }
            let rendered: Vec<RenderedStage> = contexts
                .iter()
                .map(|c| render_stage(&sample.cloud, &c.rig, self.config.splat_radius))
                .collect();
            let targets = make_targets(&sample.target, &contexts, self.config.sigma_px)?;

            let output = self
                .model
                .forward(&rendered, &sample.instruction, &sample.proprio)?;
            let mut total: Option<Tensor<f32>> = None;
            for (s, (out, tgt)) in output.stages.iter().zip(&targets.stages).enumerate() {
                let terms = stage_losses(out, tgt, self.model.config().rotation_bins);
                for (i, term) in terms.iter().enumerate() {
                    report.components[s][i] += f64::from(term.value());
                }
                for term in terms {
                    total = Some(match total {
                        Some(t) => t.add(&term),
                        None => term,
                    });
                }
            }
            let total = total.expect("at least one stage");
            let value = f64::from(total.value());
            if !value.is_finite() {
                return Err(PipelineError::NonFiniteLoss(format!(
                    "loss {value} at step {} for sample \"{}\" (timestep {})",
                    self.step_index, sample.instruction, sample.proprio.timestep
                )));
            }
            report.loss += value;
            total.backward();
        }
        Ok(report)
    }

    /// One optimizer step over `batch`: fresh gradients, one Adam update.
    pub fn step(&mut self, batch: &[TrainSample]) -> Result<StepReport, PipelineError> {
        let report = self.accumulate(batch)?;
        self.optimizer.step(self.model.params_mut())?;
        self.step_index += 1;
        Ok(report)
    }

    /// Stage contexts for one sample, seeded from the sample content, the
    /// root seed, and the step index. Identical samples in a batch draw
    /// identical jitter, so a duplicated sample contributes exactly twice
    /// the gradient.
    fn sample_contexts(&self, sample: &TrainSample) -> Result<Vec<StageContext>, PipelineError> {
        let seed = content_hash(sample) ^ self.config.seed ^ self.step_index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut contexts = training_contexts(
            &sample.target,
            &self.config.workspace,
            &self.rig_config,
            self.model.config().stages,
            &self.config.perturbation,
            &mut rng,
        )?;
        if self.model.config().direct_pose {
            // Direct-pose decoding reads every stage's rotation bins as
            // absolute, so supervise them that way; rig placement is
            // unchanged.
            for ctx in &mut contexts {
                ctx.base_pose = Pose::new(ctx.base_pose.translation, Quat::IDENTITY);
            }
        }
        Ok(contexts)
    }
}

/// The three loss terms of one stage: summed per-view heatmap cross-entropy,
/// summed per-axis rotation cross-entropy (together the pose term), then the
/// open and collision BCEs.
fn stage_losses(out: &StageOutput, tgt: &StageTargets, bins: usize) -> [Tensor<f32>; 3] {
    let views = out.heatmap_logits.rows();
    let heat_t = Tensor::from_vec(views, out.heatmap_logits.cols(), tgt.heatmaps.clone());
    let mut rot = vec![0.0f32; 3 * bins];
    for (axis, &bin) in tgt.rotation_bins.iter().enumerate() {
        rot[axis * bins + bin] = 1.0;
    }
    let rot_t = Tensor::from_vec(3, bins, rot);
    let flag = |b: bool| Tensor::from_vec(1, 1, vec![if b { 1.0f32 } else { 0.0 }]);

    let pose = out
        .heatmap_logits
        .cross_entropy_rows(&heat_t)
        .mul_scalar(views as f64)
        .add(&out.rotation_logits.cross_entropy_rows(&rot_t).mul_scalar(3.0));
    let open = out.open_logit.bce_with_logits(&flag(tgt.open));
    let collide = out.collide_logit.bce_with_logits(&flag(tgt.collide));
    [pose, open, collide]
}

/// FNV-1a over the fields that identify a sample, so jitter draws depend on
/// content rather than batch position.
fn content_hash(sample: &TrainSample) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h = (h ^ u64::from(b)).wrapping_mul(PRIME);
        }
    };
    eat(sample.instruction.as_bytes());
    eat(&sample.proprio.pose.to_le_bytes());
    eat(&[u8::from(sample.proprio.gripper_open)]);
    eat(&sample.proprio.timestep.to_le_bytes());
    eat(&sample.target.pose.to_le_bytes());
    eat(&[u8::from(sample.target.gripper_open), u8::from(sample.target.collide)]);
    h
}
