use std::path::Path;

use inhand_autodiff::{load_checkpoint, save_checkpoint, ParamSet, Tensor};
use inhand_geometry::Pose;
use inhand_render::{RenderedStage, VIEW_CHANNELS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ModelConfig;
use crate::error::ModelError;
use crate::mask::stage_mask;
use crate::rope::position_theta;
use crate::tokenizer::language_token_ids;
use crate::tokens::{patch_world_positions, TokenSet};

/// Features handed to the proprioception MLP: gripper flag, normalized
/// timestep, and the 7 pose numbers (translation + unit quaternion).
const PROP_FEATURES: usize = 2 + 7;

const LN_EPS: f64 = 1e-5;

/// Robot-side state folded into the single proprioception token.
#[derive(Debug, Clone)]
pub struct Proprio {
    pub gripper_open: bool,
    /// Normalized episode progress, in [0, 1].
    pub timestep: f64,
    /// Current end-effector pose in world coordinates.
    pub pose: Pose,
}

/// Raw head outputs for one refinement stage. Everything stays a graph
/// tensor so training can build losses directly on top.
pub struct StageOutput {
    /// `[views, res^2]` translation logits.
    pub heatmap_logits: Tensor<f32>,
    /// Row-softmaxed heatmaps; each view sums to one.
    pub heatmaps: Tensor<f32>,
    /// `[3, rotation_bins]` Euler-bin logits.
    pub rotation_logits: Tensor<f32>,
    /// `[1, 1]` gripper-open logit.
    pub open_logit: Tensor<f32>,
    /// `[1, 1]` collision-allowed logit.
    pub collide_logit: Tensor<f32>,
}

pub struct ModelOutput {
    /// One entry per rendered stage passed in, in stage order.
    pub stages: Vec<StageOutput>,
}

/// The action network: token assembly, masked multi-stage self-attention
/// with 3-axis rotary embeddings, and the per-stage action heads.
pub struct Model {
    config: ModelConfig,
    params: ParamSet<f32>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("config", &self.config)
            .field("parameters", &self.params.numel())
            .finish()
    }
}

fn head_suffixes(config: &ModelConfig) -> Vec<String> {
    if config.shared_refinement_heads {
        vec!["shared".to_string()]
    } else {
        (0..config.stages).map(|s| format!("s{s}")).collect()
    }
}

impl Model {
    /// Fresh random weights. The draw order is fixed, so equal seeds give
    /// bit-identical models.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Model, ModelError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamSet::new();
        let d = config.model_dim;
        let in_patch = VIEW_CHANNELS * config.patch * config.patch;

        let mut uniform = |params: &mut ParamSet<f32>, name: String, rows: usize, cols: usize, bound: f64| {
            let data: Vec<f32> = (0..rows * cols)
                .map(|_| rng.gen_range(-bound..bound) as f32)
                .collect();
            params.add(name, Tensor::leaf(rows, cols, data));
        };
        fn zeros(params: &mut ParamSet<f32>, name: String, rows: usize, cols: usize) {
            params.add(name, Tensor::leaf(rows, cols, vec![0.0; rows * cols]));
        }
        fn ones(params: &mut ParamSet<f32>, name: String, rows: usize, cols: usize) {
            params.add(name, Tensor::leaf(rows, cols, vec![1.0; rows * cols]));
        }
        let fan = |n: usize| 1.0 / (n as f64).sqrt();

        uniform(&mut params, "lang.embed".into(), config.vocab_size, d, 0.02);
        uniform(&mut params, "lang.pos".into(), config.language_tokens, d, 0.02);
        uniform(&mut params, "prop.w1".into(), d, PROP_FEATURES, fan(PROP_FEATURES));
        zeros(&mut params, "prop.b1".into(), 1, d);
        uniform(&mut params, "prop.w2".into(), d, d, fan(d));
        zeros(&mut params, "prop.b2".into(), 1, d);
        uniform(&mut params, "patch.w".into(), d, in_patch, fan(in_patch));
        zeros(&mut params, "patch.b".into(), 1, d);
        uniform(&mut params, "view.embed".into(), config.views, d, 0.02);
        uniform(&mut params, "stage.embed".into(), config.stages, d, 0.02);
        // Learned rotary phases for the context rows, which have no world
        // position; zero means "no rotation" at init.
        zeros(
            &mut params,
            "rope.context_theta".into(),
            config.language_tokens + 1,
            config.rope_pairs(),
        );

        for i in 0..config.layers {
            ones(&mut params, format!("layers.{i}.ln1.g"), 1, d);
            zeros(&mut params, format!("layers.{i}.ln1.b"), 1, d);
            for w in ["wq", "wk", "wv", "wo"] {
                uniform(&mut params, format!("layers.{i}.attn.{w}"), d, d, fan(d));
            }
            for b in ["bq", "bk", "bv", "bo"] {
                zeros(&mut params, format!("layers.{i}.attn.{b}"), 1, d);
            }
            ones(&mut params, format!("layers.{i}.ln2.g"), 1, d);
            zeros(&mut params, format!("layers.{i}.ln2.b"), 1, d);
            uniform(&mut params, format!("layers.{i}.mlp.w1"), 4 * d, d, fan(d));
            zeros(&mut params, format!("layers.{i}.mlp.b1"), 1, 4 * d);
            uniform(&mut params, format!("layers.{i}.mlp.w2"), d, 4 * d, fan(4 * d));
            zeros(&mut params, format!("layers.{i}.mlp.b2"), 1, d);
        }
        ones(&mut params, "ln_f.g".into(), 1, d);
        zeros(&mut params, "ln_f.b".into(), 1, d);

        let p2 = config.patch * config.patch;
        uniform(&mut params, "head.heatmap.w".into(), p2, d, fan(d));
        zeros(&mut params, "head.heatmap.b".into(), 1, p2);
        // Rotation/open/collision heads start at zero: uniform rotation bins
        // and 0.5 probabilities until training moves them.
        for sfx in head_suffixes(&config) {
            zeros(&mut params, format!("head.rot.{sfx}.w"), 3 * config.rotation_bins, d);
            zeros(&mut params, format!("head.rot.{sfx}.b"), 1, 3 * config.rotation_bins);
            zeros(&mut params, format!("head.open.{sfx}.w"), 1, d);
            zeros(&mut params, format!("head.open.{sfx}.b"), 1, 1);
            zeros(&mut params, format!("head.col.{sfx}.w"), 1, d);
            zeros(&mut params, format!("head.col.{sfx}.b"), 1, 1);
        }

        Ok(Model { config, params })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamSet<f32> {
        &self.params
    }

    /// Mutable access for the optimizer; training is single-writer.
    pub fn params_mut(&mut self) -> &mut ParamSet<f32> {
        &mut self.params
    }

    fn p(&self, name: &str) -> &Tensor<f32> {
        self.params
            .get(name)
            .unwrap_or_else(|| panic!("parameter '{name}' is not registered"))
    }

    fn head_suffix(&self, stage: usize) -> String {
        if self.config.shared_refinement_heads {
            "shared".to_string()
        } else {
            format!("s{stage}")
        }
    }

    fn validate_stages(&self, stages: &[RenderedStage]) -> Result<(), ModelError> {
        if stages.is_empty() {
            return Err(ModelError::Input("at least one rendered stage is required".into()));
        }
        if stages.len() > self.config.stages {
            return Err(ModelError::Input(format!(
                "{} stages passed but the config allows {}",
                stages.len(),
                self.config.stages
            )));
        }
        for (s, st) in stages.iter().enumerate() {
            if st.rig.stage != s {
                return Err(ModelError::Input(format!(
                    "stage {s} rendering carries rig stage {}",
                    st.rig.stage
                )));
            }
            if st.views.len() != self.config.views {
                return Err(ModelError::Input(format!(
                    "stage {s} has {} views, config wants {}",
                    st.views.len(),
                    self.config.views
                )));
            }
            for v in &st.views {
                if v.resolution != self.config.image_resolution {
                    return Err(ModelError::Input(format!(
                        "stage {s} rendered at {}px, config wants {}px",
                        v.resolution, self.config.image_resolution
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds the token matrix: language, proprioception, then every stage's
    /// patch tokens in view order.
    pub fn assemble_tokens(
        &self,
        stages: &[RenderedStage],
        instruction: &str,
        proprio: &Proprio,
    ) -> Result<TokenSet, ModelError> {
        self.validate_stages(stages)?;
        if !(0.0..=1.0).contains(&proprio.timestep) {
            return Err(ModelError::Input(format!(
                "timestep {} outside [0, 1]",
                proprio.timestep
            )));
        }
        if !proprio.pose.is_finite() {
            return Err(ModelError::Input("proprioception pose is not finite".into()));
        }
        let cfg = &self.config;
        let res = cfg.image_resolution;
        let k_img = cfg.patches_per_view();

        let ids = language_token_ids(instruction, cfg.language_tokens, cfg.vocab_size);
        let lang = self
            .p("lang.embed")
            .gather_rows(&ids)
            .add(self.p("lang.pos"));

        let pose7 = proprio.pose.to_array7();
        let mut feats = vec![
            if proprio.gripper_open { 1.0f32 } else { 0.0 },
            proprio.timestep as f32,
        ];
        feats.extend(pose7.iter().map(|&x| x as f32));
        let prop_tok = Tensor::from_vec(1, PROP_FEATURES, feats)
            .matmul_tb(self.p("prop.w1"))
            .add_bias(self.p("prop.b1"))
            .gelu()
            .matmul_tb(self.p("prop.w2"))
            .add_bias(self.p("prop.b2"));

        let context = cfg.context_tokens();
        let mut stage_of = vec![0usize; context];
        let mut positions: Vec<Option<inhand_geometry::Vec3>> = vec![None; context];
        let mut view_of: Vec<Option<usize>> = vec![None; context];

        let mut parts: Vec<Tensor<f32>> = vec![lang, prop_tok];
        for (s, st) in stages.iter().enumerate() {
            let stage_row = self.p("stage.embed").slice_rows(s, 1);
            for (v, view) in st.views.iter().enumerate() {
                let chw = Tensor::from_vec(VIEW_CHANNELS, res * res, view.to_chw());
                let tok = chw
                    .im2patches(res, res, cfg.patch)
                    .matmul_tb(self.p("patch.w"))
                    .add_bias(self.p("patch.b"))
                    .add_bias(&self.p("view.embed").slice_rows(v, 1))
                    .add_bias(&stage_row);
                parts.push(tok);
                for p in patch_world_positions(view, cfg.patch) {
                    positions.push(Some(p));
                    view_of.push(Some(v));
                    stage_of.push(s);
                }
            }
        }
        let refs: Vec<&Tensor<f32>> = parts.iter().collect();
        let embeddings = Tensor::concat_rows(&refs);
        debug_assert_eq!(embeddings.rows(), context + stages.len() * cfg.views * k_img);

        Ok(TokenSet {
            embeddings,
            stage_of,
            positions,
            view_of,
            context,
        })
    }

    /// Full forward pass: transformer over the assembled tokens, then the
    /// per-stage heads. Outputs stay connected to the parameter graph.
    pub fn forward(
        &self,
        stages: &[RenderedStage],
        instruction: &str,
        proprio: &Proprio,
    ) -> Result<ModelOutput, ModelError> {
        let tokens = self.assemble_tokens(stages, instruction, proprio)?;
        let cfg = &self.config;
        let d = cfg.model_dim;
        let heads = cfg.heads;
        let dh = d / heads;
        let pairs = cfg.rope_pairs();
        let t_total = tokens.stage_of.len();
        let scale = 1.0 / (dh as f64).sqrt();

        // Pre-scaled mask: (q·s)·kᵀ + M·s equals (q·kᵀ + M)·s and saves one
        // full T×T intermediate. The blocked entries still drive exp to an
        // exact zero.
        let mask = stage_mask::<f32>(&tokens.stage_of, tokens.context, cfg.cross_stage_attention)
            .mul_scalar(scale);

        let theta = if cfg.use_rope {
            let mut img = Vec::with_capacity((t_total - tokens.context) * pairs);
            for row in tokens.context..t_total {
                let p = tokens.positions[row].expect("image token without a position");
                img.extend(position_theta(p, pairs).into_iter().map(|a| a as f32));
            }
            let img_theta = Tensor::from_vec(t_total - tokens.context, pairs, img);
            Some(Tensor::concat_rows(&[
                self.p("rope.context_theta"),
                &img_theta,
            ]))
        } else {
            None
        };

        let mut x = tokens.embeddings.clone();
        for i in 0..cfg.layers {
            let p = |s: &str| self.p(&format!("layers.{i}.{s}"));
            let h = x.layer_norm(p("ln1.g"), p("ln1.b"), LN_EPS);
            let q = h.matmul_tb(p("attn.wq")).add_bias(p("attn.bq"));
            let k = h.matmul_tb(p("attn.wk")).add_bias(p("attn.bk"));
            let v = h.matmul_tb(p("attn.wv")).add_bias(p("attn.bv"));

            let mut head_outs = Vec::with_capacity(heads);
            for a in 0..heads {
                let mut qa = q.slice_cols(a * dh, dh);
                let mut ka = k.slice_cols(a * dh, dh);
                if let Some(th) = &theta {
                    qa = qa.rope(th);
                    ka = ka.rope(th);
                }
                let va = v.slice_cols(a * dh, dh);
                let probs = qa
                    .mul_scalar(scale)
                    .matmul_tb(&ka)
                    .add(&mask)
                    .softmax_rows();
                head_outs.push(probs.matmul(&va));
            }
            let head_refs: Vec<&Tensor<f32>> = head_outs.iter().collect();
            let attn = Tensor::concat_cols(&head_refs)
                .matmul_tb(p("attn.wo"))
                .add_bias(p("attn.bo"));
            x = x.add(&attn);

            let h2 = x.layer_norm(p("ln2.g"), p("ln2.b"), LN_EPS);
            let mlp = h2
                .matmul_tb(p("mlp.w1"))
                .add_bias(p("mlp.b1"))
                .gelu()
                .matmul_tb(p("mlp.w2"))
                .add_bias(p("mlp.b2"));
            x = x.add(&mlp);
        }
        let x = x.layer_norm(self.p("ln_f.g"), self.p("ln_f.b"), LN_EPS);

        let res = cfg.image_resolution;
        let g = res / cfg.patch;
        let k_img = cfg.patches_per_view();
        let p2 = cfg.patch * cfg.patch;
        let ones_patch = Tensor::from_vec(1, p2, vec![1.0f32; p2]);
        let mut outs = Vec::with_capacity(stages.len());
        for s in 0..stages.len() {
            let base = tokens.context + s * cfg.views * k_img;

            let mut view_imgs = Vec::with_capacity(cfg.views);
            for v in 0..cfg.views {
                let rows = x.slice_rows(base + v * k_img, k_img);
                let img = rows
                    .matmul_tb(self.p("head.heatmap.w"))
                    .add_bias(self.p("head.heatmap.b"))
                    .patches_to_image(g, g, cfg.patch);
                view_imgs.push(img);
            }
            let img_refs: Vec<&Tensor<f32>> = view_imgs.iter().collect();
            let heatmap_logits = Tensor::concat_rows(&img_refs);
            let heatmaps = heatmap_logits.softmax_rows();

            // Pool image features with the heatmap mass that fell on each
            // patch, average over views, and run the action heads on that.
            let mut pooled: Option<Tensor<f32>> = None;
            for v in 0..cfg.views {
                let mass = heatmaps
                    .slice_rows(v, 1)
                    .im2patches(res, res, cfg.patch)
                    .matmul_tb(&ones_patch)
                    .reshape(1, k_img);
                let rows = x.slice_rows(base + v * k_img, k_img);
                let pv = mass.matmul(&rows);
                pooled = Some(match pooled {
                    Some(acc) => acc.add(&pv),
                    None => pv,
                });
            }
            let pooled = pooled.expect("views > 0").mul_scalar(1.0 / cfg.views as f64);

            let sfx = self.head_suffix(s);
            let rotation_logits = pooled
                .matmul_tb(self.p(&format!("head.rot.{sfx}.w")))
                .add_bias(self.p(&format!("head.rot.{sfx}.b")))
                .reshape(3, cfg.rotation_bins);
            let open_logit = pooled
                .matmul_tb(self.p(&format!("head.open.{sfx}.w")))
                .add_bias(self.p(&format!("head.open.{sfx}.b")));
            let collide_logit = pooled
                .matmul_tb(self.p(&format!("head.col.{sfx}.w")))
                .add_bias(self.p(&format!("head.col.{sfx}.b")));

            outs.push(StageOutput {
                heatmap_logits,
                heatmaps,
                rotation_logits,
                open_logit,
                collide_logit,
            });
        }

        Ok(ModelOutput { stages: outs })
    }

    /// Writes weights plus the config into a single checkpoint file.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let config = serde_json::to_value(&self.config)
            .map_err(|e| ModelError::Config(format!("config not serializable: {e}")))?;
        save_checkpoint(path, &self.params, &config)?;
        Ok(())
    }

    /// Restores a model from a checkpoint written by [`Model::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<Model, ModelError> {
        let ck = load_checkpoint(path)?;
        let config: ModelConfig = serde_json::from_value(ck.config.clone())
            .map_err(|e| ModelError::CheckpointMismatch(format!("bad config header: {e}")))?;
        let model = Model::new(config, 0)?;
        if ck.params.len() != model.params.len() {
            return Err(ModelError::CheckpointMismatch(format!(
                "checkpoint has {} parameters, model wants {}",
                ck.params.len(),
                model.params.len()
            )));
        }
        for entry in ck.params {
            let t = model.params.get(&entry.name).ok_or_else(|| {
                ModelError::CheckpointMismatch(format!("unknown parameter '{}'", entry.name))
            })?;
            if t.shape() != entry.shape {
                return Err(ModelError::CheckpointMismatch(format!(
                    "parameter '{}' is {:?} in the checkpoint but {:?} in the model",
                    entry.name,
                    entry.shape,
                    t.shape()
                )));
            }
            t.set_data(entry.data);
        }
        Ok(model)
    }

    /// Like [`Model::load`] but also insists the stored config equals
    /// `expected` — the guard CLI tools use before mixing checkpoints.
    pub fn load_expecting(path: impl AsRef<Path>, expected: &ModelConfig) -> Result<Model, ModelError> {
        let model = Model::load(path)?;
        if model.config != *expected {
            return Err(ModelError::CheckpointMismatch(
                "stored config differs from the expected one".into(),
        ));
        }
        Ok(model)
    }
}
