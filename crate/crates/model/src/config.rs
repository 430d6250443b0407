use serde::{Deserialize, Serialize};

use crate::ModelError;

/// Network hyperparameters plus the ablation switches. Two presets exist:
/// [`ModelConfig::toy`] keeps a single desktop core happy, and
/// [`ModelConfig::paper_scale`] restores the published constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Refinement stages rendered and refined per action (fixed schedule).
    pub stages: usize,
    /// Orthographic views per stage.
    pub views: usize,
    /// Square render resolution in pixels.
    pub image_resolution: usize,
    /// Patch side length; must divide the resolution.
    pub patch: usize,
    /// Language tokens after padding/truncation.
    pub language_tokens: usize,
    /// Transformer depth.
    pub layers: usize,
    /// Token embedding width.
    pub model_dim: usize,
    /// Attention heads; must divide `model_dim`.
    pub heads: usize,
    /// Euler bins per rotation axis.
    pub rotation_bins: usize,
    /// Hash-bucket vocabulary size for the language embedding.
    pub vocab_size: usize,
    /// Allow tokens to attend to earlier stages (ablation: off keeps each
    /// stage isolated except for the shared context tokens).
    pub cross_stage_attention: bool,
    /// Rotary position encoding on image-token attention (ablation switch).
    pub use_rope: bool,
    /// Predict absolute poses at every stage instead of refinements.
    pub direct_pose: bool,
    /// One rotation/open/collision head for all stages instead of one per
    /// stage. The heatmap head is always shared.
    pub shared_refinement_heads: bool,
}

impl ModelConfig {
    /// Desk-scale defaults: small enough to train in minutes on one core.
    pub fn toy() -> Self {
        ModelConfig {
            stages: 3,
            views: 5,
            image_resolution: 64,
            patch: 8,
            language_tokens: 8,
            layers: 4,
            model_dim: 128,
            heads: 4,
            rotation_bins: 72,
            vocab_size: 256,
            cross_stage_attention: true,
            use_rope: true,
            direct_pose: false,
            shared_refinement_heads: false,
        }
    }

    /// The published constants: 110x110 views in 11x11 patches, 77 language
    /// tokens, 8 layers — 1577 tokens plus proprioception.
    pub fn paper_scale() -> Self {
        ModelConfig {
            image_resolution: 110,
            patch: 11,
            language_tokens: 77,
            layers: 8,
            ..ModelConfig::toy()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.stages == 0 || self.views == 0 {
            return Err(ModelError::Config("stages and views must be nonzero".into()));
        }
        if self.patch == 0 || self.image_resolution % self.patch != 0 {
            return Err(ModelError::Config(format!(
                "patch {} must divide resolution {}",
                self.patch, self.image_resolution
            )));
        }
        if self.heads == 0 || self.model_dim % self.heads != 0 {
            return Err(ModelError::Config(format!(
                "heads {} must divide model_dim {}",
                self.heads, self.model_dim
            )));
        }
        if self.model_dim / self.heads % 2 != 0 {
            return Err(ModelError::Config(format!(
                "head dim {} must be even for rotary pairs",
                self.model_dim / self.heads
            )));
        }
        if self.vocab_size < 2 {
            return Err(ModelError::Config("vocab_size must be at least 2".into()));
        }
        if self.rotation_bins == 0 || self.layers == 0 || self.model_dim == 0 {
            return Err(ModelError::Config(
                "layers, model_dim and rotation_bins must be nonzero".into(),
            ));
        }
        Ok(())
    }

    /// Patches per rendered view (a square grid).
    pub fn patches_per_view(&self) -> usize {
        let g = self.image_resolution / self.patch;
        g * g
    }

    /// Language tokens plus the single proprioception token.
    pub fn context_tokens(&self) -> usize {
        self.language_tokens + 1
    }

    /// Sequence length when `stages_present` stages are in the context.
    pub fn total_tokens(&self, stages_present: usize) -> usize {
        self.context_tokens() + stages_present * self.views * self.patches_per_view()
    }

    /// Rotary pairs per attention head.
    pub fn rope_pairs(&self) -> usize {
        self.model_dim / self.heads / 2
    }
}
