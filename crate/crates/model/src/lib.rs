//! Action transformer for the in-hand refinement pipeline.
//!
//! The model consumes the multi-view renderings from `inhand-render`
//! together with a language instruction and proprioception, runs a
//! stage-masked transformer over the patch tokens, and emits per-stage
//! translation heatmaps, Euler-bin rotation logits, and gripper flags.
//! [`decode_action`] turns those raw outputs back into an SE(3) pose.
//!
//! Stage masking is strict: queries of stage `i` can only see keys of
//! stages `<= i` (plus the language/proprioception context), so earlier
//! stages are bit-for-bit independent of later renderings.

mod config;
mod decode;
mod error;
mod mask;
mod model;
mod rope;
mod tokenizer;
mod tokens;

pub use config::ModelConfig;
pub use decode::{candidate_grid, decode_action, decode_translation, DecodedAction};
pub use error::ModelError;
pub use mask::{stage_mask, MASK_BLOCK};
pub use model::{Model, ModelOutput, Proprio, StageOutput};
pub use rope::position_theta;
pub use tokenizer::{language_token_ids, PAD_TOKEN};
pub use tokens::{patch_world_positions, TokenSet};
