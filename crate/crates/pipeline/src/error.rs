use thiserror::Error;

/// Everything that can go wrong between a raw demonstration and a decoded
/// action. Frustum and loss failures carry enough context to locate the
/// offending sample.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("metadata error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid demonstration: {0}")]
    Validation(String),
    #[error("ground truth projects outside the stage {stage} view {view} frustum")]
    GtOutsideFrustum { stage: usize, view: usize },
    #[error("non-finite loss: {0}")]
    NonFiniteLoss(String),
    #[error(transparent)]
    Geometry(#[from] inhand_geometry::GeometryError),
    #[error(transparent)]
    Render(#[from] inhand_render::RenderError),
    #[error(transparent)]
    Model(#[from] inhand_model::ModelError),
    #[error(transparent)]
    Autodiff(#[from] inhand_autodiff::AutodiffError),
}
