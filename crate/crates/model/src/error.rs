use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    Config(String),
    #[error("bad model input: {0}")]
    Input(String),
    #[error("translation decoding needs at least one candidate point")]
    EmptyCandidates,
    #[error("checkpoint does not match the expected config: {0}")]
    CheckpointMismatch(String),
    #[error(transparent)]
    Autodiff(#[from] inhand_autodiff::AutodiffError),
}
