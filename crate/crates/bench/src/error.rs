use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    /// The invocation itself was wrong: unknown task names, malformed
    /// configs, out-of-range arguments.
    #[error("{0}")]
    Usage(String),
    #[error("task {task}: scene constraints still unsatisfied after {attempts} attempts")]
    SceneConstraints { task: String, attempts: usize },
    /// A benchmark guarantee failed to hold at runtime.
    #[error("{0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config file error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Pipeline(#[from] inhand_pipeline::PipelineError),
    #[error(transparent)]
    Model(#[from] inhand_model::ModelError),
    #[error(transparent)]
    Render(#[from] inhand_render::RenderError),
    #[error(transparent)]
    Autodiff(#[from] inhand_autodiff::AutodiffError),
}

impl BenchError {
    /// Exit code the CLI maps this error to: 2 for usage mistakes, 3 for
    /// everything that went wrong while the invocation itself was fine.
    pub fn exit_code(&self) -> u8 {
        match self {
            BenchError::Usage(_) | BenchError::Toml(_) => 2,
            _ => 3,
        }
    }
}
