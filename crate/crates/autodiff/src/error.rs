use thiserror::Error;

#[derive(Debug, Error)]
pub enum AutodiffError {
    /// A parameter's gradient contained NaN or infinity; the optimizer
    /// refuses the whole step so parameters stay untouched.
    #[error("non-finite gradient in parameter '{param}'")]
    NonFiniteGradient { param: String },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
