use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("point cloud must contain at least one point")]
    EmptyCloud,
    #[error("point {index} is not finite")]
    NonFinitePoint { index: usize },
    #[error("positions ({positions}) and colors ({colors}) disagree in length")]
    LengthMismatch { positions: usize, colors: usize },
    #[error("buffer length {got} does not match {width}x{height} image ({expected})")]
    BadImageShape {
        got: usize,
        width: usize,
        height: usize,
        expected: usize,
    },
    #[error("ply: {0}")]
    Ply(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("png encode: {0}")]
    Png(String),
}
