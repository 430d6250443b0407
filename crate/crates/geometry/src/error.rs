use crate::Vec3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    /// A predicted pose left the inflated workspace: refinement has diverged
    /// and no sensible rig can be anchored there.
    #[error("pose translation {0:?} is outside the inflated workspace")]
    PoseOutsideWorkspace(Vec3),
    #[error("camera clip planes require near < far (near {near}, far {far})")]
    BadClipPlanes { near: f64, far: f64 },
    #[error("camera half extent must be positive, got {0}")]
    BadHalfExtent(f64),
    #[error("camera resolution must be nonzero")]
    ZeroResolution,
    #[error("pose is not finite: {0:?}")]
    NonFinitePose(Box<crate::Pose>),
}
