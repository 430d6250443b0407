//! SE(3) poses, discrete Euler rotation bins, and orthographic virtual
//! camera rigs (a fixed global rig plus zoomed rigs anchored at a pose).
//!
//! Poses are stored as unit quaternion + translation; homogeneous matrices
//! appear only in oracle tests. All geometry runs in f64.

mod aabb;
mod camera;
mod error;
mod euler;
mod pose;
mod quat;
mod rig;
mod vec3;

pub use aabb::Aabb;
pub use camera::{Projector, VirtualCamera};
pub use error::GeometryError;
pub use euler::{euler_decode, euler_encode, intrinsic_xyz_angles, EulerBins, EULER_BINS_PER_AXIS};
pub use pose::Pose;
pub use quat::Quat;
pub use rig::{camera_rig_from_action, CameraRig, RigConfig, VIEW_COUNT, VIEW_NAMES};
pub use vec3::Vec3;
