use crate::{Aabb, GeometryError, Pose, Quat, Vec3, VirtualCamera};
use serde::{Deserialize, Serialize};

pub const VIEW_COUNT: usize = 5;
pub const VIEW_NAMES: [&str; VIEW_COUNT] = ["top", "front", "back", "left", "right"];

/// Camera offset directions in the rig frame, paired with the up hint that
/// fixes each image orientation (side views keep rig +z up; the top view
/// keeps rig +y up).
const VIEW_OFFSETS: [Vec3; VIEW_COUNT] = [
    Vec3::new(0.0, 0.0, 1.0),
    Vec3::new(0.0, -1.0, 0.0),
    Vec3::new(0.0, 1.0, 0.0),
    Vec3::new(-1.0, 0.0, 0.0),
    Vec3::new(1.0, 0.0, 0.0),
];
const VIEW_UP_HINTS: [Vec3; VIEW_COUNT] = [
    Vec3::new(0.0, 1.0, 0.0),
    Vec3::new(0.0, 0.0, 1.0),
    Vec3::new(0.0, 0.0, 1.0),
    Vec3::new(0.0, 0.0, 1.0),
    Vec3::new(0.0, 0.0, 1.0),
];

/// Rig construction knobs. The stage schedule itself (full workspace at
/// stage 0, half-extent halving per stage) is fixed; these switch the
/// ablation variants and set world-scale constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigConfig {
    pub resolution: usize,
    /// Anchor-to-camera distance in meters, shared by every stage so a
    /// point keeps the same raw depth across zoom levels.
    pub camera_distance: f64,
    /// Near/far pad as a fraction of half_extent, so content exactly on the
    /// rig cube boundary still renders.
    pub clip_pad: f64,
    /// Halve the viewing extent each stage (the zoom schedule); disabling
    /// this is the "no zoom" ablation.
    pub zoom_enabled: bool,
    /// Anchor stage >= 1 rigs with identity rotation instead of the full
    /// predicted rotation.
    pub fixed_rotation: bool,
    /// Place cameras at the anchor facing outward instead of outside the
    /// anchor facing in.
    pub look_outward: bool,
    /// Reject poses outside the workspace inflated by this fraction of its
    /// half-extent; clamp poses inside the margin back onto the box.
    pub workspace_inflation: f64,
}

impl RigConfig {
    pub fn for_workspace(workspace: &Aabb, resolution: usize) -> Self {
        RigConfig {
            resolution,
            camera_distance: 2.0 * workspace.half_extent(),
            clip_pad: 0.05,
            zoom_enabled: true,
            fixed_rotation: false,
            look_outward: false,
            workspace_inflation: 0.25,
        }
    }
}

/// Five orthographic cameras around (or at) an anchor pose.
#[derive(Debug, Clone)]
pub struct CameraRig {
    pub cameras: [VirtualCamera; VIEW_COUNT],
    pub anchor_pose: Pose,
    pub stage: usize,
    pub half_extent: f64,
    /// True when the anchor translation was pulled back onto the workspace.
    pub clamped: bool,
}

/// The camera mapping: stage 0 is the fixed rig around the workspace center;
/// stage i >= 1 anchors the rig at the action pose with half-extent
/// half_extent(0) * 2^-i. Rotating the action pose rotates the whole rig.
pub fn camera_rig_from_action(
    a_pose: &Pose,
    stage: usize,
    workspace: &Aabb,
    cfg: &RigConfig,
) -> Result<CameraRig, GeometryError> {
    if !a_pose.is_finite() {
        return Err(GeometryError::NonFinitePose(Box::new(*a_pose)));
    }
    let he0 = workspace.half_extent();
    let (anchor_pose, clamped) = if stage == 0 {
        (Pose::new(workspace.center(), Quat::IDENTITY), false)
    } else {
        let rotation = if cfg.fixed_rotation {
            Quat::IDENTITY
        } else {
            a_pose.rotation
        };
        let t = a_pose.translation;
        if !workspace.inflated(cfg.workspace_inflation).contains(t) {
            return Err(GeometryError::PoseOutsideWorkspace(t));
        }
        let clamped_t = workspace.clamp(t);
        (Pose::new(clamped_t, rotation), clamped_t != t)
    };
    let half_extent = if cfg.zoom_enabled {
        // Exact: half-extent halves per stage, in floating point too.
        he0 * 0.5f64.powi(stage as i32)
    } else {
        he0
    };

    let pad = cfg.clip_pad * half_extent;
    let cameras: [VirtualCamera; VIEW_COUNT] = std::array::from_fn(|i| {
        let offset_world = anchor_pose.rotation.rotate(VIEW_OFFSETS[i]);
        let up_world = anchor_pose.rotation.rotate(VIEW_UP_HINTS[i]);
        let anchor = anchor_pose.translation;
        if cfg.look_outward {
            // Eye at the anchor, facing along the offset axis.
            let forward = offset_world;
            let rotation = crate::camera::orient_from_forward(forward, up_world);
            VirtualCamera::new(
                Pose::new(anchor, rotation),
                anchor,
                half_extent,
                -pad,
                half_extent + pad,
                cfg.resolution,
            )
            .expect("outward camera construction")
        } else {
            let eye = anchor + offset_world * cfg.camera_distance;
            VirtualCamera::look_at(
                eye,
                anchor,
                up_world,
                anchor,
                half_extent,
                cfg.camera_distance - half_extent - pad,
                cfg.camera_distance + half_extent + pad,
                cfg.resolution,
            )
            .expect("inward camera construction")
        }
    });

    Ok(CameraRig {
        cameras,
        anchor_pose,
        stage,
        half_extent,
        clamped,
    })
}
