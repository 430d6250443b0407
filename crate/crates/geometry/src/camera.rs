use crate::{GeometryError, Pose, Quat, Vec3};

/// Orthographic virtual camera. `pose` maps camera to world; the camera frame
/// has +x pointing image-right, +y image-down, +z along the view direction.
///
/// Pixel coordinates: camera-frame x in [-half_extent, +half_extent) maps
/// affinely onto u in [0, resolution); pixel (i, j) covers the half-open unit
/// square with center (i + 0.5, j + 0.5). The projection of the anchor is the
/// image center (resolution / 2, resolution / 2).
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualCamera {
    pub pose: Pose,
    /// Rig anchor this camera belongs to; used for background world-xyz fill.
    pub anchor: Vec3,
    pub half_extent: f64,
    pub near: f64,
    pub far: f64,
    pub resolution: usize,
}

impl VirtualCamera {
    pub fn new(
        pose: Pose,
        anchor: Vec3,
        half_extent: f64,
        near: f64,
        far: f64,
        resolution: usize,
    ) -> Result<Self, GeometryError> {
        if half_extent <= 0.0 {
            return Err(GeometryError::BadHalfExtent(half_extent));
        }
        if near >= far {
            return Err(GeometryError::BadClipPlanes { near, far });
        }
        if resolution == 0 {
            return Err(GeometryError::ZeroResolution);
        }
        Ok(VirtualCamera {
            pose,
            anchor,
            half_extent,
            near,
            far,
            resolution,
        })
    }

    /// Build a camera at `eye` looking at `target` with the image-up side
    /// chosen by `up_hint` (must not be parallel to the view direction).
    pub fn look_at(
        eye: Vec3,
        target: Vec3,
        up_hint: Vec3,
        anchor: Vec3,
        half_extent: f64,
        near: f64,
        far: f64,
        resolution: usize,
    ) -> Result<Self, GeometryError> {
        let forward = (target - eye).normalized();
        let rotation = orient_from_forward(forward, up_hint);
        VirtualCamera::new(
            Pose::new(eye, rotation),
            anchor,
            half_extent,
            near,
            far,
            resolution,
        )
    }

    /// Precompute the world-to-camera transform for the hot projection path.
    /// Every consumer (renderer, its oracle, heatmap decode) projects through
    /// this one implementation so results agree bit-for-bit.
    pub fn projector(&self) -> Projector {
        let inv_rot = self.pose.rotation.conjugate().to_matrix3();
        let t = self.pose.translation;
        Projector {
            rot: inv_rot,
            trans: Vec3::new(
                -(inv_rot[0][0] * t.x + inv_rot[0][1] * t.y + inv_rot[0][2] * t.z),
                -(inv_rot[1][0] * t.x + inv_rot[1][1] * t.y + inv_rot[1][2] * t.z),
                -(inv_rot[2][0] * t.x + inv_rot[2][1] * t.y + inv_rot[2][2] * t.z),
            ),
            cam_rot: self.pose.rotation.to_matrix3(),
            cam_trans: t,
            half_extent: self.half_extent,
            resolution: self.resolution as f64,
            near: self.near,
            far: self.far,
        }
    }
}

/// Flattened orthographic projection (world -> pixel u, v plus camera depth).
#[derive(Debug, Clone)]
pub struct Projector {
    rot: [[f64; 3]; 3],
    trans: Vec3,
    cam_rot: [[f64; 3]; 3],
    cam_trans: Vec3,
    half_extent: f64,
    resolution: f64,
    near: f64,
    far: f64,
}

impl Projector {
    /// Returns continuous pixel coordinates (u, v) and camera-frame depth.
    /// Points outside the frustum yield coordinates outside [0, resolution)
    /// or a depth outside [near, far].
    #[inline]
    pub fn project(&self, p: Vec3) -> (f64, f64, f64) {
        let r = &self.rot;
        let cx = r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + self.trans.x;
        let cy = r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + self.trans.y;
        let cz = r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + self.trans.z;
        let scale = self.resolution / (2.0 * self.half_extent);
        (
            (cx + self.half_extent) * scale,
            (cy + self.half_extent) * scale,
            cz,
        )
    }

    pub fn unproject(&self, u: f64, v: f64, depth: f64) -> Vec3 {
        let cx = (u / self.resolution - 0.5) * 2.0 * self.half_extent;
        let cy = (v / self.resolution - 0.5) * 2.0 * self.half_extent;
        let c = Vec3::new(cx, cy, depth);
        let r = &self.cam_rot;
        Vec3::new(
            r[0][0] * c.x + r[0][1] * c.y + r[0][2] * c.z + self.cam_trans.x,
            r[1][0] * c.x + r[1][1] * c.y + r[1][2] * c.z + self.cam_trans.y,
            r[2][0] * c.x + r[2][1] * c.y + r[2][2] * c.z + self.cam_trans.z,
        )
    }

    #[inline]
    pub fn depth_in_range(&self, depth: f64) -> bool {
        depth >= self.near && depth <= self.far
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution as usize
    }
}

/// Right-handed camera basis from a forward direction and an up hint:
/// x = forward x up_hint (image right), y = forward x x (image down).
pub(crate) fn orient_from_forward(forward: Vec3, up_hint: Vec3) -> Quat {
    let z = forward.normalized();
    let x = z.cross(up_hint.normalized()).normalized();
    let y = z.cross(x);
    // Columns are the camera axes expressed in the parent frame.
    let m = [
        [x.x, y.x, z.x],
        [x.y, y.y, z.y],
        [x.z, y.z, z.z],
    ];
    Quat::from_matrix3(&m)
}
