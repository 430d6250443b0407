use inhand_geometry::{Pose, Vec3};

use crate::cloud::PointCloud;
use crate::error::RenderError;

/// Pinhole camera intrinsics in pixels. The camera frame is +x right,
/// +y down, +z forward, the same convention the virtual cameras use.
#[derive(Debug, Clone, Copy)]
pub struct PinholeIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

/// Lifts a pinhole RGB-D image into a world-space point cloud.
///
/// `depth` holds one metric depth per pixel (row-major, `width * height`);
/// `rgb` holds interleaved RGB in `[0, 1]` (`width * height * 3`). Pixels
/// with non-finite or non-positive depth are skipped. `camera_to_world`
/// maps camera-frame points into the world. Pixel `(row, col)` unprojects
/// through its center `(col + 0.5, row + 0.5)`.
pub fn unproject_rgbd(
    depth: &[f32],
    rgb: &[f32],
    width: usize,
    height: usize,
    intrinsics: PinholeIntrinsics,
    camera_to_world: &Pose,
) -> Result<PointCloud, RenderError> {
    let n = width * height;
    if depth.len() != n {
        return Err(RenderError::BadImageShape {
            got: depth.len(),
            width,
            height,
            expected: n,
        });
    }
    if rgb.len() != n * 3 {
        return Err(RenderError::BadImageShape {
            got: rgb.len(),
            width,
            height,
            expected: n * 3,
        });
    }
    let mut positions = Vec::new();
    let mut colors = Vec::new();
    for row in 0..height {
        for col in 0..width {
            let px = row * width + col;
            let d = depth[px] as f64;
            if !(d.is_finite() && d > 0.0) {
                continue;
            }
            let u = col as f64 + 0.5;
            let v = row as f64 + 0.5;
            let cam = Vec3::new(
                (u - intrinsics.cx) * d / intrinsics.fx,
                (v - intrinsics.cy) * d / intrinsics.fy,
                d,
            );
            positions.push(camera_to_world.transform_point(cam));
            colors.push([rgb[px * 3], rgb[px * 3 + 1], rgb[px * 3 + 2]]);
        }
    }
    if positions.is_empty() {
        return Err(RenderError::EmptyCloud);
    }
    PointCloud::new(positions, colors)
}
