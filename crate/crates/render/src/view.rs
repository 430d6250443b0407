use inhand_geometry::{CameraRig, VirtualCamera, VIEW_COUNT};

/// Number of feature channels a rendered view exposes to the model:
/// RGB (3) + normalized depth (1) + world-coordinate XYZ (3).
pub const VIEW_CHANNELS: usize = 7;

/// One orthographic-style rendering of a point cloud from a virtual camera.
///
/// All per-pixel buffers are row-major with pixel `(row, col)` at index
/// `row * resolution + col`, where `col` increases along camera `+x` and
/// `row` along camera `+y`.
///
/// Background pixels (no point survived the depth test) hold RGB `0`,
/// normalized depth `1.0`, raw depth `far`, and the rig anchor position as
/// their world coordinate so that downstream consumers always see a finite,
/// in-workspace value.
#[derive(Debug, Clone)]
pub struct RenderedView {
    pub camera: VirtualCamera,
    pub resolution: usize,
    /// `resolution^2 * 3` interleaved RGB values in `[0, 1]`.
    pub rgb: Vec<f32>,
    /// `resolution^2` depths mapped to `[0, 1]` over `[near, far]`.
    pub depth_norm: Vec<f32>,
    /// `resolution^2 * 3` interleaved world positions of the winning point.
    pub world_xyz: Vec<f32>,
    /// `resolution^2` camera-space depths before normalization, in meters.
    pub depth_raw: Vec<f64>,
    /// `resolution^2` flags: did any point land on this pixel?
    pub hit: Vec<bool>,
}

impl RenderedView {
    pub fn pixel_index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.resolution && col < self.resolution);
        row * self.resolution + col
    }

    pub fn rgb_at(&self, row: usize, col: usize) -> [f32; 3] {
        let i = self.pixel_index(row, col) * 3;
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn world_xyz_at(&self, row: usize, col: usize) -> [f32; 3] {
        let i = self.pixel_index(row, col) * 3;
        [self.world_xyz[i], self.world_xyz[i + 1], self.world_xyz[i + 2]]
    }

    /// Packs the seven feature channels as a CHW tensor buffer:
    /// `[r, g, b, depth_norm, x, y, z]`, each plane `resolution^2` long.
    pub fn to_chw(&self) -> Vec<f32> {
        let n = self.resolution * self.resolution;
        let mut out = vec![0.0f32; VIEW_CHANNELS * n];
        for p in 0..n {
            out[p] = self.rgb[p * 3];
            out[n + p] = self.rgb[p * 3 + 1];
            out[2 * n + p] = self.rgb[p * 3 + 2];
            out[3 * n + p] = self.depth_norm[p];
            out[4 * n + p] = self.world_xyz[p * 3];
            out[5 * n + p] = self.world_xyz[p * 3 + 1];
            out[6 * n + p] = self.world_xyz[p * 3 + 2];
        }
        out
    }

    pub fn hit_count(&self) -> usize {
        self.hit.iter().filter(|&&h| h).count()
    }
}

/// The five views rendered from one camera rig, in rig order
/// (top, front, back, left, right).
#[derive(Debug, Clone)]
pub struct RenderedStage {
    pub rig: CameraRig,
    pub views: Vec<RenderedView>,
}

impl RenderedStage {
    pub fn view(&self, i: usize) -> &RenderedView {
        &self.views[i]
    }

    /// Concatenated CHW tensors for all five views:
    /// `[VIEW_COUNT, VIEW_CHANNELS, res, res]` flattened.
    pub fn to_chw(&self) -> Vec<f32> {
        debug_assert_eq!(self.views.len(), VIEW_COUNT);
        let mut out = Vec::with_capacity(
            VIEW_COUNT * VIEW_CHANNELS * self.views[0].resolution * self.views[0].resolution,
        );
        for v in &self.views {
            out.extend_from_slice(&v.to_chw());
        }
        out
    }
}
