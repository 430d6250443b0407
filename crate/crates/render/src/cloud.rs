use inhand_geometry::Vec3;

use crate::error::RenderError;

/// A set of colored 3-D points in world coordinates.
///
/// Positions are kept in `f64` so that projection math matches the camera
/// code exactly; colors are `f32` RGB in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    positions: Vec<Vec3>,
    colors: Vec<[f32; 3]>,
}

impl PointCloud {
    /// Builds a cloud, rejecting empty or non-finite input. Colors are
    /// clamped into `[0, 1]` so that callers feeding raw sensor values do
    /// not have to pre-sanitize them.
    pub fn new(positions: Vec<Vec3>, colors: Vec<[f32; 3]>) -> Result<Self, RenderError> {
        if positions.is_empty() {
            return Err(RenderError::EmptyCloud);
        }
        if positions.len() != colors.len() {
            return Err(RenderError::LengthMismatch {
                positions: positions.len(),
                colors: colors.len(),
            });
        }
        for (index, p) in positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(RenderError::NonFinitePoint { index });
            }
        }
        let mut colors = colors;
        for c in &mut colors {
            for ch in c.iter_mut() {
                if !ch.is_finite() {
                    *ch = 0.0;
                }
                *ch = ch.clamp(0.0, 1.0);
            }
        }
        Ok(Self { positions, colors })
    }

    /// Single uniform color for every point.
    pub fn with_uniform_color(positions: Vec<Vec3>, color: [f32; 3]) -> Result<Self, RenderError> {
        let colors = vec![color; positions.len()];
        Self::new(positions, colors)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn colors(&self) -> &[[f32; 3]] {
        &self.colors
    }

    /// Appends another cloud's points after this cloud's own.
    pub fn extend(&mut self, other: &PointCloud) {
        self.positions.extend_from_slice(&other.positions);
        self.colors.extend_from_slice(&other.colors);
    }

    /// Applies a rigid transform to every position, leaving colors alone.
    pub fn transformed(&self, pose: &inhand_geometry::Pose) -> PointCloud {
        let positions = self.positions.iter().map(|p| pose.transform_point(*p)).collect();
        PointCloud {
            positions,
            colors: self.colors.clone(),
        }
    }

    /// Reorders points so that renders become independent of the original
    /// insertion order: sorts lexicographically by (x, y, z, r, g, b).
    ///
    /// Depth ties during rasterization resolve by point index, so two clouds
    /// containing the same point set in different orders can disagree on tied
    /// pixels. Canonical sorting removes that dependence.
    pub fn canonical_sort(&mut self) {
        let mut order: Vec<usize> = (0..self.positions.len()).collect();
        order.sort_by(|&a, &b| {
            let pa = &self.positions[a];
            let pb = &self.positions[b];
            let ka = [pa.x, pa.y, pa.z];
            let kb = [pb.x, pb.y, pb.z];
            ka.partial_cmp(&kb)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| {
                    self.colors[a]
                        .partial_cmp(&self.colors[b])
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        });
        self.positions = order.iter().map(|&i| self.positions[i]).collect();
        self.colors = order.iter().map(|&i| self.colors[i]).collect();
    }
}
