use crate::Vec3;
use serde::{Deserialize, Serialize};

/// Axis-aligned box; the workspace is one of these (cubic in practice, but
/// the rig only relies on the largest half-dimension).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        assert!(
            min.x < max.x && min.y < max.y && min.z < max.z,
            "degenerate box {min:?}..{max:?}"
        );
        Aabb { min, max }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn half_extents(&self) -> Vec3 {
        (self.max - self.min) * 0.5
    }

    /// Largest half-dimension; the rig cube side is twice this.
    pub fn half_extent(&self) -> f64 {
        self.half_extents().max_component()
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn clamp(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z.clamp(self.min.z, self.max.z),
        )
    }

    /// Grow every side by `frac` of the largest half-dimension.
    pub fn inflated(&self, frac: f64) -> Aabb {
        let pad = Vec3::new(1.0, 1.0, 1.0) * (self.half_extent() * frac);
        Aabb {
            min: self.min - pad,
            max: self.max + pad,
        }
    }
}
