use crate::{Quat, Vec3};
use serde::{Deserialize, Serialize};

/// Rigid transform: rotate by `rotation`, then translate by `translation`.
///
/// Serialized (JSON and binary) as seven f64 in the order
/// (tx, ty, tz, qw, qx, qy, qz); the binary form is little-endian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 7]", into = "[f64; 7]")]
pub struct Pose {
    pub translation: Vec3,
    pub rotation: Quat,
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        translation: Vec3::ZERO,
        rotation: Quat::IDENTITY,
    };

    /// Normalizes the rotation so the unit-norm invariant holds from birth.
    pub fn new(translation: Vec3, rotation: Quat) -> Self {
        Pose {
            translation,
            rotation: rotation.normalized(),
        }
    }

    /// compose(a, b) applies b first, then a.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            translation: self.translation + self.rotation.rotate(other.translation),
            rotation: self.rotation.mul(&other.rotation).normalized(),
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv_rot = self.rotation.conjugate();
        Pose {
            translation: inv_rot.rotate(-self.translation),
            rotation: inv_rot,
        }
    }

    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        self.rotation.rotate(p) + self.translation
    }

    pub fn is_finite(&self) -> bool {
        self.translation.is_finite() && self.rotation.is_finite()
    }

    pub fn to_array7(&self) -> [f64; 7] {
        [
            self.translation.x,
            self.translation.y,
            self.translation.z,
            self.rotation.w,
            self.rotation.x,
            self.rotation.y,
            self.rotation.z,
        ]
    }

    /// Verbatim (no renormalization) so stored poses roundtrip bit-exactly;
    /// inputs are expected to already carry a unit rotation.
    pub fn from_array7(a: [f64; 7]) -> Self {
        let rotation = Quat::new(a[3], a[4], a[5], a[6]);
        debug_assert!(
            (rotation.norm() - 1.0).abs() < 1e-6,
            "deserialized pose rotation is far from unit norm"
        );
        Pose {
            translation: Vec3::new(a[0], a[1], a[2]),
            rotation,
        }
    }

    pub fn to_le_bytes(&self) -> [u8; 56] {
        let mut out = [0u8; 56];
        for (i, v) in self.to_array7().iter().enumerate() {
            out[i * 8..(i + 1) * 8].copy_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(bytes: &[u8; 56]) -> Self {
        let mut a = [0f64; 7];
        for (i, v) in a.iter_mut().enumerate() {
            *v = f64::from_le_bytes(bytes[i * 8..(i + 1) * 8].try_into().unwrap());
        }
        Pose::from_array7(a)
    }
}

impl From<[f64; 7]> for Pose {
    fn from(a: [f64; 7]) -> Self {
        Pose::from_array7(a)
    }
}

impl From<Pose> for [f64; 7] {
    fn from(p: Pose) -> Self {
        p.to_array7()
    }
}
