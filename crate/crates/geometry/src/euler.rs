use crate::{Quat, Vec3};
use serde::{Deserialize, Serialize};

pub const EULER_BINS_PER_AXIS: usize = 72;
const BIN_WIDTH_DEG: f64 = 5.0;
const GIMBAL_EPS: f64 = 1e-9;

/// Rotation discretized as intrinsic X-Y-Z Euler angles, one 5-degree bin
/// index per axis, zero-centered (identity encodes to bins [0, 0, 0]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerBins {
    pub bins: [usize; 3],
}

impl EulerBins {
    pub fn new(bins: [usize; 3]) -> Self {
        for b in bins {
            assert!(b < EULER_BINS_PER_AXIS, "euler bin {b} out of range");
        }
        EulerBins { bins }
    }

    /// Bin-center angles in radians.
    pub fn angles(&self) -> [f64; 3] {
        self.bins
            .map(|b| (b as f64 * BIN_WIDTH_DEG).to_radians())
    }
}

/// Canonical intrinsic X-Y-Z angles (radians) of a rotation, with the
/// gimbal-adjacent branch fixed by zeroing the third angle.
///
/// Convention: R = Rx(a0) * Ry(a1) * Rz(a2) acting on column vectors.
pub fn intrinsic_xyz_angles(q: &Quat) -> [f64; 3] {
    let m = q.to_matrix3();
    let sy = m[0][2].clamp(-1.0, 1.0);
    if sy.abs() > 1.0 - GIMBAL_EPS {
        let beta = if sy > 0.0 {
            std::f64::consts::FRAC_PI_2
        } else {
            -std::f64::consts::FRAC_PI_2
        };
        // At the pole only alpha +/- gamma is observable; put it all in alpha.
        let combined = m[1][0].atan2(m[1][1]);
        let alpha = if sy > 0.0 { combined } else { -combined };
        [alpha, beta, 0.0]
    } else {
        [
            (-m[1][2]).atan2(m[2][2]),
            sy.asin(),
            (-m[0][1]).atan2(m[0][0]),
        ]
    }
}

/// Round to the nearest bin; exact half-way boundaries round down.
fn bin_of(angle_rad: f64) -> usize {
    let deg = angle_rad.to_degrees().rem_euclid(360.0);
    let idx = (deg / BIN_WIDTH_DEG - 0.5).ceil() as i64;
    idx.rem_euclid(EULER_BINS_PER_AXIS as i64) as usize
}

pub fn euler_encode(q: &Quat) -> EulerBins {
    let angles = intrinsic_xyz_angles(q);
    EulerBins {
        bins: [bin_of(angles[0]), bin_of(angles[1]), bin_of(angles[2])],
    }
}

pub fn euler_decode(bins: &EulerBins) -> Quat {
    let [a, b, c] = EulerBins::new(bins.bins).angles();
    let qx = Quat::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), a);
    let qy = Quat::from_axis_angle(Vec3::new(0.0, 1.0, 0.0), b);
    let qz = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), c);
    qx.mul(&qy).mul(&qz).normalized()
}
