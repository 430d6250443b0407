//! Discrete rotation codec tests. The roundtrip bound oracle is exhaustive
//! sampling: encode/decode random rotations and compare against the original
//! both per-axis (circular bin distance) and as a geodesic angle.

use inhand_geometry::{euler_decode, euler_encode, intrinsic_xyz_angles, EulerBins, Quat, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEG: f64 = std::f64::consts::PI / 180.0;

fn random_quat(rng: &mut ChaCha8Rng) -> Quat {
    Quat::new(
        rng.gen::<f64>() * 2.0 - 1.0,
        rng.gen::<f64>() * 2.0 - 1.0,
        rng.gen::<f64>() * 2.0 - 1.0,
        rng.gen::<f64>() * 2.0 - 1.0,
    )
    .normalized()
}

fn circular_deg_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

#[test]
fn identity_encodes_to_zero_bins() {
    assert_eq!(euler_encode(&Quat::IDENTITY).bins, [0, 0, 0]);
}

#[test]
fn yaw_90_encodes_to_z_bin_18() {
    let q = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 90.0 * DEG);
    assert_eq!(euler_encode(&q).bins, [0, 0, 18]);
}

#[test]
fn pure_axis_rotations_land_in_expected_bins() {
    for (axis, slot) in [
        (Vec3::new(1.0, 0.0, 0.0), 0),
        (Vec3::new(0.0, 1.0, 0.0), 1),
        (Vec3::new(0.0, 0.0, 1.0), 2),
    ] {
        // Stay below 90 degrees so the y axis avoids the asin branch limit.
        for bin in [0usize, 3, 7, 17] {
            let q = Quat::from_axis_angle(axis, bin as f64 * 5.0 * DEG);
            let enc = euler_encode(&q);
            assert_eq!(enc.bins[slot], bin, "axis slot {slot} angle {}", bin * 5);
            // Negative angles wrap to the top of the bin range.
            if bin != 0 {
                let qn = Quat::from_axis_angle(axis, -(bin as f64) * 5.0 * DEG);
                assert_eq!(euler_encode(&qn).bins[slot], 72 - bin);
            }
        }
    }
}

#[test]
fn boundary_ties_round_half_down() {
    // 2.5 degrees sits exactly between bin 0 and bin 1.
    let q = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 2.5 * DEG);
    assert_eq!(euler_encode(&q).bins[2], 0);
    let q = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 7.5 * DEG);
    assert_eq!(euler_encode(&q).bins[2], 1);
}

#[test]
fn decode_is_exact_on_bin_centers() {
    let bins = EulerBins::new([11, 3, 70]);
    assert_eq!(euler_encode(&euler_decode(&bins)).bins, bins.bins);
}

#[test]
fn roundtrip_error_bounded_over_random_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut max_axis_err = 0.0f64;
    let mut max_geodesic = 0.0f64;
    for _ in 0..1000 {
        let q = random_quat(&mut rng);
        let enc = euler_encode(&q);
        // Per-axis: the encoded bin is within half a bin of the canonical angle.
        let angles = intrinsic_xyz_angles(&q);
        for a in 0..3 {
            let err = circular_deg_dist(angles[a].to_degrees(), enc.bins[a] as f64 * 5.0);
            max_axis_err = max_axis_err.max(err);
        }
        let dec = euler_decode(&enc);
        max_geodesic = max_geodesic.max(q.angle_to(&dec).to_degrees());
    }
    assert!(
        max_axis_err <= 2.5 + 1e-9,
        "per-axis roundtrip error {max_axis_err} exceeds half a bin"
    );
    // Three half-bin axis errors compose to at most their sum on SO(3).
    assert!(
        max_geodesic <= 7.5 + 1e-9,
        "geodesic roundtrip error {max_geodesic} exceeds the bin diagonal bound"
    );
}

#[test]
fn gimbal_adjacent_rotations_use_canonical_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for i in 0..200 {
        let pitch = if i % 2 == 0 { 90.0 } else { -90.0 };
        let eps = rng.gen_range(-1e-7..1e-7);
        let q = Quat::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), rng.gen_range(-3.0..3.0))
            .mul(&Quat::from_axis_angle(
                Vec3::new(0.0, 1.0, 0.0),
                (pitch + eps) * DEG,
            ))
            .mul(&Quat::from_axis_angle(
                Vec3::new(0.0, 0.0, 1.0),
                rng.gen_range(-3.0..3.0),
            ));
        let dec = euler_decode(&euler_encode(&q));
        let err = q.angle_to(&dec).to_degrees();
        assert!(err <= 7.5 + 1e-6, "gimbal roundtrip error {err}");
    }
}

#[test]
fn decode_rejects_out_of_range_bins() {
    assert!(std::panic::catch_unwind(|| EulerBins::new([72, 0, 0])).is_err());
}
