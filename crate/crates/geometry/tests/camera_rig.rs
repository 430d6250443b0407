//! Orthographic camera and rig construction tests: projection boundaries,
//! unproject roundtrip, equivariance, the exact zoom schedule, and the
//! out-of-workspace clamp/reject policy.

use inhand_geometry::{
    camera_rig_from_action, Aabb, Pose, Quat, RigConfig, Vec3, VIEW_NAMES,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn workspace() -> Aabb {
    Aabb::new(Vec3::new(-0.5, -0.5, 0.0), Vec3::new(0.5, 0.5, 1.0))
}

fn cfg(res: usize) -> RigConfig {
    RigConfig::for_workspace(&workspace(), res)
}

#[test]
fn rig_center_projects_to_image_center() {
    let rig = camera_rig_from_action(&Pose::IDENTITY, 0, &workspace(), &cfg(110)).unwrap();
    let center = workspace().center();
    for cam in &rig.cameras {
        let (u, v, depth) = cam.projector().project(center);
        assert!((u - 55.0).abs() < 1e-9 && (v - 55.0).abs() < 1e-9);
        assert!((depth - cfg(110).camera_distance).abs() < 1e-9);
    }
}

#[test]
fn half_extent_displacement_reaches_the_image_edge() {
    let rig = camera_rig_from_action(&Pose::IDENTITY, 0, &workspace(), &cfg(110)).unwrap();
    let cam = &rig.cameras[0];
    let proj = cam.projector();
    // Displace along the camera x axis; exactly half_extent is the exclusive
    // right edge, a hair less lands inside the last pixel column.
    let x_axis = cam.pose.rotation.rotate(Vec3::new(1.0, 0.0, 0.0));
    let (u, _, _) = proj.project(cam.anchor + x_axis * cam.half_extent);
    assert!((u - 110.0).abs() < 1e-9, "u = {u}");
    let (u, _, _) = proj.project(cam.anchor + x_axis * (cam.half_extent * (1.0 - 1e-9)));
    assert!(u < 110.0 && u > 109.0);
    // Out-of-frustum points land outside [0, resolution).
    let (u, _, _) = proj.project(cam.anchor + x_axis * (cam.half_extent * 1.5));
    assert!(u >= 110.0);
}

#[test]
fn unproject_project_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let rig = camera_rig_from_action(&Pose::IDENTITY, 0, &workspace(), &cfg(64)).unwrap();
    for cam in &rig.cameras {
        let proj = cam.projector();
        for _ in 0..200 {
            let p = Vec3::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(0.0..1.0),
            );
            let (u, v, d) = proj.project(p);
            let back = proj.unproject(u, v, d);
            assert!((back - p).norm() < 1e-6, "{back:?} vs {p:?}");
        }
    }
}

#[test]
fn rig_rotates_with_the_action_pose() {
    let ws = workspace();
    let config = cfg(64);
    let yaw = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 90f64.to_radians());
    let base = Pose::new(Vec3::new(0.1, -0.05, 0.4), Quat::IDENTITY);
    let rotated = Pose::new(base.translation, yaw);
    let rig_a = camera_rig_from_action(&base, 1, &ws, &config).unwrap();
    let rig_b = camera_rig_from_action(&rotated, 1, &ws, &config).unwrap();
    for (ca, cb) in rig_a.cameras.iter().zip(rig_b.cameras.iter()) {
        // Camera axes of the rotated rig are the yaw images of the base axes.
        for axis in [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)] {
            let a = yaw.rotate(ca.pose.rotation.rotate(axis));
            let b = cb.pose.rotation.rotate(axis);
            assert!((a - b).norm() < 1e-9);
        }
        let rel_a = ca.pose.translation - base.translation;
        let rel_b = cb.pose.translation - base.translation;
        assert!((yaw.rotate(rel_a) - rel_b).norm() < 1e-9);
    }
}

#[test]
fn zoom_schedule_is_exact_powers_of_two() {
    let ws = workspace();
    let config = cfg(64);
    let pose = Pose::new(Vec3::new(0.0, 0.0, 0.5), Quat::IDENTITY);
    let he0 = camera_rig_from_action(&pose, 0, &ws, &config)
        .unwrap()
        .half_extent;
    assert_eq!(he0, ws.half_extent());
    for stage in 1..=4 {
        let rig = camera_rig_from_action(&pose, stage, &ws, &config).unwrap();
        // Exact in floating point, not approximately equal.
        assert_eq!(rig.half_extent, he0 * 0.5f64.powi(stage as i32));
    }
}

#[test]
fn zoom_disabled_keeps_full_extent() {
    let ws = workspace();
    let mut config = cfg(64);
    config.zoom_enabled = false;
    let pose = Pose::new(Vec3::new(0.0, 0.0, 0.5), Quat::IDENTITY);
    let rig = camera_rig_from_action(&pose, 2, &ws, &config).unwrap();
    assert_eq!(rig.half_extent, ws.half_extent());
}

#[test]
fn stage0_ignores_the_action_pose() {
    let ws = workspace();
    let config = cfg(64);
    let a = camera_rig_from_action(&Pose::IDENTITY, 0, &ws, &config).unwrap();
    let wild = Pose::new(
        Vec3::new(0.3, 0.2, 0.9),
        Quat::from_axis_angle(Vec3::new(1.0, 1.0, 0.0).normalized(), 1.0),
    );
    let b = camera_rig_from_action(&wild, 0, &ws, &config).unwrap();
    for (ca, cb) in a.cameras.iter().zip(b.cameras.iter()) {
        assert_eq!(ca.pose.to_le_bytes(), cb.pose.to_le_bytes());
    }
}

#[test]
fn fixed_rotation_flag_drops_the_rotation() {
    let ws = workspace();
    let mut config = cfg(64);
    config.fixed_rotation = true;
    let posed = Pose::new(
        Vec3::new(0.1, 0.1, 0.5),
        Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 1.2),
    );
    let rig = camera_rig_from_action(&posed, 1, &ws, &config).unwrap();
    let plain = camera_rig_from_action(
        &Pose::new(posed.translation, Quat::IDENTITY),
        1,
        &ws,
        &config,
    )
    .unwrap();
    for (a, b) in rig.cameras.iter().zip(plain.cameras.iter()) {
        assert_eq!(a.pose.to_le_bytes(), b.pose.to_le_bytes());
    }
}

#[test]
fn out_of_workspace_clamps_then_rejects() {
    let ws = workspace();
    let config = cfg(64);
    // Just past the box but inside the 25% inflation: clamped, flagged.
    let near_edge = Pose::new(Vec3::new(0.58, 0.0, 0.5), Quat::IDENTITY);
    let rig = camera_rig_from_action(&near_edge, 1, &ws, &config).unwrap();
    assert!(rig.clamped);
    assert!((rig.anchor_pose.translation - Vec3::new(0.5, 0.0, 0.5)).norm() < 1e-12);
    // Beyond the inflated bound: diverged prediction, hard error.
    let far_out = Pose::new(Vec3::new(0.7, 0.0, 0.5), Quat::IDENTITY);
    assert!(camera_rig_from_action(&far_out, 1, &ws, &config).is_err());
    // Inside the box: untouched.
    let inside = Pose::new(Vec3::new(0.2, -0.1, 0.4), Quat::IDENTITY);
    let rig = camera_rig_from_action(&inside, 1, &ws, &config).unwrap();
    assert!(!rig.clamped);
}

#[test]
fn view_directions_form_the_axis_pattern() {
    let rig = camera_rig_from_action(&Pose::IDENTITY, 0, &workspace(), &cfg(64)).unwrap();
    let expected = [
        ("top", Vec3::new(0.0, 0.0, -1.0)),
        ("front", Vec3::new(0.0, 1.0, 0.0)),
        ("back", Vec3::new(0.0, -1.0, 0.0)),
        ("left", Vec3::new(1.0, 0.0, 0.0)),
        ("right", Vec3::new(-1.0, 0.0, 0.0)),
    ];
    for (i, (name, dir)) in expected.iter().enumerate() {
        assert_eq!(VIEW_NAMES[i], *name);
        let fwd = rig.cameras[i].pose.rotation.rotate(Vec3::new(0.0, 0.0, 1.0));
        assert!((fwd - *dir).norm() < 1e-12, "{name}: {fwd:?}");
        // Cameras look inward: anchor sits ahead of the camera.
        let to_anchor = rig.cameras[i].anchor - rig.cameras[i].pose.translation;
        assert!(to_anchor.dot(fwd) > 0.0);
    }
}

#[test]
fn look_outward_flag_flips_the_rig_inside_out() {
    let mut config = cfg(64);
    config.look_outward = true;
    let rig = camera_rig_from_action(&Pose::IDENTITY, 0, &workspace(), &config).unwrap();
    for cam in &rig.cameras {
        assert!((cam.pose.translation - cam.anchor).norm() < 1e-12);
    }
    let fwd = rig.cameras[0].pose.rotation.rotate(Vec3::new(0.0, 0.0, 1.0));
    assert!((fwd - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
}

#[test]
fn camera_constructor_validates_planes() {
    let bad = inhand_geometry::VirtualCamera::new(
        Pose::IDENTITY,
        Vec3::ZERO,
        0.5,
        1.0,
        0.5,
        64,
    );
    assert!(bad.is_err());
    let bad = inhand_geometry::VirtualCamera::new(Pose::IDENTITY, Vec3::ZERO, -0.5, 0.0, 1.0, 64);
    assert!(bad.is_err());
}
