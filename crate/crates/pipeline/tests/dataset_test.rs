mod common;

use common::{home_pose, table_scene};
use inhand_geometry::{Pose, Quat, Vec3};
use inhand_pipeline::{
    load_demonstration, save_demonstration, synthesize_trajectory, Action, Demonstration,
};

const V_EPS: f64 = 1e-3;

fn sample_demo() -> Demonstration {
    let target = Vec3::new(0.15, -0.2, 0.035);
    let cloud = table_scene(target, 0.035, [0.9, 0.1, 0.1]);
    let actions = vec![
        Action {
            pose: Pose::new(target + Vec3::new(0.0, 0.0, 0.12), Quat::IDENTITY),
            gripper_open: true,
            collide: true,
        },
        Action {
            pose: Pose::new(target, Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 0.3)),
            gripper_open: false,
            collide: false,
        },
    ];
    let (frames, keyposes) = synthesize_trajectory(&cloud, &home_pose(), true, &actions, V_EPS);
    Demonstration {
        instruction: "reach the red sphere".to_string(),
        frames,
        keyposes,
        actions,
        v_eps: V_EPS,
    }
}

fn read_dir_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn save_load_roundtrip_is_lossless() {
    let demo = sample_demo();
    demo.validate().unwrap();

    let dir = tempfile::tempdir().unwrap();
    save_demonstration(dir.path(), &demo).unwrap();
    let back = load_demonstration(dir.path()).unwrap();

    assert_eq!(back.instruction, demo.instruction);
    assert_eq!(back.v_eps, demo.v_eps);
    assert_eq!(back.keyposes, demo.keyposes);
    assert_eq!(back.actions.len(), demo.actions.len());
    for (a, b) in back.actions.iter().zip(&demo.actions) {
        assert_eq!(a.pose.to_array7(), b.pose.to_array7());
        assert_eq!(a.gripper_open, b.gripper_open);
        assert_eq!(a.collide, b.collide);
    }
    assert_eq!(back.frames.len(), demo.frames.len());
    for (a, b) in back.frames.iter().zip(&demo.frames) {
        assert_eq!(a.pose.to_array7(), b.pose.to_array7());
        assert_eq!(a.gripper_open, b.gripper_open);
        assert_eq!(a.timestep.to_bits(), b.timestep.to_bits());
        assert_eq!(a.cloud.len(), b.cloud.len());
        for (p, q) in a.cloud.positions().iter().zip(b.cloud.positions()) {
            assert_eq!((p.x.to_bits(), p.y.to_bits(), p.z.to_bits()), (q.x.to_bits(), q.y.to_bits(), q.z.to_bits()));
        }
        for (p, q) in a.cloud.colors().iter().zip(b.cloud.colors()) {
            assert_eq!(p.map(f32::to_bits), q.map(f32::to_bits));
        }
    }
}

#[test]
fn saving_twice_is_byte_identical() {
    let demo = sample_demo();
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    save_demonstration(d1.path(), &demo).unwrap();
    save_demonstration(d2.path(), &demo).unwrap();
    assert_eq!(read_dir_bytes(d1.path()), read_dir_bytes(d2.path()));
}

#[test]
fn loader_rejects_tampered_keypose_labels() {
    let demo = sample_demo();
    let dir = tempfile::tempdir().unwrap();
    save_demonstration(dir.path(), &demo).unwrap();

    let meta_path = dir.path().join("meta.json");
    let mut meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&meta_path).unwrap()).unwrap();
    meta["keyposes"] = serde_json::json!([0]);
    std::fs::write(&meta_path, serde_json::to_string(&meta).unwrap()).unwrap();

    assert!(load_demonstration(dir.path()).is_err());
}

#[test]
fn loader_rejects_missing_frames() {
    let demo = sample_demo();
    let dir = tempfile::tempdir().unwrap();
    save_demonstration(dir.path(), &demo).unwrap();
    std::fs::remove_file(dir.path().join("frame_0000.ply")).unwrap();
    assert!(load_demonstration(dir.path()).is_err());
}

#[test]
fn loader_rejects_corrupt_clouds() {
    let demo = sample_demo();
    let dir = tempfile::tempdir().unwrap();
    save_demonstration(dir.path(), &demo).unwrap();
    std::fs::write(dir.path().join("frame_0000.ply"), b"not a ply file").unwrap();
    assert!(load_demonstration(dir.path()).is_err());
}

#[test]
fn validation_rejects_unordered_timesteps() {
    let mut demo = sample_demo();
    let n = demo.frames.len();
    demo.frames[n - 2].timestep = 2.0;
    assert!(demo.validate().is_err());
}

#[test]
fn validation_rejects_action_count_mismatch() {
    let mut demo = sample_demo();
    demo.actions.pop();
    assert!(demo.validate().is_err());
}
