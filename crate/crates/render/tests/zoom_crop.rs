//! Zoom consistency: because every stage keeps the same camera distance and
//! the stage-i half-extent is exactly half the previous one, a stage-1 render
//! must reproduce the center crop of a stage-0 render at doubled resolution —
//! same winners, same colors, same raw depths, bit for bit.

use inhand_geometry::{camera_rig_from_action, Aabb, Pose, RigConfig, Vec3};
use inhand_render::{render_stage, PointCloud};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn stage1_equals_center_crop_of_double_resolution_stage0() {
    // Origin-centered workspace so the stage-1 anchor (identity pose) sits
    // exactly at the stage-0 anchor and the two rigs share camera poses.
    let ws = Aabb::new(Vec3::new(-0.5, -0.5, -0.5), Vec3::new(0.5, 0.5, 0.5));
    let coarse_cfg = RigConfig::for_workspace(&ws, 128);
    let fine_cfg = RigConfig::for_workspace(&ws, 64);

    let rig0 = camera_rig_from_action(&Pose::IDENTITY, 0, &ws, &coarse_cfg).unwrap();
    let rig1 = camera_rig_from_action(&Pose::IDENTITY, 1, &ws, &fine_cfg).unwrap();
    assert_eq!(rig1.half_extent, 0.25);

    // Points confined to the stage-1 cube (with margin) so nothing is culled
    // by either rig's clip planes and every splat disc stays inside the crop.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let positions: Vec<Vec3> = (0..1500)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-0.23..0.23),
                rng.gen_range(-0.23..0.23),
                rng.gen_range(-0.23..0.23),
            )
        })
        .collect();
    let colors: Vec<[f32; 3]> = (0..positions.len())
        .map(|_| [rng.gen::<f32>(), rng.gen::<f32>(), rng.gen::<f32>()])
        .collect();
    let cloud = PointCloud::new(positions, colors).unwrap();

    let coarse = render_stage(&cloud, &rig0, 1);
    let fine = render_stage(&cloud, &rig1, 1);

    for vi in 0..5 {
        let big = coarse.view(vi);
        let small = fine.view(vi);
        let mut hits = 0usize;
        for row in 0..64usize {
            for col in 0..64usize {
                let s = small.pixel_index(row, col);
                let b = big.pixel_index(row + 32, col + 32);
                assert_eq!(small.hit[s], big.hit[b], "view {vi} hit ({row},{col})");
                if !small.hit[s] {
                    continue;
                }
                hits += 1;
                assert_eq!(
                    small.depth_raw[s].to_bits(),
                    big.depth_raw[b].to_bits(),
                    "view {vi} raw depth ({row},{col})"
                );
                for ch in 0..3 {
                    assert_eq!(
                        small.rgb[s * 3 + ch].to_bits(),
                        big.rgb[b * 3 + ch].to_bits(),
                        "view {vi} rgb ({row},{col})"
                    );
                    assert_eq!(
                        small.world_xyz[s * 3 + ch].to_bits(),
                        big.world_xyz[b * 3 + ch].to_bits(),
                        "view {vi} xyz ({row},{col})"
                    );
                }
            }
        }
        assert!(hits > 200, "view {vi}: crop comparison barely exercised ({hits} hits)");
    }
}

#[test]
fn disabling_zoom_keeps_the_full_extent_view() {
    let ws = Aabb::new(Vec3::new(-0.5, -0.5, 0.0), Vec3::new(0.5, 0.5, 1.0));
    let mut cfg = RigConfig::for_workspace(&ws, 48);
    cfg.zoom_enabled = false;
    let pose = Pose::new(Vec3::new(0.2, 0.1, 0.6), inhand_geometry::Quat::IDENTITY);
    let rig2 = camera_rig_from_action(&pose, 2, &ws, &cfg).unwrap();
    assert_eq!(rig2.half_extent, ws.half_extent());

    // A point within the full-extent cube around the anchor, but far outside
    // the stage-2 zoom cube (|offset| up to 0.4 vs half-extent 0.125).
    let point = pose.translation + Vec3::new(-0.4, -0.35, -0.4);
    let cloud = PointCloud::with_uniform_color(vec![point], [1.0, 1.0, 1.0]).unwrap();
    let stage = render_stage(&cloud, &rig2, 0);
    let visible = stage.views.iter().map(|v| v.hit_count()).sum::<usize>();
    assert_eq!(visible, 5, "no-zoom rig must see the whole workspace cube");

    // With zoom on, the same stage-2 rig crops the point away entirely.
    let zoomed_cfg = RigConfig::for_workspace(&ws, 48);
    let zoomed = camera_rig_from_action(&pose, 2, &ws, &zoomed_cfg).unwrap();
    assert_eq!(zoomed.half_extent, 0.125);
    let cropped = render_stage(&cloud, &zoomed, 0);
    let visible = cropped.views.iter().map(|v| v.hit_count()).sum::<usize>();
    assert_eq!(visible, 0, "zoomed rig must crop distant points away");
}
