//! The stage attention mask and the 3-axis rotary embedding angles.

use inhand_autodiff::Tensor;
use inhand_geometry::Vec3;
use inhand_model::{position_theta, stage_mask, MASK_BLOCK};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn mask_allows_same_and_earlier_stages_only() {
    // Tokens: two context (stage 0 by definition), one of each image stage.
    let stages = [0, 0, 0, 1, 2];
    let mask: Tensor<f32> = stage_mask(&stages, 2, true);
    assert_eq!(mask.shape(), (5, 5));
    let m = mask.data();
    for q in 0..5 {
        for k in 0..5 {
            let open = stages[k] <= stages[q];
            let got = m[q * 5 + k];
            if open {
                assert_eq!(got, 0.0, "mask[{q},{k}] should be open");
            } else {
                assert_eq!(got, MASK_BLOCK as f32, "mask[{q},{k}] should block");
            }
        }
    }
}

#[test]
fn no_cross_stage_variant_keeps_context_visible() {
    let stages = [0, 0, 0, 1, 2];
    let mask: Tensor<f32> = stage_mask(&stages, 2, false);
    let m = mask.data();
    for q in 0..5 {
        for k in 0..5 {
            let open = k < 2 || stages[k] == stages[q];
            assert_eq!(
                m[q * 5 + k] == 0.0,
                open,
                "ablation mask[{q},{k}] wrong"
            );
        }
    }
}

#[test]
fn blocked_entries_vanish_under_softmax() {
    // The mask constant must drive a softmax probability to exactly zero in
    // f32 even after the attention scaling.
    let scale = 1.0 / (32.0f64).sqrt();
    let logits = Tensor::from_vec(
        1,
        3,
        vec![
            (1.3 + MASK_BLOCK * scale) as f32,
            (0.2) as f32,
            (-0.7) as f32,
        ],
    );
    let p = logits.softmax_rows().data();
    assert_eq!(p[0], 0.0);
    assert!((p[1] + p[2] - 1.0).abs() < 1e-6);
}

#[test]
fn theta_length_and_axis_blocks() {
    let pairs = 16;
    let t = position_theta(Vec3::new(0.3, -0.2, 0.7), pairs);
    assert_eq!(t.len(), pairs);
    // All angles already reduced to [0, 2pi).
    for &a in &t {
        assert!((0.0..std::f64::consts::TAU).contains(&a), "angle {a}");
    }

    // Moving along x changes only pairs assigned to the x axis (j % 3 == 0).
    let base = position_theta(Vec3::new(0.1, 0.2, 0.3), pairs);
    let moved = position_theta(Vec3::new(0.25, 0.2, 0.3), pairs);
    for j in 0..pairs {
        if j % 3 == 0 {
            assert_ne!(base[j], moved[j], "x-axis pair {j} should move");
        } else {
            assert_eq!(base[j], moved[j], "pair {j} must ignore x");
        }
    }
}

#[test]
fn rope_attention_logits_are_translation_invariant() {
    // Two tokens at positions p and q: rotating q/k rows by their position
    // angles makes the attention logit depend only on p - q. A common shift
    // of both positions must not change the logit (within f32 roundoff).
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dh = 32usize;
    let pairs = dh / 2;

    for trial in 0..100 {
        let qrow: Vec<f32> = (0..dh).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
        let krow: Vec<f32> = (0..dh).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
        let p = Vec3::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(0.0..1.0),
        );
        let q = Vec3::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(0.0..1.0),
        );
        let shift = Vec3::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );

        let logit = |pp: Vec3, pq: Vec3| -> f32 {
            let tq: Vec<f32> = position_theta(pp, pairs).iter().map(|&a| a as f32).collect();
            let tk: Vec<f32> = position_theta(pq, pairs).iter().map(|&a| a as f32).collect();
            let qt = Tensor::from_vec(1, dh, qrow.clone()).rope(&Tensor::from_vec(1, pairs, tq));
            let kt = Tensor::from_vec(1, dh, krow.clone()).rope(&Tensor::from_vec(1, pairs, tk));
            qt.matmul_tb(&kt).value()
        };

        let a = logit(p, q);
        let b = logit(p + shift, q + shift);
        assert!(
            (a - b).abs() < 1e-4,
            "trial {trial}: logit {a} vs shifted {b}"
        );
    }
}

#[test]
fn rope_distinguishes_relative_displacements()  {
    // Sanity: different relative offsets give different logits (the
    // embedding is not degenerate).
    let dh = 32;
    let pairs = dh / 2;
    let qrow = vec![0.5f32; dh];
    let krow = vec![0.5f32; dh];
    let logit = |pp: Vec3, pq: Vec3| -> f32 {
        let tq: Vec<f32> = position_theta(pp, pairs).iter().map(|&a| a as f32).collect();
        let tk: Vec<f32> = position_theta(pq, pairs).iter().map(|&a| a as f32).collect();
        let qt = Tensor::from_vec(1, dh, qrow.clone()).rope(&Tensor::from_vec(1, pairs, tq));
        let kt = Tensor::from_vec(1, dh, krow.clone()).rope(&Tensor::from_vec(1, pairs, tk));
        qt.matmul_tb(&kt).value()
    };
    let origin = Vec3::ZERO;
    let near = logit(origin, Vec3::new(0.05, 0.0, 0.0));
    let far = logit(origin, Vec3::new(0.4, 0.0, 0.0));
    assert!((near - far).abs() > 1e-4);
}
