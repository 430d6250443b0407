use inhand_geometry::Pose;
use inhand_render::PointCloud;

use crate::{Action, Frame};

/// Quintic smootherstep: zero velocity and acceleration at both ends.
fn ease(u: f64) -> f64 {
    u * u * u * (u * (6.0 * u - 15.0) + 10.0)
}

/// Synthesizes a dense trajectory through `actions` and returns the frames
/// together with the keypose index of each action.
///
/// Each segment is an eased straight line (quintic in position, slerp in
/// rotation) followed by one dwell frame that repeats the endpoint exactly;
/// the dwell is the labeled keypose, and the gripper flag switches there. The
/// frame count per segment is the largest in 2..=8 whose slowest eased step
/// still clears `2 * v_eps`, so the detector's speed test has margin on both
/// sides of every dwell.
///
/// The scene cloud is static: observations do not re-render object motion.
/// Consecutive poses must be at least `4 * v_eps` apart for the labels to be
/// recoverable; the synthetic tasks keep keyposes centimeters apart.
pub fn synthesize_trajectory(
    cloud: &PointCloud,
    start: &Pose,
    start_open: bool,
    actions: &[Action],
    v_eps: f64,
) -> (Vec<Frame>, Vec<usize>) {
    assert!(!actions.is_empty(), "cannot synthesize an empty trajectory");
    assert!(v_eps > 0.0, "v_eps must be positive");

    let frame = |pose: Pose, open: bool| Frame {
        cloud: cloud.clone(),
        pose,
        gripper_open: open,
        timestep: 0.0,
    };

    let mut frames = vec![frame(*start, start_open)];
    let mut labels = Vec::with_capacity(actions.len());
    let mut prev = *start;
    let mut open = start_open;

    for action in actions {
        let delta = action.pose.translation - prev.translation;
        let len = delta.norm();
        assert!(
            len >= 4.0 * v_eps,
            "keypose step {len} too short to label at v_eps {v_eps}"
        );
        let steps = (2..=8usize)
            .rev()
            .find(|&f| len * ease(1.0 / f as f64) >= 2.0 * v_eps)
            .expect("a two-frame segment always clears the speed threshold");
        for i in 1..=steps {
            let s = ease(i as f64 / steps as f64);
            let pose = Pose::new(
                prev.translation + delta * s,
                prev.rotation.slerp(&action.pose.rotation, s),
            );
            frames.push(frame(pose, open));
        }
        // Dwell: an exact copy of the endpoint marks the keypose, and the
        // gripper switches state here.
        open = action.gripper_open;
        frames.push(frame(action.pose, open));
        labels.push(frames.len() - 1);
        prev = action.pose;
    }

    let m = frames.len();
    for (i, f) in frames.iter_mut().enumerate() {
        f.timestep = i as f64 / (m - 1) as f64;
    }
    (frames, labels)
}
