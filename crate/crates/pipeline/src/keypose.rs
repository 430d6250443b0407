use crate::{Frame, PipelineError};

/// Finds the keypose frames of a dense trajectory: frames where the gripper
/// state flips, frames where the end-effector pauses between moving
/// neighbors, and always the final frame.
///
/// "Pauses" compares per-frame speeds against `v_eps`: frame `t` qualifies
/// when its own step is slower than `v_eps` while the steps on both sides are
/// not (the left-hand condition is waived at `t = 1`, where no earlier step
/// exists). This rejects the slow ramp-in/ramp-out frames of an eased segment
/// while catching deliberate dwells.
pub fn extract_keyposes(frames: &[Frame], v_eps: f64) -> Result<Vec<usize>, PipelineError> {
    let m = frames.len();
    if m < 2 {
        return Err(PipelineError::Validation(format!(
            "keypose extraction needs at least 2 frames, got {m}"
        )));
    }
    if !(v_eps.is_finite() && v_eps > 0.0) {
        return Err(PipelineError::Validation(format!(
            "v_eps {v_eps} must be positive"
        )));
    }

    // speed[t] is the step length arriving at frame t (t >= 1).
    let speed: Vec<f64> = (1..m)
        .map(|t| (frames[t].pose.translation - frames[t - 1].pose.translation).norm())
        .collect();
    let step = |t: usize| speed[t - 1];

    let mut keys = Vec::new();
    for t in 1..m {
        if frames[t].gripper_open != frames[t - 1].gripper_open {
            keys.push(t);
        }
    }
    for t in 1..=m.saturating_sub(2) {
        let slow = step(t) < v_eps;
        let left_moving = t == 1 || step(t - 1) >= v_eps;
        let right_moving = step(t + 1) >= v_eps;
        if slow && left_moving && right_moving {
            keys.push(t);
        }
    }
    keys.push(m - 1);
    keys.sort_unstable();
    keys.dedup();
    Ok(keys)
}
