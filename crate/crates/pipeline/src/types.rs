use inhand_geometry::Pose;
use inhand_render::PointCloud;

use crate::keypose::extract_keyposes;
use crate::PipelineError;

/// One keypose action: the absolute gripper target plus its discrete flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub pose: Pose,
    pub gripper_open: bool,
    /// Whether the motion toward this keypose is allowed to touch the scene.
    pub collide: bool,
}

/// One observation along a trajectory. The cloud is the full scene as seen at
/// that instant; `timestep` is normalized progress in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub cloud: PointCloud,
    pub pose: Pose,
    pub gripper_open: bool,
    pub timestep: f64,
}

/// A language-conditioned demonstration: dense frames, the keypose frame
/// indices, and the action each keypose corresponds to.
#[derive(Debug, Clone)]
pub struct Demonstration {
    pub instruction: String,
    pub frames: Vec<Frame>,
    pub keyposes: Vec<usize>,
    pub actions: Vec<Action>,
    pub v_eps: f64,
}

impl Demonstration {
    /// Structural integrity checks, including re-running the keypose detector
    /// so stored labels cannot drift from what the frames actually contain.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: String| Err(PipelineError::Validation(msg));
        if self.instruction.is_empty() {
            return fail("empty instruction".into());
        }
        if !(self.v_eps.is_finite() && self.v_eps > 0.0) {
            return fail(format!("v_eps {} must be positive", self.v_eps));
        }
        let m = self.frames.len();
        if m < 2 {
            return fail(format!("{m} frames; need at least 2"));
        }
        for (i, f) in self.frames.iter().enumerate() {
            if !f.pose.is_finite() {
                return fail(format!("frame {i} pose is not finite"));
            }
            if !(0.0..=1.0).contains(&f.timestep) {
                return fail(format!("frame {i} timestep {} outside [0, 1]", f.timestep));
            }
        }
        for w in 0..m - 1 {
            if self.frames[w].timestep >= self.frames[w + 1].timestep {
                return fail(format!("timesteps not strictly increasing at frame {w}"));
            }
        }
        if self.keyposes.len() != self.actions.len() {
            return fail(format!(
                "{} keypose labels for {} actions",
                self.keyposes.len(),
                self.actions.len()
            ));
        }
        let detected = extract_keyposes(&self.frames, self.v_eps)?;
        if detected != self.keyposes {
            return fail(format!(
                "stored keyposes {:?} disagree with detected {detected:?}",
                self.keyposes
            ));
        }
        for (j, (&k, a)) in self.keyposes.iter().zip(&self.actions).enumerate() {
            let f = &self.frames[k];
            if f.pose.translation != a.pose.translation || f.gripper_open != a.gripper_open {
                return fail(format!("action {j} does not match its keypose frame {k}"));
            }
        }
        Ok(())
    }
}
