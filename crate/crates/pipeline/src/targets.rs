use inhand_geometry::euler_encode;

use crate::{Action, PipelineError, StageContext};

/// Supervision for one stage: per-view translation heatmaps (row-major,
/// concatenated view by view), Euler bin indices, and the two flags.
#[derive(Debug, Clone)]
pub struct StageTargets {
    pub heatmaps: Vec<f32>,
    pub rotation_bins: [usize; 3],
    pub open: bool,
    pub collide: bool,
}

#[derive(Debug, Clone)]
pub struct TargetSet {
    pub stages: Vec<StageTargets>,
}

/// Builds the training targets for `gt` under each stage context.
///
/// Heatmaps are truncated Gaussians around the ground-truth projection:
/// weight `exp(-d^2 / 2 sigma^2)` for pixel centers within `3 sigma`,
/// normalized to sum to one. `sigma_px <= 0` degenerates to a one-hot at the
/// projected pixel. Rotation targets are absolute Euler bins at stage 0 and
/// bins of `R_base^-1 * R_gt` afterwards, matching how the decoder composes
/// a bin prediction onto the base pose.
pub fn make_targets(
    gt: &Action,
    contexts: &[StageContext],
    sigma_px: f64,
) -> Result<TargetSet, PipelineError> {
    let mut stages = Vec::with_capacity(contexts.len());
    for ctx in contexts {
        let res = ctx.rig.cameras[0].resolution;
        let mut heatmaps = Vec::with_capacity(ctx.rig.cameras.len() * res * res);
        for (view, cam) in ctx.rig.cameras.iter().enumerate() {
            let projector = cam.projector();
            let (u, v, depth) = projector.project(gt.pose.translation);
            let in_image =
                (0.0..res as f64).contains(&u) && (0.0..res as f64).contains(&v);
            if !(in_image && projector.depth_in_range(depth)) {
                return Err(PipelineError::GtOutsideFrustum {
                    stage: ctx.rig.stage,
                    view,
                });
            }
            heatmaps.extend(pixel_weights(u, v, res, sigma_px));
        }

        let rotation = if ctx.rig.stage == 0 {
            gt.pose.rotation
        } else {
            ctx.base_pose.rotation.conjugate().mul(&gt.pose.rotation)
        };
        stages.push(StageTargets {
            heatmaps,
            rotation_bins: euler_encode(&rotation).bins,
            open: gt.gripper_open,
            collide: gt.collide,
        });
    }
    Ok(TargetSet { stages })
}

/// One view's normalized heatmap for a projection at continuous pixel
/// coordinates `(u, v)`, both already inside `[0, res)`.
fn pixel_weights(u: f64, v: f64, res: usize, sigma: f64) -> Vec<f32> {
    let one_hot = |res: usize| {
        let mut hm = vec![0.0f32; res * res];
        hm[v as usize * res + u as usize] = 1.0;
        hm
    };
    if sigma <= 0.0 {
        return one_hot(res);
    }

    let cutoff = (3.0 * sigma) * (3.0 * sigma);
    let mut weights = vec![0.0f64; res * res];
    let mut total = 0.0f64;
    for iy in 0..res {
        for ix in 0..res {
            let dx = ix as f64 + 0.5 - u;
            let dy = iy as f64 + 0.5 - v;
            let d2 = dx * dx + dy * dy;
            if d2 <= cutoff {
                let w = (-d2 / (2.0 * sigma * sigma)).exp();
                weights[iy * res + ix] = w;
                total += w;
            }
        }
    }
    if total == 0.0 {
        // A sub-pixel sigma can truncate away every pixel center; fall back
        // to the pixel containing the projection.
        return one_hot(res);
    }
    weights.iter().map(|w| (w / total) as f32).collect()
}
