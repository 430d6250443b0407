use inhand_autodiff::Tensor;
use inhand_geometry::{euler_decode, CameraRig, EulerBins, Pose, Vec3};

use crate::error::ModelError;
use crate::model::StageOutput;

/// An action read off the network heads, together with the refinement that
/// produced it: `pose = refinement ∘ previous`.
#[derive(Debug, Clone)]
pub struct DecodedAction {
    /// Absolute world target after this stage.
    pub pose: Pose,
    /// The SE(3) increment applied after the previous action.
    pub refinement: Pose,
    pub gripper_open: bool,
    pub collide: bool,
}

/// `n^3` world-space points filling the rig cube, spaced at the pixel pitch
/// (`2·half_extent / n`). The lattice lives in the rig's anchor frame, so it
/// rotates with an in-hand rig. Index order: x-major, then y, then z; the
/// first point is the minimum-corner cell center.
pub fn candidate_grid(rig: &CameraRig, n: usize) -> Vec<Vec3> {
    let he = rig.half_extent;
    let pitch = 2.0 * he / n as f64;
    let coord = |i: usize| (i as f64 + 0.5) * pitch - he;
    let mut out = Vec::with_capacity(n * n * n);
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let local = Vec3::new(coord(ix), coord(iy), coord(iz));
                out.push(rig.anchor_pose.transform_point(local));
            }
        }
    }
    out
}

/// Bilinear heatmap sample at continuous pixel coordinates, clamped to the
/// edge. Pixel centers sit at integer positions `u - 0.5`. The lerp form is
/// deliberate: it reproduces constant maps exactly, so uniform heatmaps
/// score every candidate identically and the tie-break below stays honest.
fn sample_bilinear(map: &[f32], res: usize, u: f64, v: f64) -> f64 {
    let x = u - 0.5;
    let y = v - 0.5;
    let x0 = x.floor().clamp(0.0, (res - 1) as f64);
    let y0 = y.floor().clamp(0.0, (res - 1) as f64);
    let fx = (x - x0).clamp(0.0, 1.0);
    let fy = (y - y0).clamp(0.0, 1.0);
    let (x0, y0) = (x0 as usize, y0 as usize);
    let x1 = (x0 + 1).min(res - 1);
    let y1 = (y0 + 1).min(res - 1);
    let m = |r: usize, c: usize| map[r * res + c] as f64;
    let top = m(y0, x0) + fx * (m(y0, x1) - m(y0, x0));
    let bot = m(y1, x0) + fx * (m(y1, x1) - m(y1, x0));
    top + fy * (bot - top)
}

/// Scores every candidate as the sum over views of the bilinear heatmap
/// response at its projection, and returns the best one. Ties resolve to the
/// earliest candidate (strict greater-than), making the result deterministic
/// for flat maps.
pub fn decode_translation(
    heatmaps: &Tensor<f32>,
    rig: &CameraRig,
    candidates: &[Vec3],
) -> Result<Vec3, ModelError> {
    if candidates.is_empty() {
        return Err(ModelError::EmptyCandidates);
    }
    let res = rig.cameras[0].resolution;
    let views = rig.cameras.len();
    if heatmaps.shape() != (views, res * res) {
        return Err(ModelError::Input(format!(
            "heatmaps are {:?}, rig wants {}x{}",
            heatmaps.shape(),
            views,
            res * res
        )));
    }
    let projectors: Vec<_> = rig.cameras.iter().map(|c| c.projector()).collect();

    heatmaps.with_data(|maps| {
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0usize;
        for (i, &p) in candidates.iter().enumerate() {
            let mut score = 0.0f64;
            for (v, proj) in projectors.iter().enumerate() {
                let (u, w, _) = proj.project(p);
                score += sample_bilinear(&maps[v * res * res..(v + 1) * res * res], res, u, w);
            }
            if score > best {
                best = score;
                best_idx = i;
            }
        }
        Ok(candidates[best_idx])
    })
}

/// Argmax per logit row with ties resolved to the lowest bin.
fn argmax_bins(rotation_logits: &Tensor<f32>) -> [usize; 3] {
    let (rows, bins) = rotation_logits.shape();
    assert_eq!(rows, 3, "rotation logits must have one row per Euler axis");
    rotation_logits.with_data(|d| {
        let mut out = [0usize; 3];
        for axis in 0..3 {
            let row = &d[axis * bins..(axis + 1) * bins];
            let mut best = f32::NEG_INFINITY;
            for (b, &l) in row.iter().enumerate() {
                if l > best {
                    best = l;
                    out[axis] = b;
                }
            }
        }
        out
    })
}

/// Turns one stage's head outputs into an action.
///
/// Translation: argmax of the candidate-grid scoring above, a point inside
/// the rig cube. Rotation: Euler-bin argmax, interpreted relative to the
/// previous pose (`R = R_prev · R_bins`) unless `direct_pose` makes every
/// stage absolute. The previous pose is the identity at stage 0, so stage 0
/// is absolute in either mode. Open/collision flags fire on positive logits.
pub fn decode_action(
    output: &StageOutput,
    rig: &CameraRig,
    previous: &Pose,
    direct_pose: bool,
) -> Result<DecodedAction, ModelError> {
    let res = rig.cameras[0].resolution;
    let grid = candidate_grid(rig, res);
    let translation = decode_translation(&output.heatmaps, rig, &grid)?;

    let bins = argmax_bins(&output.rotation_logits);
    let binned = euler_decode(&EulerBins::new(bins));
    let rotation = if direct_pose {
        binned
    } else {
        previous.rotation.mul(&binned)
    };
    let pose = Pose::new(translation, rotation);
    let refinement = pose.compose(&previous.inverse());

    Ok(DecodedAction {
        pose,
        refinement,
        gripper_open: output.open_logit.value() > 0.0,
        collide: output.collide_logit.value() > 0.0,
    })
}
