use inhand_autodiff::Tensor;
use inhand_geometry::Vec3;
use inhand_render::RenderedView;

/// The assembled transformer input: the embedding matrix plus the per-token
/// side information attention needs.
pub struct TokenSet {
    /// `[tokens, model_dim]`, connected to the parameter graph so gradients
    /// reach the embedding tables and the proprioception MLP.
    pub embeddings: Tensor<f32>,
    /// Stage index per token; language and proprioception count as stage 0.
    pub stage_of: Vec<usize>,
    /// World position of each image patch (mean of its hit pixels); `None`
    /// for the context tokens, which have no spatial location.
    pub positions: Vec<Option<Vec3>>,
    /// Which of the five views an image token came from; `None` for context.
    pub view_of: Vec<Option<usize>>,
    /// Leading context tokens: language plus one proprioception token.
    pub context: usize,
}

/// Mean world position of each patch, taken from the world-xyz channel over
/// the patch's hit pixels; patches that saw no points fall back to the rig
/// anchor. Patch order is grid row-major, matching the patch embedding.
pub fn patch_world_positions(view: &RenderedView, patch: usize) -> Vec<Vec3> {
    let res = view.resolution;
    assert!(patch > 0 && res % patch == 0, "patch must divide resolution");
    let g = res / patch;
    let anchor = view.camera.anchor;
    let mut out = Vec::with_capacity(g * g);
    for gi in 0..g {
        for gj in 0..g {
            let mut sum = Vec3::ZERO;
            let mut hits = 0usize;
            for pi in 0..patch {
                for pj in 0..patch {
                    let px = (gi * patch + pi) * res + gj * patch + pj;
                    if view.hit[px] {
                        sum = sum
                            + Vec3::new(
                                view.world_xyz[px * 3] as f64,
                                view.world_xyz[px * 3 + 1] as f64,
                                view.world_xyz[px * 3 + 2] as f64,
                            );
                        hits += 1;
                    }
                }
            }
            if hits > 0 {
                let n = hits as f64;
                out.push(Vec3::new(sum.x / n, sum.y / n, sum.z / n));
            } else {
                out.push(anchor);
            }
        }
    }
    out
}
