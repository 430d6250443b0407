use inhand_autodiff::{Scalar, Tensor};

/// Additive logit for blocked attention entries. Large enough that after the
/// 1/sqrt(d_k) attention scaling the exponential still underflows to exactly
/// zero in f32, which is what makes stage causality bitwise rather than
/// merely approximate.
pub const MASK_BLOCK: f64 = -1e9;

/// Builds the T x T additive stage mask.
///
/// `stages[k]` is the stage index of token k; the first `context` tokens
/// (language and proprioception) count as stage 0 and stay visible to every
/// query. With `cross_stage` set, query q sees key k iff
/// stage(k) <= stage(q); without it (the ablation) image tokens see only
/// their own stage, while context keys remain open to everyone.
pub fn stage_mask<T: Scalar>(stages: &[usize], context: usize, cross_stage: bool) -> Tensor<T> {
    let n = stages.len();
    let mut data = vec![T::zero(); n * n];
    let block = T::from_f64(MASK_BLOCK);
    for q in 0..n {
        for k in 0..n {
            let open = if cross_stage {
                stages[k] <= stages[q]
            } else {
                k < context || stages[k] == stages[q]
            };
            if !open {
                data[q * n + k] = block;
            }
        }
    }
    Tensor::from_vec(n, n, data)
}
