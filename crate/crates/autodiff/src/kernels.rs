//! Matrix kernels shared by forward and backward passes. All of them
//! accumulate into `dst` (callers pass freshly zeroed buffers for forward
//! products) and use fixed summation orders, so results are deterministic.

use crate::scalar::Scalar;

const LANES: usize = 16;

/// Dot product with a fixed-order lane reduction; the independent
/// accumulators let the compiler vectorize despite strict float semantics.
///
/// Element `i` always lands in lane `i % LANES` — including the tail — so
/// the reduction order of a prefix does not depend on the total length.
/// Appending zero terms (masked-out attention entries) therefore leaves the
/// result bit-identical.
#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); LANES];
    let chunks = a.len() / LANES;
    for c in 0..chunks {
        let ao = &a[c * LANES..(c + 1) * LANES];
        let bo = &b[c * LANES..(c + 1) * LANES];
        for l in 0..LANES {
            acc[l] = acc[l] + ao[l] * bo[l];
        }
    }
    for i in chunks * LANES..a.len() {
        acc[i % LANES] = acc[i % LANES] + a[i] * b[i];
    }
    let mut s = T::zero();
    for v in acc {
        s = s + v;
    }
    s
}

/// dst[m,n] += a[m,k] * b[k,n].
pub(crate) fn mm_acc<T: Scalar>(dst: &mut [T], a: &[T], b: &[T], m: usize, k: usize, n: usize) {
    debug_assert_eq!(dst.len(), m * n);
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    for i in 0..m {
        let drow = &mut dst[i * n..(i + 1) * n];
        let arow = &a[i * k..(i + 1) * k];
        for (p, &aip) in arow.iter().enumerate() {
            let brow = &b[p * n..(p + 1) * n];
            for j in 0..n {
                drow[j] = drow[j] + aip * brow[j];
            }
        }
    }
}

/// dst[m,n] += a[m,k] * b[n,k]^T (dot products of rows of `a` with rows of
/// `b`); the natural orientation for weight matrices stored `[out, in]`.
pub(crate) fn mm_tb_acc<T: Scalar>(dst: &mut [T], a: &[T], b: &[T], m: usize, k: usize, n: usize) {
    debug_assert_eq!(dst.len(), m * n);
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), n * k);
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let drow = &mut dst[i * n..(i + 1) * n];
        for j in 0..n {
            let brow = &b[j * k..(j + 1) * k];
            drow[j] = drow[j] + dot(arow, brow);
        }
    }
}

/// dst[k,n] += a[m,k]^T * b[m,n].
pub(crate) fn mm_ta_acc<T: Scalar>(dst: &mut [T], a: &[T], b: &[T], m: usize, k: usize, n: usize) {
    debug_assert_eq!(dst.len(), k * n);
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), m * n);
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let brow = &b[i * n..(i + 1) * n];
        for (p, &aip) in arow.iter().enumerate() {
            let drow = &mut dst[p * n..(p + 1) * n];
            for j in 0..n {
                drow[j] = drow[j] + aip * brow[j];
            }
        }
    }
}
