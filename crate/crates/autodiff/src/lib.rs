//! A small reverse-mode automatic differentiation engine for dense 2-D
//! tensors, plus the optimizer and checkpoint plumbing the policy model
//! trains with.
//!
//! Design constraints, in order:
//!
//! - **Determinism.** Every kernel reduces in a fixed order, so the same
//!   graph over the same bits always produces the same bits — forward and
//!   backward. Nothing here is threaded.
//! - **No hidden graph state.** A [`Tensor`] is a reference-counted handle
//!   into a DAG; backward walks parents recorded at construction. Dropping
//!   the handles frees the graph. There is no global tape to reset.
//! - **f32 or f64 everywhere.** Ops are generic over [`Scalar`]; gradient
//!   checks run in f64 while training runs in f32. Numerically delicate
//!   reductions (losses, Adam moments) accumulate in f64 regardless.

mod checkpoint;
mod error;
mod gradcheck;
mod kernels;
mod ops;
mod optim;
mod scalar;
mod tensor;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointEntry, LoadedCheckpoint};
pub use error::AutodiffError;
pub use gradcheck::grad_check;
pub use optim::{Adam, AdamConfig, ParamSet};
pub use scalar::Scalar;
pub use tensor::Tensor;
