use std::cell::{Cell, RefCell};
use std::collections::HashSet;
use std::rc::Rc;

use crate::scalar::Scalar;

thread_local! {
    static NEXT_ID: Cell<u64> = const { Cell::new(0) };
}

fn fresh_id() -> u64 {
    NEXT_ID.with(|c| {
        let id = c.get();
        c.set(id + 1);
        id
    })
}

pub(crate) type BackwardFn<T> = Box<dyn Fn(&Node<T>)>;

/// One vertex of the computation graph. `data` holds the forward value;
/// `grad` is empty until the reverse pass (or an optimizer) touches it.
pub struct Node<T: Scalar> {
    pub(crate) id: u64,
    pub(crate) rows: usize,
    pub(crate) cols: usize,
    pub(crate) data: RefCell<Vec<T>>,
    pub(crate) grad: RefCell<Vec<T>>,
    pub(crate) requires_grad: bool,
    pub(crate) parents: Vec<Tensor<T>>,
    pub(crate) backward: Option<BackwardFn<T>>,
}

impl<T: Scalar> Node<T> {
    /// Adds `f`'s output into the gradient buffer, allocating zeros first if
    /// this is the first contribution. Closures that touch each element once
    /// use this directly; ops whose backward folds several partials per
    /// element go through [`Node::accumulate_grad`] instead so each closure
    /// contributes exactly one addition per element.
    pub(crate) fn with_grad_mut(&self, f: impl FnOnce(&mut [T])) {
        let mut g = self.grad.borrow_mut();
        if g.is_empty() {
            g.resize(self.rows * self.cols, T::zero());
        }
        f(&mut g);
    }

    /// Adds a fully-formed contribution elementwise. Summing per-closure
    /// contributions (rather than folding partials into the shared buffer)
    /// keeps gradient accumulation exactly associative across duplicated
    /// subgraphs: two identical contributions add as `x + x`, which IEEE
    /// doubles without rounding.
    pub(crate) fn accumulate_grad(&self, contribution: &[T]) {
        self.with_grad_mut(|dst| {
            debug_assert_eq!(dst.len(), contribution.len());
            for (d, &c) in dst.iter_mut().zip(contribution) {
                *d = *d + c;
            }
        });
    }
}

/// A reference-counted handle to a graph node. Cloning a `Tensor` clones the
/// handle, not the data; graphs are plain DAGs of these handles and free
/// themselves when the last handle drops.
///
/// Tensors are two-dimensional (`rows x cols`), stored row-major. Shape
/// violations are programming errors and panic with a diagnostic rather than
/// returning `Result`, mirroring how indexing out of bounds behaves.
pub struct Tensor<T: Scalar> {
    pub(crate) inner: Rc<Node<T>>,
}

impl<T: Scalar> Clone for Tensor<T> {
    fn clone(&self) -> Self {
        Tensor {
            inner: Rc::clone(&self.inner),
        }
    }
}

impl<T: Scalar> std::fmt::Debug for Tensor<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tensor")
            .field("shape", &(self.inner.rows, self.inner.cols))
            .field("requires_grad", &self.inner.requires_grad)
            .finish()
    }
}

impl<T: Scalar> Tensor<T> {
    fn construct(
        rows: usize,
        cols: usize,
        data: Vec<T>,
        requires_grad: bool,
        parents: Vec<Tensor<T>>,
        backward: Option<BackwardFn<T>>,
    ) -> Tensor<T> {
        assert_eq!(
            data.len(),
            rows * cols,
            "tensor data length {} does not match shape {rows}x{cols}",
            data.len()
        );
        Tensor {
            inner: Rc::new(Node {
                id: fresh_id(),
                rows,
                cols,
                data: RefCell::new(data),
                grad: RefCell::new(Vec::new()),
                requires_grad,
                parents,
                backward,
            }),
        }
    }

    /// A constant: no gradient is ever collected for it.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Tensor<T> {
        Tensor::construct(rows, cols, data, false, Vec::new(), None)
    }

    /// A trainable leaf: gradients accumulate here during backward passes.
    pub fn leaf(rows: usize, cols: usize, data: Vec<T>) -> Tensor<T> {
        Tensor::construct(rows, cols, data, true, Vec::new(), None)
    }

    pub fn zeros(rows: usize, cols: usize) -> Tensor<T> {
        Tensor::from_vec(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Tensor<T> {
        Tensor::from_vec(rows, cols, vec![v; rows * cols])
    }

    pub fn scalar(v: T) -> Tensor<T> {
        Tensor::from_vec(1, 1, vec![v])
    }

    /// Internal node constructor for ops: gradient tracking is inherited
    /// from the parents, and the backward closure is dropped entirely when
    /// no parent needs gradients (cheap inference).
    pub(crate) fn make(
        rows: usize,
        cols: usize,
        data: Vec<T>,
        parents: Vec<Tensor<T>>,
        backward: impl FnOnce() -> BackwardFn<T>,
    ) -> Tensor<T> {
        let requires = parents.iter().any(|p| p.inner.requires_grad);
        if requires {
            Tensor::construct(rows, cols, data, true, parents, Some(backward()))
        } else {
            Tensor::construct(rows, cols, data, false, Vec::new(), None)
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.inner.rows, self.inner.cols)
    }

    pub fn rows(&self) -> usize {
        self.inner.rows
    }

    pub fn cols(&self) -> usize {
        self.inner.cols
    }

    pub fn numel(&self) -> usize {
        self.inner.rows * self.inner.cols
    }

    pub fn requires_grad(&self) -> bool {
        self.inner.requires_grad
    }

    /// Copies the forward values out.
    pub fn data(&self) -> Vec<T> {
        self.inner.data.borrow().clone()
    }

    /// Runs `f` over the forward values without copying.
    pub fn with_data<R>(&self, f: impl FnOnce(&[T]) -> R) -> R {
        f(&self.inner.data.borrow())
    }

    /// The single element of a 1x1 tensor.
    pub fn value(&self) -> T {
        assert_eq!(
            self.shape(),
            (1, 1),
            "value() requires a scalar tensor, got {:?}",
            self.shape()
        );
        self.inner.data.borrow()[0]
    }

    /// Copies the accumulated gradient out, if any backward pass reached
    /// this tensor since the last `zero_grad`.
    pub fn grad(&self) -> Option<Vec<T>> {
        let g = self.inner.grad.borrow();
        if g.is_empty() {
            None
        } else {
            Some(g.clone())
        }
    }

    pub fn zero_grad(&self) {
        self.inner.grad.borrow_mut().clear();
    }

    /// Overwrites the forward values (optimizer updates). The length must
    /// match the existing shape.
    pub fn set_data(&self, data: Vec<T>) {
        assert_eq!(
            data.len(),
            self.numel(),
            "set_data length {} does not match shape {:?}",
            data.len(),
            self.shape()
        );
        *self.inner.data.borrow_mut() = data;
    }

    /// Reverse pass from a scalar loss: seeds d(loss)/d(loss) = 1 and
    /// accumulates gradients into every reachable tensor that requires them.
    /// Calling it twice without zeroing accumulates twice.
    pub fn backward(&self) {
        assert_eq!(
            self.shape(),
            (1, 1),
            "backward() starts from a scalar loss, got {:?}",
            self.shape()
        );
        if !self.inner.requires_grad {
            return;
        }

        // Collect the ancestor subgraph, then run newest-first: node ids
        // increase monotonically at creation, so descending id order is a
        // topological order with children before parents.
        let mut visited: HashSet<u64> = HashSet::new();
        let mut order: Vec<Rc<Node<T>>> = Vec::new();
        let mut stack: Vec<Rc<Node<T>>> = vec![Rc::clone(&self.inner)];
        while let Some(n) = stack.pop() {
            if !visited.insert(n.id) {
                continue;
            }
            for p in &n.parents {
                if p.inner.requires_grad {
                    stack.push(Rc::clone(&p.inner));
                }
            }
            order.push(n);
        }
        order.sort_by(|a, b| b.id.cmp(&a.id));

        // Interior (op-output) gradients are scratch space for this pass;
        // only leaves accumulate across passes. Each pass runs from zeroed
        // buffers and its completed total is added onto whatever the leaves
        // already held, so two identical passes accumulate exactly twice the
        // single-pass gradient (x + x doubles without rounding in IEEE,
        // whereas folding the second pass's per-consumer contributions onto
        // a nonzero buffer would not).
        let mut held: Vec<(Rc<Node<T>>, Vec<T>)> = Vec::new();
        for node in &order {
            if node.backward.is_some() {
                node.grad.borrow_mut().clear();
            } else {
                let prior = std::mem::take(&mut *node.grad.borrow_mut());
                if !prior.is_empty() {
                    held.push((Rc::clone(node), prior));
                }
            }
        }
        self.inner.with_grad_mut(|g| g[0] = g[0] + T::one());
        for node in &order {
            if let Some(back) = &node.backward {
                back(node);
            }
        }
        for (node, prior) in held {
            node.with_grad_mut(|g| {
                for (dst, p) in g.iter_mut().zip(prior) {
                    *dst = *dst + p;
                }
            });
        }
    }
}

/// Panics with a readable message when two tensors disagree in shape.
pub(crate) fn assert_same_shape<T: Scalar>(op: &str, a: &Tensor<T>, b: &Tensor<T>) {
    assert_eq!(
        a.shape(),
        b.shape(),
        "{op}: shape mismatch {:?} vs {:?}",
        a.shape(),
        b.shape()
    );
}
