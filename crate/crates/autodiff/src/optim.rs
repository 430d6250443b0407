//! Named parameter collections and the Adam optimizer.

use std::collections::HashMap;

use crate::error::AutodiffError;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// An ordered collection of named trainable tensors. Names must be unique;
/// iteration follows insertion order, which also fixes the checkpoint
/// layout.
pub struct ParamSet<T: Scalar> {
    entries: Vec<(String, Tensor<T>)>,
    index: HashMap<String, usize>,
}

impl<T: Scalar> Default for ParamSet<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ParamSet<T> {
    pub fn new() -> Self {
        ParamSet {
            entries: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Registers a tensor under `name` and returns a handle to it. Panics if
    /// the name is already taken: silently shadowing a parameter would make
    /// checkpoints ambiguous.
    pub fn add(&mut self, name: impl Into<String>, tensor: Tensor<T>) -> Tensor<T> {
        let name = name.into();
        assert!(
            !self.index.contains_key(&name),
            "parameter '{name}' registered twice"
        );
        let handle = tensor.clone();
        self.index.insert(name.clone(), self.entries.len());
        self.entries.push((name, tensor));
        handle
    }

    pub fn get(&self, name: &str) -> Option<&Tensor<T>> {
        self.index.get(name).map(|&i| &self.entries[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor<T>)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of scalar values across all parameters.
    pub fn numel(&self) -> usize {
        self.entries.iter().map(|(_, t)| t.numel()).sum()
    }

    pub fn zero_grads(&self) {
        for (_, t) in &self.entries {
            t.zero_grad();
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Steps over which the learning rate ramps linearly from lr/warmup to
    /// lr. Zero disables warmup.
    pub warmup_steps: u64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            warmup_steps: 100,
        }
    }
}

struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
}

/// Adam with bias correction and linear warmup. Moment buffers are kept in
/// f64 regardless of the parameter dtype so long runs don't drift; the step
/// counter is global across all parameters.
pub struct Adam<T: Scalar> {
    config: AdamConfig,
    step_count: u64,
    moments: HashMap<String, Moments>,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(config: AdamConfig) -> Self {
        Adam {
            config,
            step_count: 0,
            moments: HashMap::new(),
            _marker: std::marker::PhantomData,
        }
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Learning rate at step `t` (1-based) under the warmup schedule.
    pub fn effective_lr(&self, t: u64) -> f64 {
        if self.config.warmup_steps == 0 {
            return self.config.lr;
        }
        let ramp = (t as f64 / self.config.warmup_steps as f64).min(1.0);
        self.config.lr * ramp
    }

    /// Applies one update to every parameter that accumulated a gradient.
    /// All gradients are validated before anything is written: a non-finite
    /// gradient anywhere aborts the step with the offending parameter's name
    /// and leaves every parameter and moment buffer untouched.
    pub fn step(&mut self, params: &mut ParamSet<T>) -> Result<(), AutodiffError> {
        let mut pending: Vec<(&str, &Tensor<T>, Vec<f64>)> = Vec::new();
        for (name, tensor) in params.iter() {
            let Some(grad) = tensor.grad() else {
                continue;
            };
            let grad: Vec<f64> = grad.iter().map(|&g| g.to_f64()).collect();
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(AutodiffError::NonFiniteGradient {
                    param: name.to_string(),
                });
            }
            pending.push((name, tensor, grad));
        }

        self.step_count += 1;
        let t = self.step_count;
        let lr = self.effective_lr(t);
        let AdamConfig {
            beta1, beta2, eps, ..
        } = self.config;
        let bias1 = 1.0 - beta1.powi(t as i32);
        let bias2 = 1.0 - beta2.powi(t as i32);

        for (name, tensor, grad) in pending {
            let n = grad.len();
            let slot = self
                .moments
                .entry(name.to_string())
                .or_insert_with(|| Moments {
                    m: vec![0.0; n],
                    v: vec![0.0; n],
                });
            let mut data = tensor.data();
            for i in 0..n {
                let g = grad[i];
                slot.m[i] = beta1 * slot.m[i] + (1.0 - beta1) * g;
                slot.v[i] = beta2 * slot.v[i] + (1.0 - beta2) * g * g;
                let m_hat = slot.m[i] / bias1;
                let v_hat = slot.v[i] / bias2;
                let upd = lr * m_hat / (v_hat.sqrt() + eps);
                data[i] = T::from_f64(data[i].to_f64() - upd);
            }
            tensor.set_data(data);
        }
        Ok(())
    }
}
