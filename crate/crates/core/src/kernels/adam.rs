//! Adam with bias correction.

use serde::{Deserialize, Serialize};

use super::params::{Gradients, ParamSet};
use super::tensor::Tensor2;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First/second moment buffers, laid out like the parameter set.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Tensor2>,
    v: Vec<Tensor2>,
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &ParamSet) -> Self {
        let zeros: Vec<Tensor2> = params
            .ids()
            .map(|id| {
                let t = params.arr(id);
                Tensor2::zeros(t.rows, t.cols)
            })
            .collect();
        AdamState { m: zeros.clone(), v: zeros, step: 0 }
    }
}

/// One bias-corrected update over every parameter array.
pub fn adam_step(params: &mut ParamSet, grads: &Gradients, state: &mut AdamState, cfg: &AdamConfig) {
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);
    for (idx, id) in params.ids().collect::<Vec<_>>().into_iter().enumerate() {
        let g = &grads.arr(id).data;
        let m = &mut state.m[idx].data;
        let v = &mut state.v[idx].data;
        let p = &mut params.arr_mut(id).data;
        for k in 0..p.len() {
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            p[k] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut rng = stream(1, "init");
        let mut p = ParamSet::new();
        let id = p.add_weight("w", 3, 3, &mut rng);
        let before = p.arr(id).data.clone();
        let grads = p.new_gradients();
        let mut state = AdamState::new(&p);
        adam_step(&mut p, &grads, &mut state, &AdamConfig::default());
        assert_eq!(p.arr(id).data, before);
    }

    // First step closed form: m_hat = g, v_hat = g^2, so the update is
    // lr * g / (|g| + eps) ~= lr * sign(g).
    #[test]
    fn first_step_moves_by_lr_times_sign() {
        let mut rng = stream(2, "init");
        let mut p = ParamSet::new();
        let id = p.add_weight("w", 2, 2, &mut rng);
        let before = p.arr(id).data.clone();
        let mut grads = p.new_gradients();
        grads.arr_mut(id).data.copy_from_slice(&[0.5, -2.0, 1e-3, -1e-6]);
        let cfg = AdamConfig::default();
        let mut state = AdamState::new(&p);
        adam_step(&mut p, &grads, &mut state, &cfg);
        for k in 0..4 {
            let g: f64 = grads.arr(id).data[k];
            let expected = before[k] - cfg.lr * g / (g.abs() + cfg.eps);
            assert!(
                (p.arr(id).data[k] - expected).abs() < 1e-6,
                "k={k}: {} vs {}",
                p.arr(id).data[k],
                expected
            );
        }
    }

    /// Standalone scalar Adam, written independently of `adam_step`.
    fn reference_adam_scalar(mut w: f64, lr: f64, steps: usize) -> f64 {
        let (b1, b2, eps) = (0.9, 0.999, 1e-8);
        let (mut m, mut v) = (0.0, 0.0);
        for t in 1..=steps {
            let g = 2.0 * w;
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1_pow(b1, t));
            let v_hat = v / (1.0 - b1_pow(b2, t));
            w -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        w
    }

    fn b1_pow(b: f64, t: usize) -> f64 {
        b.powi(t as i32)
    }

    // 200 steps on f(w) = ||w||^2 from w0 = 1, against the scalar reference.
    #[test]
    fn matches_scalar_reference_and_converges_on_quadratic_bowl() {
        let lr = 0.05;
        let mut p = ParamSet::new();
        let id = p.add_bias("w", 4);
        p.arr_mut(id).fill(1.0);
        let cfg = AdamConfig { lr, ..AdamConfig::default() };
        let mut state = AdamState::new(&p);
        let mut grads = p.new_gradients();
        for _ in 0..200 {
            let w = p.arr(id).data.clone();
            for (g, wi) in grads.arr_mut(id).data.iter_mut().zip(&w) {
                *g = 2.0 * wi;
            }
            adam_step(&mut p, &grads, &mut state, &cfg);
        }
        let expected = reference_adam_scalar(1.0, lr, 200);
        for w in &p.arr(id).data {
            assert!((w - expected).abs() < 1e-12, "{w} vs reference {expected}");
        }
        let norm: f64 = p.arr(id).data.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-2, "|w| = {norm}");
    }
}
