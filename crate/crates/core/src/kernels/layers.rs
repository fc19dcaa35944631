//! Elementwise activations, linear layers, softmax, and cross-entropy with
//! exact analytic gradients.

use super::params::{Gradients, ParamId, ParamSet};
use super::tensor::{matvec_acc, matvec_t_acc, outer_acc, Tensor2};
use super::KernelError;

fn shape_err(left: &Tensor2, right_len: usize) -> KernelError {
    KernelError::ShapeMismatch {
        left: left.shape_str(),
        right: format!("{right_len}"),
    }
}

/// y = W x + b
pub fn linear_forward(
    params: &ParamSet,
    w: ParamId,
    b: ParamId,
    x: &[f64],
) -> Result<Vec<f64>, KernelError> {
    let wt = params.arr(w);
    if wt.cols != x.len() {
        return Err(shape_err(wt, x.len()));
    }
    let mut y = params.arr(b).data.clone();
    if y.len() != wt.rows {
        return Err(shape_err(wt, y.len()));
    }
    matvec_acc(wt, x, &mut y);
    Ok(y)
}

/// Accumulates dW, db from (x, dy) and returns dx.
pub fn linear_backward(
    params: &ParamSet,
    w: ParamId,
    b: ParamId,
    x: &[f64],
    dy: &[f64],
    grads: &mut Gradients,
) -> Vec<f64> {
    outer_acc(grads.arr_mut(w), dy, x);
    let db = grads.arr_mut(b);
    for (g, d) in db.data.iter_mut().zip(dy) {
        *g += d;
    }
    let mut dx = vec![0.0; x.len()];
    matvec_t_acc(params.arr(w), dy, &mut dx);
    dx
}

#[inline]
pub fn sigmoid_scalar(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn sigmoid(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| sigmoid_scalar(v)).collect()
}

/// d/dx sigmoid, expressed from the forward output s: s * (1 - s).
pub fn sigmoid_backward_from_output(s: &[f64], dy: &[f64]) -> Vec<f64> {
    s.iter().zip(dy).map(|(&s, &d)| d * s * (1.0 - s)).collect()
}

pub fn tanh_vec(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.tanh()).collect()
}

pub fn tanh_backward_from_output(t: &[f64], dy: &[f64]) -> Vec<f64> {
    t.iter().zip(dy).map(|(&t, &d)| d * (1.0 - t * t)).collect()
}

pub fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect()
}

/// Uses the pre-activation sign convention relu'(0) = 0.
pub fn relu_backward(pre: &[f64], dy: &[f64]) -> Vec<f64> {
    pre.iter().zip(dy).map(|(&z, &d)| if z > 0.0 { d } else { 0.0 }).collect()
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// loss = -log softmax(logits)[target]; gradient is softmax - onehot.
pub fn cross_entropy(logits: &[f64], target: usize) -> (f64, Vec<f64>) {
    assert!(target < logits.len(), "target {target} out of range {}", logits.len());
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = logits.iter().map(|&v| (v - m).exp()).sum::<f64>().ln() + m;
    let loss = log_sum - logits[target];
    let mut grad = softmax(logits);
    grad[target] -= 1.0;
    (loss, grad)
}

pub fn concat(parts: &[&[f64]]) -> Vec<f64> {
    let mut out = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for p in parts {
        out.extend_from_slice(p);
    }
    out
}

/// Row view of an embedding table.
pub fn embed_lookup(params: &ParamSet, table: ParamId, idx: usize) -> Result<&[f64], KernelError> {
    let t = params.arr(table);
    if idx >= t.rows {
        return Err(KernelError::ShapeMismatch {
            left: t.shape_str(),
            right: format!("row {idx}"),
        });
    }
    Ok(t.row(idx))
}

pub fn embed_grad_acc(grads: &mut Gradients, table: ParamId, idx: usize, d: &[f64]) {
    let row = grads.arr_mut(table).row_mut(idx);
    for (g, v) in row.iter_mut().zip(d) {
        *g += v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gradcheck::{max_grad_err, perturb_inputs};
    use crate::rng::stream;

    #[test]
    fn softmax_of_zeros_is_uniform() {
        let s = softmax(&[0.0, 0.0, 0.0]);
        for v in s {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_identity_passes_input_through() {
        let mut p = ParamSet::new();
        let mut rng = stream(1, "init");
        let w = p.add_weight("w", 3, 3, &mut rng);
        let b = p.add_bias("b", 3);
        let eye = Tensor2::from_rows(3, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        *p.arr_mut(w) = eye;
        let x = [0.5, -1.0, 2.0];
        let y = linear_forward(&p, w, b, &x).unwrap();
        assert_eq!(y, x.to_vec());
    }

    #[test]
    fn linear_shape_mismatch_names_both_shapes() {
        let mut p = ParamSet::new();
        let mut rng = stream(1, "init");
        let w = p.add_weight("w", 2, 3, &mut rng);
        let b = p.add_bias("b", 2);
        let err = linear_forward(&p, w, b, &[1.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2x3") && msg.contains('1'), "got {msg}");
    }

    #[test]
    fn uniform_logits_loss_is_ln_k() {
        for k in [2usize, 5, 17] {
            let (loss, _) = cross_entropy(&vec![0.0; k], 0);
            assert!((loss - (k as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_decreases_monotonically_toward_zero_as_target_logit_grows() {
        let mut prev = f64::INFINITY;
        for step in 0..30 {
            let z = step as f64;
            let (loss, _) = cross_entropy(&[z, 0.0, 0.0], 0);
            assert!(loss < prev);
            prev = loss;
        }
        assert!(prev < 1e-10);
    }

    // Finite-difference oracle for the linear layer: a random 5x4 case.
    #[test]
    fn linear_gradients_match_finite_differences() {
        let mut rng = stream(42, "init");
        let mut p = ParamSet::new();
        let w = p.add_weight("w", 5, 4, &mut rng);
        let b = p.add_bias("b", 5);
        let x: Vec<f64> = (0..4).map(|i| (i as f64) * 0.3 - 0.5).collect();
        let target = 2usize;

        let loss_fn = |p: &ParamSet, x: &[f64]| {
            let y = linear_forward(p, w, b, x).unwrap();
            cross_entropy(&y, target).0
        };

        let mut grads = p.new_gradients();
        let y = linear_forward(&p, w, b, &x).unwrap();
        let (_, dy) = cross_entropy(&y, target);
        let dx = linear_backward(&p, w, b, &x, &dy, &mut grads);

        let err = max_grad_err(&mut p, &grads, 1e-5, |p| loss_fn(p, &x));
        assert!(err < 1e-4, "param grad err {err}");
        let err_x = perturb_inputs(&mut x.clone(), &dx, 1e-5, |x| loss_fn(&p, x));
        assert!(err_x < 1e-4, "input grad err {err_x}");
    }

    #[test]
    fn cross_entropy_gradient_matches_finite_differences() {
        let logits = vec![0.3, -0.8, 1.2, 0.1];
        let (_, grad) = cross_entropy(&logits, 1);
        let err = perturb_inputs(&mut logits.clone(), &grad, 1e-5, |l| cross_entropy(l, 1).0);
        assert!(err < 1e-4, "err {err}");
    }
}
