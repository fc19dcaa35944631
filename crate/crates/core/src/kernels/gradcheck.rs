//! Central finite-difference gradient checking.
//!
//! The comparison metric is |fd - analytic| / max(1, |fd|, |analytic|): a
//! relative error with a unit floor, so near-zero gradients are compared
//! absolutely instead of amplifying finite-difference roundoff.

use super::params::{Gradients, ParamSet};

pub fn scaled_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs())
}

/// Checks every parameter of `params` against central differences of `f`.
/// `grads` must already hold the analytic gradient of `f` at `params`.
/// Returns the maximum scaled error over all entries.
pub fn max_grad_err(
    params: &mut ParamSet,
    grads: &Gradients,
    h: f64,
    mut f: impl FnMut(&ParamSet) -> f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for id in params.ids().collect::<Vec<_>>() {
        let n = params.arr(id).data.len();
        for k in 0..n {
            let orig = params.arr(id).data[k];
            params.arr_mut(id).data[k] = orig + h;
            let up = f(params);
            params.arr_mut(id).data[k] = orig - h;
            let down = f(params);
            params.arr_mut(id).data[k] = orig;
            let fd = (up - down) / (2.0 * h);
            let an = grads.arr(id).data[k];
            worst = worst.max(scaled_err(fd, an));
        }
    }
    worst
}

/// Same check for the gradient with respect to an input vector.
pub fn perturb_inputs(
    x: &mut [f64],
    dx: &[f64],
    h: f64,
    mut f: impl FnMut(&[f64]) -> f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..x.len() {
        let orig = x[k];
        x[k] = orig + h;
        let up = f(x);
        x[k] = orig - h;
        let down = f(x);
        x[k] = orig;
        let fd = (up - down) / (2.0 * h);
        worst = worst.max(scaled_err(fd, dx[k]));
    }
    worst
}
