//! LSTM cell and stacked unidirectional LSTM with full backpropagation
//! through time.
//!
//! Gate order inside the fused 4h blocks is fixed as
//! [input, forget, cell, output]; checkpoints depend on it.

use rand::Rng;

use super::layers::{sigmoid_scalar, tanh_vec};
use super::params::{Gradients, ParamId, ParamSet};
use super::tensor::{matvec_acc, matvec_t_acc, outer_acc};
use super::KernelError;

/// Parameter handles for one LSTM cell.
#[derive(Debug, Clone, Copy)]
pub struct LstmCellIds {
    pub w_x: ParamId,
    pub w_h: ParamId,
    pub b: ParamId,
    pub input: usize,
    pub hidden: usize,
}

impl LstmCellIds {
    pub fn register(
        params: &mut ParamSet,
        prefix: &str,
        input: usize,
        hidden: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let w_x = params.add_weight(&format!("{prefix}.w_x"), 4 * hidden, input, rng);
        let w_h = params.add_weight(&format!("{prefix}.w_h"), 4 * hidden, hidden, rng);
        let b = params.add_lstm_bias(&format!("{prefix}.b"), hidden);
        LstmCellIds { w_x, w_h, b, input, hidden }
    }
}

/// Activations captured during one cell step, consumed by the backward pass.
#[derive(Debug, Clone)]
pub struct LstmStepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub gate_i: Vec<f64>,
    pub gate_f: Vec<f64>,
    pub gate_g: Vec<f64>,
    pub gate_o: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
}

/// One LSTM step:
///   a = W_x x + W_h h_prev + b,  split into (i, f, g, o)
///   c = sigmoid(f) * c_prev + sigmoid(i) * tanh(g)
///   h = sigmoid(o) * tanh(c)
pub fn lstm_cell_forward(
    params: &ParamSet,
    ids: &LstmCellIds,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, LstmStepCache), KernelError> {
    let h = ids.hidden;
    if x.len() != ids.input || h_prev.len() != h || c_prev.len() != h {
        return Err(KernelError::ShapeMismatch {
            left: format!("lstm({}x{})", ids.input, h),
            right: format!("x={} h={} c={}", x.len(), h_prev.len(), c_prev.len()),
        });
    }
    if x.iter().chain(h_prev).chain(c_prev).any(|v| !v.is_finite()) {
        return Err(KernelError::NonFinite("lstm_cell_forward"));
    }

    let mut a = params.arr(ids.b).data.clone();
    matvec_acc(params.arr(ids.w_x), x, &mut a);
    matvec_acc(params.arr(ids.w_h), h_prev, &mut a);

    let gate_i: Vec<f64> = a[0..h].iter().map(|&v| sigmoid_scalar(v)).collect();
    let gate_f: Vec<f64> = a[h..2 * h].iter().map(|&v| sigmoid_scalar(v)).collect();
    let gate_g = tanh_vec(&a[2 * h..3 * h]);
    let gate_o: Vec<f64> = a[3 * h..4 * h].iter().map(|&v| sigmoid_scalar(v)).collect();

    let c: Vec<f64> = (0..h)
        .map(|k| gate_f[k] * c_prev[k] + gate_i[k] * gate_g[k])
        .collect();
    let tanh_c = tanh_vec(&c);
    let h_out: Vec<f64> = (0..h).map(|k| gate_o[k] * tanh_c[k]).collect();

    let cache = LstmStepCache {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        c_prev: c_prev.to_vec(),
        gate_i,
        gate_f,
        gate_g,
        gate_o,
        c: c.clone(),
        tanh_c,
    };
    Ok((h_out, c, cache))
}

/// Backward through one cell step. `dh`/`dc` are the losses' gradients
/// w.r.t. this step's outputs; returns (dx, dh_prev, dc_prev).
pub fn lstm_cell_backward(
    params: &ParamSet,
    ids: &LstmCellIds,
    cache: &LstmStepCache,
    dh: &[f64],
    dc_in: &[f64],
    grads: &mut Gradients,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let h = ids.hidden;
    let mut da = vec![0.0; 4 * h];
    let mut dc_prev = vec![0.0; h];

    for k in 0..h {
        let do_ = dh[k] * cache.tanh_c[k];
        let dc = dc_in[k] + dh[k] * cache.gate_o[k] * (1.0 - cache.tanh_c[k] * cache.tanh_c[k]);
        let di = dc * cache.gate_g[k];
        let df = dc * cache.c_prev[k];
        let dg = dc * cache.gate_i[k];
        dc_prev[k] = dc * cache.gate_f[k];

        da[k] = di * cache.gate_i[k] * (1.0 - cache.gate_i[k]);
        da[h + k] = df * cache.gate_f[k] * (1.0 - cache.gate_f[k]);
        da[2 * h + k] = dg * (1.0 - cache.gate_g[k] * cache.gate_g[k]);
        da[3 * h + k] = do_ * cache.gate_o[k] * (1.0 - cache.gate_o[k]);
    }

    outer_acc(grads.arr_mut(ids.w_x), &da, &cache.x);
    outer_acc(grads.arr_mut(ids.w_h), &da, &cache.h_prev);
    for (g, d) in grads.arr_mut(ids.b).data.iter_mut().zip(&da) {
        *g += d;
    }

    let mut dx = vec![0.0; ids.input];
    matvec_t_acc(params.arr(ids.w_x), &da, &mut dx);
    let mut dh_prev = vec![0.0; h];
    matvec_t_acc(params.arr(ids.w_h), &da, &mut dh_prev);
    (dx, dh_prev, dc_prev)
}

/// Stack of LSTM layers run over a sequence, zero initial states.
#[derive(Debug, Clone)]
pub struct StackedLstm {
    pub layers: Vec<LstmCellIds>,
}

#[derive(Debug)]
pub struct StackedLstmCache {
    /// caches[step][layer]
    steps: Vec<Vec<LstmStepCache>>,
    hidden: usize,
}

impl StackedLstm {
    pub fn register(
        params: &mut ParamSet,
        prefix: &str,
        input: usize,
        hidden: usize,
        depth: usize,
        rng: &mut impl Rng,
    ) -> Self {
        assert!(depth >= 1, "stacked lstm needs at least one layer");
        let layers = (0..depth)
            .map(|l| {
                let in_dim = if l == 0 { input } else { hidden };
                LstmCellIds::register(params, &format!("{prefix}.l{l}"), in_dim, hidden, rng)
            })
            .collect();
        StackedLstm { layers }
    }

    pub fn hidden(&self) -> usize {
        self.layers[0].hidden
    }

    /// Runs the stack over `xs`, returning the top-layer state per step.
    pub fn forward_seq(
        &self,
        params: &ParamSet,
        xs: &[Vec<f64>],
    ) -> Result<(Vec<Vec<f64>>, StackedLstmCache), KernelError> {
        let h = self.hidden();
        let depth = self.layers.len();
        let mut hs = vec![vec![0.0; h]; depth];
        let mut cs = vec![vec![0.0; h]; depth];
        let mut top = Vec::with_capacity(xs.len());
        let mut steps = Vec::with_capacity(xs.len());

        for x in xs {
            let mut layer_in = x.clone();
            let mut step_caches = Vec::with_capacity(depth);
            for (l, ids) in self.layers.iter().enumerate() {
                let (h_new, c_new, cache) =
                    lstm_cell_forward(params, ids, &layer_in, &hs[l], &cs[l])?;
                layer_in = h_new.clone();
                hs[l] = h_new;
                cs[l] = c_new;
                step_caches.push(cache);
            }
            top.push(hs[depth - 1].clone());
            steps.push(step_caches);
        }
        Ok((top, StackedLstmCache { steps, hidden: h }))
    }

    /// BPTT given gradients of the top-layer state at every step.
    /// Returns gradients for the input sequence.
    pub fn backward_seq(
        &self,
        params: &ParamSet,
        cache: &StackedLstmCache,
        d_top: &[Vec<f64>],
        grads: &mut Gradients,
    ) -> Vec<Vec<f64>> {
        let depth = self.layers.len();
        let h = cache.hidden;
        let steps = cache.steps.len();
        assert_eq!(d_top.len(), steps);

        let mut dh_next = vec![vec![0.0; h]; depth];
        let mut dc_next = vec![vec![0.0; h]; depth];
        let mut dxs = vec![Vec::new(); steps];

        for t in (0..steps).rev() {
            // Gradient flowing into the top layer at step t: loss + recurrence.
            let mut d_layer_out = d_top[t].clone();
            for l in (0..depth).rev() {
                let mut dh = dh_next[l].clone();
                for (a, b) in dh.iter_mut().zip(&d_layer_out) {
                    *a += b;
                }
                let (dx, dh_prev, dc_prev) = lstm_cell_backward(
                    params,
                    &self.layers[l],
                    &cache.steps[t][l],
                    &dh,
                    &dc_next[l],
                    grads,
                );
                dh_next[l] = dh_prev;
                dc_next[l] = dc_prev;
                d_layer_out = dx;
            }
            dxs[t] = d_layer_out;
        }
        dxs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::cross_entropy;
    use crate::kernels::gradcheck::{max_grad_err, perturb_inputs};
    use crate::rng::stream;
    use rand::Rng;

    fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn zero_params_zero_state_gives_zero_outputs() {
        let mut p = ParamSet::new();
        let mut rng = stream(0, "init");
        let ids = LstmCellIds::register(&mut p, "cell", 3, 4, &mut rng);
        p.arr_mut(ids.w_x).fill(0.0);
        p.arr_mut(ids.w_h).fill(0.0);
        p.arr_mut(ids.b).fill(0.0);
        let (h, c, _) =
            lstm_cell_forward(&p, &ids, &[0.0; 3], &[0.0; 4], &[0.0; 4]).unwrap();
        assert_eq!(h, vec![0.0; 4]);
        assert_eq!(c, vec![0.0; 4]);
    }

    #[test]
    fn saturated_forget_gate_carries_cell_state() {
        let mut p = ParamSet::new();
        let mut rng = stream(0, "init");
        let ids = LstmCellIds::register(&mut p, "cell", 2, 3, &mut rng);
        p.arr_mut(ids.w_x).fill(0.0);
        p.arr_mut(ids.w_h).fill(0.0);
        // forget gate bias -> +inf analog (50 saturates sigmoid), input gate -> -50.
        let b = p.arr_mut(ids.b);
        for k in 0..3 {
            b.data[k] = -50.0; // input gate closed
            b.data[3 + k] = 50.0; // forget gate open
        }
        let c_prev = [0.3, -0.7, 1.1];
        let (_, c, _) = lstm_cell_forward(&p, &ids, &[1.0, -1.0], &[0.0; 3], &c_prev).unwrap();
        for (a, b) in c.iter().zip(&c_prev) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut p = ParamSet::new();
        let mut rng = stream(0, "init");
        let ids = LstmCellIds::register(&mut p, "cell", 2, 2, &mut rng);
        let err = lstm_cell_forward(&p, &ids, &[f64::NAN, 0.0], &[0.0; 2], &[0.0; 2]);
        assert!(matches!(err, Err(KernelError::NonFinite(_))));
    }

    // Finite-difference oracle on a random cell: all parameter and input grads.
    #[test]
    fn cell_gradients_match_finite_differences() {
        let mut rng = stream(17, "init");
        let mut p = ParamSet::new();
        let ids = LstmCellIds::register(&mut p, "cell", 3, 4, &mut rng);
        let x = random_vec(&mut rng, 3);
        let h_prev = random_vec(&mut rng, 4);
        let c_prev = random_vec(&mut rng, 4);
        // Scalar objective: CE over h with a fixed target plus c-sum so dc != 0.
        let loss = |p: &ParamSet, x: &[f64], hp: &[f64], cp: &[f64]| {
            let (h, c, _) = lstm_cell_forward(p, &ids, x, hp, cp).unwrap();
            cross_entropy(&h, 1).0 + 0.3 * c.iter().sum::<f64>()
        };

        let (h, _c, cache) = lstm_cell_forward(&p, &ids, &x, &h_prev, &c_prev).unwrap();
        let (_, dh) = cross_entropy(&h, 1);
        let dc = vec![0.3; 4];
        let mut grads = p.new_gradients();
        let (dx, dhp, dcp) = lstm_cell_backward(&p, &ids, &cache, &dh, &dc, &mut grads);

        let err = max_grad_err(&mut p, &grads, 1e-5, |p| loss(p, &x, &h_prev, &c_prev));
        assert!(err < 1e-4, "param err {err}");
        let ex = perturb_inputs(&mut x.clone(), &dx, 1e-5, |x| loss(&p, x, &h_prev, &c_prev));
        let eh = perturb_inputs(&mut h_prev.clone(), &dhp, 1e-5, |hp| loss(&p, &x, hp, &c_prev));
        let ec = perturb_inputs(&mut c_prev.clone(), &dcp, 1e-5, |cp| loss(&p, &x, &h_prev, cp));
        assert!(ex < 1e-4 && eh < 1e-4 && ec < 1e-4, "input errs {ex} {eh} {ec}");
    }

    #[test]
    fn stacked_bptt_matches_finite_differences() {
        let mut rng = stream(23, "init");
        let mut p = ParamSet::new();
        let stack = StackedLstm::register(&mut p, "inter", 3, 4, 2, &mut rng);
        let xs: Vec<Vec<f64>> = (0..3).map(|_| random_vec(&mut rng, 3)).collect();

        // Loss touches every step's top state so recurrence paths are covered.
        let loss = |p: &ParamSet, xs: &[Vec<f64>]| {
            let (top, _) = stack.forward_seq(p, xs).unwrap();
            top.iter().enumerate().map(|(t, h)| cross_entropy(h, t % 4).0).sum::<f64>()
        };

        let (top, cache) = stack.forward_seq(&p, &xs).unwrap();
        let d_top: Vec<Vec<f64>> = top
            .iter()
            .enumerate()
            .map(|(t, h)| cross_entropy(h, t % 4).1)
            .collect();
        let mut grads = p.new_gradients();
        let dxs = stack.backward_seq(&p, &cache, &d_top, &mut grads);

        let err = max_grad_err(&mut p, &grads, 1e-5, |p| loss(p, &xs));
        assert!(err < 1e-4, "param err {err}");

        // Flatten the input-sequence gradient check.
        for t in 0..xs.len() {
            let mut xt = xs[t].clone();
            let dxt = dxs[t].clone();
            let others = xs.clone();
            let e = perturb_inputs(&mut xt, &dxt, 1e-5, |x| {
                let mut seq = others.clone();
                seq[t] = x.to_vec();
                loss(&p, &seq)
            });
            assert!(e < 1e-4, "step {t} err {e}");
        }
    }

    #[test]
    fn prefix_property_holds_for_unidirectional_stack() {
        let mut rng = stream(5, "init");
        let mut p = ParamSet::new();
        let stack = StackedLstm::register(&mut p, "inter", 2, 3, 2, &mut rng);
        let xs: Vec<Vec<f64>> = (0..4).map(|_| random_vec(&mut rng, 2)).collect();
        let (full, _) = stack.forward_seq(&p, &xs).unwrap();
        for t in 1..=4 {
            let (prefix, _) = stack.forward_seq(&p, &xs[..t]).unwrap();
            assert_eq!(prefix[t - 1], full[t - 1], "state at step {t} must not depend on the future");
        }
    }
}
