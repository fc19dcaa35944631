//! Bidirectional LSTM with additive self-attention pooling.
//!
//! Per step the forward and backward hidden states are concatenated; a small
//! feedforward -> relu -> feedforward head scores each step, softmax turns
//! the scores into weights, and the pooled state is the weighted sum.

use rand::Rng;

use super::layers::{linear_backward, linear_forward, relu, relu_backward, softmax};
use super::lstm::{lstm_cell_backward, lstm_cell_forward, LstmCellIds, LstmStepCache};
use super::params::{Gradients, ParamId, ParamSet};
use super::KernelError;

#[derive(Debug, Clone)]
pub struct BiLstmAttention {
    pub fwd: LstmCellIds,
    pub bwd: LstmCellIds,
    pub att_w1: ParamId,
    pub att_b1: ParamId,
    pub att_w2: ParamId,
    pub att_b2: ParamId,
    pub hidden: usize,
    pub att_dim: usize,
}

#[derive(Debug)]
pub struct BiLstmCache {
    fwd_steps: Vec<LstmStepCache>,
    bwd_steps: Vec<LstmStepCache>, // stored in reversed (processing) order
    states: Vec<Vec<f64>>,         // concatenated [fwd, bwd] per original step
    att_pre: Vec<Vec<f64>>,        // first attention layer pre-activation
    att_hidden: Vec<Vec<f64>>,     // relu output
    pub weights: Vec<f64>,         // softmax attention weights
}

impl BiLstmAttention {
    pub fn register(
        params: &mut ParamSet,
        prefix: &str,
        input: usize,
        hidden: usize,
        att_dim: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let fwd = LstmCellIds::register(params, &format!("{prefix}.fwd"), input, hidden, rng);
        let bwd = LstmCellIds::register(params, &format!("{prefix}.bwd"), input, hidden, rng);
        let att_w1 = params.add_weight(&format!("{prefix}.att.w1"), att_dim, 2 * hidden, rng);
        let att_b1 = params.add_bias(&format!("{prefix}.att.b1"), att_dim);
        // Zero-initialized scorer: attention starts as uniform mean pooling
        // and sharpens as training moves w2 off zero.
        let att_w2 = params.add_zero_weight(&format!("{prefix}.att.w2"), 1, att_dim);
        let att_b2 = params.add_bias(&format!("{prefix}.att.b2"), 1);
        BiLstmAttention { fwd, bwd, att_w1, att_b1, att_w2, att_b2, hidden, att_dim }
    }

    /// Output width of the pooled state.
    pub fn out_dim(&self) -> usize {
        2 * self.hidden
    }

    pub fn forward(
        &self,
        params: &ParamSet,
        xs: &[Vec<f64>],
    ) -> Result<(Vec<f64>, BiLstmCache), KernelError> {
        if xs.is_empty() {
            return Err(KernelError::ShapeMismatch {
                left: "bilstm".into(),
                right: "empty sequence".into(),
            });
        }
        let h = self.hidden;
        let n = xs.len();

        let mut fwd_steps = Vec::with_capacity(n);
        let mut fh = vec![0.0; h];
        let mut fc = vec![0.0; h];
        let mut fwd_states = Vec::with_capacity(n);
        for x in xs {
            let (hn, cn, cache) = lstm_cell_forward(params, &self.fwd, x, &fh, &fc)?;
            fh = hn.clone();
            fc = cn;
            fwd_states.push(hn);
            fwd_steps.push(cache);
        }

        let mut bwd_steps = Vec::with_capacity(n);
        let mut bh = vec![0.0; h];
        let mut bc = vec![0.0; h];
        let mut bwd_states_rev = Vec::with_capacity(n);
        for x in xs.iter().rev() {
            let (hn, cn, cache) = lstm_cell_forward(params, &self.bwd, x, &bh, &bc)?;
            bh = hn.clone();
            bc = cn;
            bwd_states_rev.push(hn);
            bwd_steps.push(cache);
        }

        let mut states = Vec::with_capacity(n);
        for t in 0..n {
            let mut s = fwd_states[t].clone();
            s.extend_from_slice(&bwd_states_rev[n - 1 - t]);
            states.push(s);
        }

        let mut scores = Vec::with_capacity(n);
        let mut att_pre = Vec::with_capacity(n);
        let mut att_hidden = Vec::with_capacity(n);
        for s in &states {
            let z1 = linear_forward(params, self.att_w1, self.att_b1, s)?;
            let r1 = relu(&z1);
            let e = linear_forward(params, self.att_w2, self.att_b2, &r1)?[0];
            att_pre.push(z1);
            att_hidden.push(r1);
            scores.push(e);
        }
        let weights = softmax(&scores);

        let mut pooled = vec![0.0; 2 * h];
        for (w, s) in weights.iter().zip(&states) {
            for (p, v) in pooled.iter_mut().zip(s) {
                *p += w * v;
            }
        }

        Ok((pooled, BiLstmCache { fwd_steps, bwd_steps, states, att_pre, att_hidden, weights }))
    }

    /// Backward from the pooled-state gradient; returns per-step input grads.
    pub fn backward(
        &self,
        params: &ParamSet,
        cache: &BiLstmCache,
        d_pooled: &[f64],
        grads: &mut Gradients,
    ) -> Vec<Vec<f64>> {
        let h = self.hidden;
        let n = cache.states.len();

        // pooled = sum_t u_t s_t
        let mut d_states: Vec<Vec<f64>> = cache
            .weights
            .iter()
            .map(|&u| d_pooled.iter().map(|d| d * u).collect())
            .collect();
        let du: Vec<f64> = cache
            .states
            .iter()
            .map(|s| s.iter().zip(d_pooled).map(|(a, b)| a * b).sum())
            .collect();

        // softmax jacobian: de_t = u_t (du_t - sum_j u_j du_j)
        let mix: f64 = cache.weights.iter().zip(&du).map(|(u, d)| u * d).sum();
        let de: Vec<f64> = cache.weights.iter().zip(&du).map(|(u, d)| u * (d - mix)).collect();

        for t in 0..n {
            let dr1 = linear_backward(
                params,
                self.att_w2,
                self.att_b2,
                &cache.att_hidden[t],
                &[de[t]],
                grads,
            );
            let dz1 = relu_backward(&cache.att_pre[t], &dr1);
            let ds = linear_backward(params, self.att_w1, self.att_b1, &cache.states[t], &dz1, grads);
            for (a, b) in d_states[t].iter_mut().zip(&ds) {
                *a += b;
            }
        }

        let mut dxs = vec![vec![0.0; self.fwd.input]; n];

        // Forward direction BPTT.
        let mut dh_next = vec![0.0; h];
        let mut dc_next = vec![0.0; h];
        for t in (0..n).rev() {
            let mut dh = dh_next.clone();
            for (a, b) in dh.iter_mut().zip(&d_states[t][0..h]) {
                *a += b;
            }
            let (dx, dh_prev, dc_prev) =
                lstm_cell_backward(params, &self.fwd, &cache.fwd_steps[t], &dh, &dc_next, grads);
            dh_next = dh_prev;
            dc_next = dc_prev;
            for (a, b) in dxs[t].iter_mut().zip(&dx) {
                *a += b;
            }
        }

        // Backward direction BPTT (processing order is reversed time).
        let mut dh_next = vec![0.0; h];
        let mut dc_next = vec![0.0; h];
        for k in (0..n).rev() {
            let t = n - 1 - k; // original index scored by this processing step
            let mut dh = dh_next.clone();
            for (a, b) in dh.iter_mut().zip(&d_states[t][h..2 * h]) {
                *a += b;
            }
            let (dx, dh_prev, dc_prev) =
                lstm_cell_backward(params, &self.bwd, &cache.bwd_steps[k], &dh, &dc_next, grads);
            dh_next = dh_prev;
            dc_next = dc_prev;
            for (a, b) in dxs[t].iter_mut().zip(&dx) {
                *a += b;
            }
        }

        dxs
    }
}
