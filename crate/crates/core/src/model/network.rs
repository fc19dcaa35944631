//! Forward and backward passes shared by all eight variants.
//!
//! Season step k consumes the crop grown in season k-1 (as an embedding)
//! and the RS signal of season k. The RS representation is either the
//! pooled intra-season encoder state (within-season variants) or the raw
//! season-level feature concatenation (InterYE_RS / InterYE_MM), projected
//! by one linear layer before fusion. The between-seasons stack runs over
//! the fused season vectors; the crop-distribution vector, when the variant
//! uses it, joins through two fully connected layers right before the
//! classifier.

use super::sample::{SequenceSample, Stores};
use super::spec::{ModelSpec, Variant};
use super::ModelError;
use crate::kernels::{
    concat, cross_entropy, embed_grad_acc, embed_lookup, linear_backward, linear_forward, relu,
    relu_backward, BiLstmAttention, BiLstmCache, Gradients, ParamId, ParamSet, StackedLstm,
    StackedLstmCache,
};
use crate::rng::stream;

/// Order-free crop history counts: the rotation baseline representation.
pub fn bag_of_crops(history: &[usize], vocab_size: usize) -> Vec<f64> {
    let mut counts = vec![0.0; vocab_size];
    for &c in history {
        counts[c] += 1.0;
    }
    counts
}

pub struct Network {
    pub spec: ModelSpec,
    pub params: ParamSet,
    embed: Option<ParamId>,
    intra: Option<BiLstmAttention>,
    f_rs: Option<(ParamId, ParamId)>,
    inter: Option<StackedLstm>,
    cd_fc1: Option<(ParamId, ParamId)>,
    cd_fc2: Option<(ParamId, ParamId)>,
    out_w: ParamId,
    out_b: ParamId,
}

struct HeadCache {
    step: usize,
    head_in: Vec<f64>,
    cd_concat: Option<Vec<f64>>,
    fc1_pre: Option<Vec<f64>>,
    fc1_act: Option<Vec<f64>>,
    boc: Option<Vec<f64>>,
}

pub struct ForwardCache {
    steps: usize,
    intra_caches: Vec<Option<BiLstmCache>>,
    rs_in: Vec<Option<Vec<f64>>>,
    rs_proj: Vec<Option<Vec<f64>>>,
    xs: Vec<Vec<f64>>,
    inter_cache: Option<StackedLstmCache>,
    inter_tops: Vec<Vec<f64>>,
    heads: Vec<HeadCache>,
    pub logits: Vec<Vec<f64>>,
}

impl ForwardCache {
    /// Attention weights of the intra encoder at a step, when present.
    pub fn attention_weights(&self, step: usize) -> Option<&[f64]> {
        self.intra_caches
            .get(step)
            .and_then(|c| c.as_ref())
            .map(|c| c.weights.as_slice())
    }

    pub fn head_step(&self, idx: usize) -> usize {
        self.heads[idx].step
    }
}

impl Network {
    /// Builds a network with freshly initialized parameters. Registration
    /// order is fixed so a seed fully determines the weights.
    pub fn new(spec: ModelSpec, seed: u64) -> Self {
        let mut rng = stream(seed, "init");
        let mut params = ParamSet::new();
        let v = spec.variant;

        let embed = v
            .uses_crop_rotation()
            .then(|| params.add_weight("embed", spec.vocab_size, spec.embed_dim, &mut rng));

        let intra = (v.uses_remote_sensing() && v.within_season()).then(|| {
            BiLstmAttention::register(
                &mut params,
                "intra",
                spec.rs_window_dim(),
                spec.rnn_dim,
                spec.att_dim,
                &mut rng,
            )
        });

        let f_rs = v.uses_remote_sensing().then(|| {
            let in_dim = if v.within_season() { 2 * spec.rnn_dim } else { spec.rs_concat_dim() };
            let w = params.add_weight("f_rs.w", spec.rs_proj_dim, in_dim, &mut rng);
            let b = params.add_bias("f_rs.b", spec.rs_proj_dim);
            (w, b)
        });

        let inter = v.between_seasons().then(|| {
            let mut in_dim = 0;
            if v.uses_crop_rotation() {
                in_dim += spec.embed_dim;
            }
            if v.uses_remote_sensing() {
                in_dim += spec.rs_proj_dim;
            }
            StackedLstm::register(&mut params, "inter", in_dim, spec.rnn_dim, spec.stacked_lstm, &mut rng)
        });

        let (cd_fc1, cd_fc2) = if v.uses_crop_distribution() {
            let w1 = params.add_weight("cd.fc1.w", spec.rnn_dim, spec.rnn_dim + spec.vocab_size, &mut rng);
            let b1 = params.add_bias("cd.fc1.b", spec.rnn_dim);
            let w2 = params.add_weight("cd.fc2.w", spec.rnn_dim, spec.rnn_dim, &mut rng);
            let b2 = params.add_bias("cd.fc2.b", spec.rnn_dim);
            (Some((w1, b1)), Some((w2, b2)))
        } else {
            (None, None)
        };

        let head_in_dim = Self::head_in_dim(&spec);
        let out_w = params.add_weight("out.w", spec.num_classes, head_in_dim, &mut rng);
        let out_b = params.add_bias("out.b", spec.num_classes);

        let mut net = Network {
            spec,
            params,
            embed,
            intra,
            f_rs,
            inter,
            cd_fc1,
            cd_fc2,
            out_w,
            out_b,
        };
        // Rebind ids through names so `with_params` shares one code path.
        let params = std::mem::take(&mut net.params);
        Self::with_params(net.spec.clone(), params)
    }

    fn head_in_dim(spec: &ModelSpec) -> usize {
        match spec.variant {
            Variant::IntraYeRs => spec.rs_proj_dim,
            Variant::IntraYeMm => spec.embed_dim + spec.rs_proj_dim,
            _ => spec.rnn_dim,
        }
    }

    /// Binds an existing parameter set (e.g. a loaded checkpoint) to a spec.
    pub fn with_params(spec: ModelSpec, params: ParamSet) -> Self {
        let v = spec.variant;
        let id = |name: &str| params.id_of(name).unwrap_or_else(|| panic!("missing param {name}"));

        let embed = v.uses_crop_rotation().then(|| id("embed"));
        let intra = (v.uses_remote_sensing() && v.within_season()).then(|| BiLstmAttention {
            fwd: crate::kernels::LstmCellIds {
                w_x: id("intra.fwd.w_x"),
                w_h: id("intra.fwd.w_h"),
                b: id("intra.fwd.b"),
                input: spec.rs_window_dim(),
                hidden: spec.rnn_dim,
            },
            bwd: crate::kernels::LstmCellIds {
                w_x: id("intra.bwd.w_x"),
                w_h: id("intra.bwd.w_h"),
                b: id("intra.bwd.b"),
                input: spec.rs_window_dim(),
                hidden: spec.rnn_dim,
            },
            att_w1: id("intra.att.w1"),
            att_b1: id("intra.att.b1"),
            att_w2: id("intra.att.w2"),
            att_b2: id("intra.att.b2"),
            hidden: spec.rnn_dim,
            att_dim: spec.att_dim,
        });
        let f_rs = v.uses_remote_sensing().then(|| (id("f_rs.w"), id("f_rs.b")));
        let inter = v.between_seasons().then(|| {
            let mut in_dim = 0;
            if v.uses_crop_rotation() {
                in_dim += spec.embed_dim;
            }
            if v.uses_remote_sensing() {
                in_dim += spec.rs_proj_dim;
            }
            StackedLstm {
                layers: (0..spec.stacked_lstm)
                    .map(|l| crate::kernels::LstmCellIds {
                        w_x: id(&format!("inter.l{l}.w_x")),
                        w_h: id(&format!("inter.l{l}.w_h")),
                        b: id(&format!("inter.l{l}.b")),
                        input: if l == 0 { in_dim } else { spec.rnn_dim },
                        hidden: spec.rnn_dim,
                    })
                    .collect(),
            }
        });
        let (cd_fc1, cd_fc2) = if v.uses_crop_distribution() {
            (
                Some((id("cd.fc1.w"), id("cd.fc1.b"))),
                Some((id("cd.fc2.w"), id("cd.fc2.b"))),
            )
        } else {
            (None, None)
        };
        let out_w = id("out.w");
        let out_b = id("out.b");
        Network { spec, params, embed, intra, f_rs, inter, cd_fc1, cd_fc2, out_w, out_b }
    }

    fn missing(&self, modality: &str) -> ModelError {
        ModelError::MissingModality {
            variant: self.spec.variant.name().into(),
            modality: modality.into(),
        }
    }

    /// Position inside the `[variable][window][functional]` layout for this
    /// spec's window count.
    #[inline]
    fn feat_idx(&self, var: usize, window: usize, functional: usize) -> usize {
        (var * self.spec.windows + window) * crate::features::FUNCTIONALS_PER_WINDOW + functional
    }

    /// RS feature vector of one window, or zeros when the season has no RS.
    fn window_input(&self, stores: &Stores, rs_row: Option<usize>, w: usize) -> Vec<f64> {
        match rs_row {
            Some(r) => {
                let row = stores.rs.row(r);
                let mut out = Vec::with_capacity(self.spec.rs_window_dim());
                for var in 0..self.spec.n_vars {
                    for f in 0..crate::features::FUNCTIONALS_PER_WINDOW {
                        out.push(row[self.feat_idx(var, w, f)]);
                    }
                }
                out
            }
            None => vec![0.0; self.spec.rs_window_dim()],
        }
    }

    /// Season-level concatenated features with windows past the cutoff
    /// zeroed, matching the truncation the sequence encoders see.
    fn concat_input(&self, stores: &Stores, rs_row: Option<usize>, cutoff: usize) -> Vec<f64> {
        let mut v = match rs_row {
            Some(r) => stores.rs.row(r).to_vec(),
            None => vec![0.0; self.spec.rs_concat_dim()],
        };
        for var in 0..self.spec.n_vars {
            for w in cutoff..self.spec.windows {
                for f in 0..crate::features::FUNCTIONALS_PER_WINDOW {
                    v[self.feat_idx(var, w, f)] = 0.0;
                }
            }
        }
        v
    }

    /// Runs the network up to the last step in `head_steps`, producing
    /// logits for each of those steps. `cutoff` is the number of RS windows
    /// visible (10..=windows during augmented training, `windows` otherwise).
    pub fn forward(
        &self,
        sample: &SequenceSample,
        stores: &Stores,
        cutoff: usize,
        head_steps: &[usize],
    ) -> Result<ForwardCache, ModelError> {
        let spec = &self.spec;
        let v = spec.variant;
        if sample.seasons.is_empty() {
            return Err(ModelError::EmptySample);
        }
        if cutoff == 0 || cutoff > spec.windows {
            return Err(ModelError::BadCutoff { got: cutoff, max: spec.windows });
        }
        let last_step = *head_steps.iter().max().ok_or(ModelError::NoTargets)?;
        let steps = last_step + 1;

        let mut cache = ForwardCache {
            steps,
            intra_caches: (0..steps).map(|_| None).collect(),
            rs_in: vec![None; steps],
            rs_proj: vec![None; steps],
            xs: Vec::new(),
            inter_cache: None,
            inter_tops: Vec::new(),
            heads: Vec::new(),
            logits: Vec::new(),
        };

        // RS path per step: within-season encoding or raw concatenation.
        let rs_steps: Vec<usize> =
            if v.between_seasons() { (0..steps).collect() } else { head_steps.to_vec() };
        if v.uses_remote_sensing() {
            let (w_rs, b_rs) = self.f_rs.unwrap();
            for &step in &rs_steps {
                let rs_row = sample.seasons[step].rs_row;
                let rs_in = if v.within_season() {
                    let windows: Vec<Vec<f64>> =
                        (0..cutoff).map(|w| self.window_input(stores, rs_row, w)).collect();
                    let (pooled, c) = self.intra.as_ref().unwrap().forward(&self.params, &windows)?;
                    cache.intra_caches[step] = Some(c);
                    pooled
                } else {
                    self.concat_input(stores, rs_row, cutoff)
                };
                let proj = linear_forward(&self.params, w_rs, b_rs, &rs_in)?;
                cache.rs_in[step] = Some(rs_in);
                cache.rs_proj[step] = Some(proj);
            }
        }

        // Between-seasons recurrence over fused season vectors.
        if v.between_seasons() {
            let mut xs = Vec::with_capacity(steps);
            for step in 0..steps {
                let mut parts: Vec<&[f64]> = Vec::with_capacity(2);
                let emb = if v.uses_crop_rotation() {
                    let crop = sample.seasons[step]
                        .prev_crop
                        .ok_or_else(|| self.missing("crop rotation"))?;
                    Some(embed_lookup(&self.params, self.embed.unwrap(), crop)?.to_vec())
                } else {
                    None
                };
                if let Some(e) = &emb {
                    parts.push(e);
                }
                if let Some(r) = &cache.rs_proj[step] {
                    parts.push(r);
                }
                xs.push(concat(&parts));
            }
            let (tops, inter_cache) = self.inter.as_ref().unwrap().forward_seq(&self.params, &xs)?;
            cache.xs = xs;
            cache.inter_tops = tops;
            cache.inter_cache = Some(inter_cache);
        }

        // Prediction heads.
        for &step in head_steps {
            let mut head = HeadCache {
                step,
                head_in: Vec::new(),
                cd_concat: None,
                fc1_pre: None,
                fc1_act: None,
                boc: None,
            };
            head.head_in = match v {
                Variant::IntraYeRs => cache.rs_proj[step].clone().unwrap(),
                Variant::IntraYeMm => {
                    let history: Vec<usize> = sample.seasons[..=step]
                        .iter()
                        .filter_map(|s| s.prev_crop)
                        .collect();
                    if history.is_empty() {
                        return Err(self.missing("crop rotation"));
                    }
                    let counts = bag_of_crops(&history, spec.vocab_size);
                    // Embedding of the bag: counts-weighted sum of rows.
                    let table = self.params.arr(self.embed.unwrap());
                    let mut boc_emb = vec![0.0; spec.embed_dim];
                    for (c, &n) in counts.iter().enumerate() {
                        if n != 0.0 {
                            for (o, t) in boc_emb.iter_mut().zip(table.row(c)) {
                                *o += n * t;
                            }
                        }
                    }
                    head.boc = Some(counts);
                    concat(&[&boc_emb, cache.rs_proj[step].as_ref().unwrap()])
                }
                Variant::HierEFinal => {
                    let cd_row = sample.cd_row.ok_or_else(|| self.missing("crop distribution"))?;
                    let cd_concat = concat(&[&cache.inter_tops[step], stores.cd.row(cd_row)]);
                    let (w1, b1) = self.cd_fc1.unwrap();
                    let (w2, b2) = self.cd_fc2.unwrap();
                    let fc1_pre = linear_forward(&self.params, w1, b1, &cd_concat)?;
                    let fc1_act = relu(&fc1_pre);
                    let fused = linear_forward(&self.params, w2, b2, &fc1_act)?;
                    head.cd_concat = Some(cd_concat);
                    head.fc1_pre = Some(fc1_pre);
                    head.fc1_act = Some(fc1_act);
                    fused
                }
                _ => cache.inter_tops[step].clone(),
            };
            let logits = linear_forward(&self.params, self.out_w, self.out_b, &head.head_in)?;
            cache.heads.push(head);
            cache.logits.push(logits);
        }

        Ok(cache)
    }

    /// Backpropagates `d_logits` (one vector per head, in head order).
    pub fn backward(
        &self,
        sample: &SequenceSample,
        stores: &Stores,
        cache: &ForwardCache,
        d_logits: &[Vec<f64>],
        grads: &mut Gradients,
    ) {
        let spec = &self.spec;
        let v = spec.variant;
        assert_eq!(d_logits.len(), cache.heads.len());

        let mut d_tops = vec![vec![0.0; spec.rnn_dim]; cache.steps];
        // Per-step RS gradient, accumulated across heads for intra variants.
        let mut d_rs_proj: Vec<Option<Vec<f64>>> = vec![None; cache.steps];

        for (head, dl) in cache.heads.iter().zip(d_logits) {
            let d_head_in =
                linear_backward(&self.params, self.out_w, self.out_b, &head.head_in, dl, grads);
            match v {
                Variant::IntraYeRs => {
                    acc_opt(&mut d_rs_proj[head.step], &d_head_in);
                }
                Variant::IntraYeMm => {
                    let (d_boc, d_rs) = d_head_in.split_at(spec.embed_dim);
                    let counts = head.boc.as_ref().unwrap();
                    for (c, &n) in counts.iter().enumerate() {
                        if n != 0.0 {
                            let scaled: Vec<f64> = d_boc.iter().map(|d| d * n).collect();
                            embed_grad_acc(grads, self.embed.unwrap(), c, &scaled);
                        }
                    }
                    acc_opt(&mut d_rs_proj[head.step], d_rs);
                }
                Variant::HierEFinal => {
                    let (w1, b1) = self.cd_fc1.unwrap();
                    let (w2, b2) = self.cd_fc2.unwrap();
                    let d_fc1_act = linear_backward(
                        &self.params,
                        w2,
                        b2,
                        head.fc1_act.as_ref().unwrap(),
                        &d_head_in,
                        grads,
                    );
                    let d_fc1_pre = relu_backward(head.fc1_pre.as_ref().unwrap(), &d_fc1_act);
                    let d_concat = linear_backward(
                        &self.params,
                        w1,
                        b1,
                        head.cd_concat.as_ref().unwrap(),
                        &d_fc1_pre,
                        grads,
                    );
                    // The distribution vector is an input; only the state
                    // slice propagates.
                    for (a, b) in d_tops[head.step].iter_mut().zip(&d_concat[..spec.rnn_dim]) {
                        *a += b;
                    }
                }
                _ => {
                    for (a, b) in d_tops[head.step].iter_mut().zip(&d_head_in) {
                        *a += b;
                    }
                }
            }
        }

        if v.between_seasons() {
            let dxs = self.inter.as_ref().unwrap().backward_seq(
                &self.params,
                cache.inter_cache.as_ref().unwrap(),
                &d_tops,
                grads,
            );
            for (step, dx) in dxs.iter().enumerate() {
                let mut offset = 0;
                if v.uses_crop_rotation() {
                    let crop = sample.seasons[step].prev_crop.unwrap();
                    embed_grad_acc(grads, self.embed.unwrap(), crop, &dx[..spec.embed_dim]);
                    offset = spec.embed_dim;
                }
                if v.uses_remote_sensing() {
                    acc_opt(&mut d_rs_proj[step], &dx[offset..offset + spec.rs_proj_dim]);
                }
            }
        }

        // RS projection and intra encoder, wherever gradient arrived.
        if v.uses_remote_sensing() {
            let (w_rs, b_rs) = self.f_rs.unwrap();
            for step in 0..cache.steps {
                if let Some(d_proj) = &d_rs_proj[step] {
                    let rs_in = cache.rs_in[step].as_ref().unwrap();
                    let d_rs_in =
                        linear_backward(&self.params, w_rs, b_rs, rs_in, d_proj, grads);
                    if v.within_season() {
                        self.intra.as_ref().unwrap().backward(
                            &self.params,
                            cache.intra_caches[step].as_ref().unwrap(),
                            &d_rs_in,
                            grads,
                        );
                    }
                }
            }
        }
        let _ = stores;
    }

    /// Sum of cross-entropy losses at the sample's supervised steps, with
    /// gradients scaled by `scale` accumulated into `grads`.
    pub fn train_step(
        &self,
        sample: &SequenceSample,
        stores: &Stores,
        cutoff: usize,
        grads: &mut Gradients,
        scale: f64,
    ) -> Result<(f64, usize), ModelError> {
        if sample.targets.is_empty() {
            return Err(ModelError::NoTargets);
        }
        let head_steps: Vec<usize> = sample.targets.iter().map(|(s, _)| *s).collect();
        let cache = self.forward(sample, stores, cutoff, &head_steps)?;
        let mut total = 0.0;
        let mut d_logits = Vec::with_capacity(cache.logits.len());
        for (logits, (_, class)) in cache.logits.iter().zip(&sample.targets) {
            let (loss, mut grad) = cross_entropy(logits, *class);
            total += loss;
            grad.iter_mut().for_each(|g| *g *= scale);
            d_logits.push(grad);
        }
        self.backward(sample, stores, &cache, &d_logits, grads);
        Ok((total, sample.targets.len()))
    }

    /// Logits for the sample's final step.
    pub fn predict_logits(
        &self,
        sample: &SequenceSample,
        stores: &Stores,
        cutoff: usize,
    ) -> Result<Vec<f64>, ModelError> {
        let step = sample.final_step();
        let cache = self.forward(sample, stores, cutoff, &[step])?;
        Ok(cache.logits.into_iter().next().unwrap())
    }

    /// Argmax class for the sample's final step.
    pub fn predict_class(
        &self,
        sample: &SequenceSample,
        stores: &Stores,
        cutoff: usize,
    ) -> Result<usize, ModelError> {
        let logits = self.predict_logits(sample, stores, cutoff)?;
        Ok(argmax(&logits))
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn acc_opt(slot: &mut Option<Vec<f64>>, d: &[f64]) {
    match slot {
        Some(acc) => {
            for (a, b) in acc.iter_mut().zip(d) {
                *a += b;
            }
        }
        None => *slot = Some(d.to_vec()),
    }
}
