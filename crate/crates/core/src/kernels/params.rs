//! Named parameter arrays, gradient buffers, and the checkpoint format.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::Rng;

use super::tensor::Tensor2;
use super::KernelError;

/// Checkpoint format version. Bumped on any layout change.
pub const CHECKPOINT_VERSION: u32 = 1;

const CHECKPOINT_MAGIC: &[u8; 4] = b"CCKP";

/// Handle into a [`ParamSet`]. Stable for the lifetime of the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamId(usize);

/// Ordered collection of named parameter tensors.
///
/// Registration order is the canonical order: it fixes initialization draws,
/// Adam state layout, and the checkpoint byte stream. Gradients live in a
/// separate [`Gradients`] buffer with the same layout so a backward pass can
/// read parameters while writing gradients.
#[derive(Debug, Clone)]
pub struct ParamSet {
    names: Vec<String>,
    tensors: Vec<Tensor2>,
    index: BTreeMap<String, usize>,
}

impl ParamSet {
    pub fn new() -> Self {
        ParamSet { names: Vec::new(), tensors: Vec::new(), index: BTreeMap::new() }
    }

    fn push(&mut self, name: &str, t: Tensor2) -> ParamId {
        assert!(!self.index.contains_key(name), "duplicate parameter name {name}");
        let id = self.tensors.len();
        self.index.insert(name.to_string(), id);
        self.names.push(name.to_string());
        self.tensors.push(t);
        ParamId(id)
    }

    /// Weight matrix initialized uniform in (-1/sqrt(fan_in), +1/sqrt(fan_in))
    /// where fan_in is the input width `cols`.
    pub fn add_weight(&mut self, name: &str, rows: usize, cols: usize, rng: &mut impl Rng) -> ParamId {
        let bound = 1.0 / (cols as f64).sqrt();
        let data = (0..rows * cols).map(|_| rng.gen_range(-bound..bound)).collect();
        self.push(name, Tensor2::from_rows(rows, cols, data))
    }

    /// Bias vector initialized to zero.
    pub fn add_bias(&mut self, name: &str, len: usize) -> ParamId {
        self.push(name, Tensor2::zeros(len, 1))
    }

    /// Weight matrix initialized to zero (attention scorers start uniform).
    pub fn add_zero_weight(&mut self, name: &str, rows: usize, cols: usize) -> ParamId {
        self.push(name, Tensor2::zeros(rows, cols))
    }

    /// Overwrites every value with a fresh uniform draw; test support for
    /// gradient checks that must exercise zero-initialized paths.
    pub fn randomize_uniform(&mut self, bound: f64, rng: &mut impl Rng) {
        for t in &mut self.tensors {
            for v in &mut t.data {
                *v = rng.gen_range(-bound..bound);
            }
        }
    }

    /// LSTM bias of length 4*hidden with the forget-gate block set to 1.
    /// Gate order is fixed: [input, forget, cell, output].
    pub fn add_lstm_bias(&mut self, name: &str, hidden: usize) -> ParamId {
        let mut t = Tensor2::zeros(4 * hidden, 1);
        for k in hidden..2 * hidden {
            t.data[k] = 1.0;
        }
        self.push(name, t)
    }

    #[inline]
    pub fn arr(&self, id: ParamId) -> &Tensor2 {
        &self.tensors[id.0]
    }

    #[inline]
    pub fn arr_mut(&mut self, id: ParamId) -> &mut Tensor2 {
        &mut self.tensors[id.0]
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn id_of(&self, name: &str) -> Option<ParamId> {
        self.index.get(name).copied().map(ParamId)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.tensors.len()).map(ParamId)
    }

    pub fn total_values(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    pub fn new_gradients(&self) -> Gradients {
        Gradients {
            tensors: self.tensors.iter().map(|t| Tensor2::zeros(t.rows, t.cols)).collect(),
        }
    }

    /// Serializes all arrays: magic, version, count, then per array the
    /// name (u32 length + UTF-8 bytes), rows (u32), cols (u32), and the
    /// row-major payload as little-endian f64. Bit-exact and versioned.
    pub fn save_checkpoint(&self, w: &mut impl Write) -> Result<(), KernelError> {
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        w.write_all(&(self.tensors.len() as u32).to_le_bytes())?;
        for (name, t) in self.names.iter().zip(&self.tensors) {
            w.write_all(&(name.len() as u32).to_le_bytes())?;
            w.write_all(name.as_bytes())?;
            w.write_all(&(t.rows as u32).to_le_bytes())?;
            w.write_all(&(t.cols as u32).to_le_bytes())?;
            for v in &t.data {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn load_checkpoint(r: &mut impl Read) -> Result<Self, KernelError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(KernelError::CheckpointFormat("bad magic".into()));
        }
        let version = read_u32(r)?;
        if version != CHECKPOINT_VERSION {
            return Err(KernelError::CheckpointFormat(format!(
                "unsupported version {version}, expected {CHECKPOINT_VERSION}"
            )));
        }
        let count = read_u32(r)? as usize;
        let mut set = ParamSet::new();
        for _ in 0..count {
            let name_len = read_u32(r)? as usize;
            let mut name_bytes = vec![0u8; name_len];
            r.read_exact(&mut name_bytes)?;
            let name = String::from_utf8(name_bytes)
                .map_err(|_| KernelError::CheckpointFormat("non-utf8 name".into()))?;
            let rows = read_u32(r)? as usize;
            let cols = read_u32(r)? as usize;
            let mut data = vec![0.0; rows * cols];
            let mut buf = [0u8; 8];
            for v in &mut data {
                r.read_exact(&mut buf)?;
                *v = f64::from_le_bytes(buf);
            }
            set.push(&name, Tensor2::from_rows(rows, cols, data));
        }
        Ok(set)
    }
}

impl Default for ParamSet {
    fn default() -> Self {
        Self::new()
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32, KernelError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Gradient buffers parallel to a [`ParamSet`].
#[derive(Debug, Clone)]
pub struct Gradients {
    tensors: Vec<Tensor2>,
}

impl Gradients {
    #[inline]
    pub fn arr(&self, id: ParamId) -> &Tensor2 {
        &self.tensors[id.0]
    }

    #[inline]
    pub fn arr_mut(&mut self, id: ParamId) -> &mut Tensor2 {
        &mut self.tensors[id.0]
    }

    pub fn zero(&mut self) {
        for t in &mut self.tensors {
            t.fill(0.0);
        }
    }

    /// Scales every gradient, e.g. to turn a batch sum into a mean.
    pub fn scale(&mut self, s: f64) {
        for t in &mut self.tensors {
            t.data.iter_mut().for_each(|v| *v *= s);
        }
    }

    pub(crate) fn tensors(&self) -> &[Tensor2] {
        &self.tensors
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn init_bounds_follow_fan_in() {
        let mut rng = stream(3, "init");
        let mut p = ParamSet::new();
        let id = p.add_weight("w", 8, 16, &mut rng);
        let bound = 1.0 / 4.0;
        assert!(p.arr(id).data.iter().all(|v| v.abs() < bound));
        assert!(p.arr(id).data.iter().any(|v| v.abs() > bound * 0.1));
    }

    #[test]
    fn lstm_bias_has_unit_forget_block() {
        let mut p = ParamSet::new();
        let id = p.add_lstm_bias("b", 3);
        assert_eq!(p.arr(id).data, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn checkpoint_roundtrip_is_bit_exact() {
        let mut rng = stream(9, "init");
        let mut p = ParamSet::new();
        p.add_weight("a", 3, 5, &mut rng);
        p.add_bias("b", 4);
        let mut buf = Vec::new();
        p.save_checkpoint(&mut buf).unwrap();
        let q = ParamSet::load_checkpoint(&mut buf.as_slice()).unwrap();
        let mut buf2 = Vec::new();
        q.save_checkpoint(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
        assert_eq!(p.arr(p.id_of("a").unwrap()).data, q.arr(q.id_of("a").unwrap()).data);
    }

    #[test]
    fn checkpoint_rejects_bad_magic() {
        let err = ParamSet::load_checkpoint(&mut &b"XXXX\0\0\0\0"[..]);
        assert!(matches!(err, Err(KernelError::CheckpointFormat(_))));
    }
}
