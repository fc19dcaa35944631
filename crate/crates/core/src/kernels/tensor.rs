//! Row-major 2-D arrays and the handful of BLAS-1/2 kernels the models need.

use serde::{Deserialize, Serialize};

/// Dense row-major matrix. A vector is a matrix with `cols == 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor2 {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor2 { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
        Tensor2 { rows, cols, data }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// y += a * x
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// y += W x  (W: rows x cols, x: cols, y: rows)
pub fn matvec_acc(w: &Tensor2, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(w.cols, x.len());
    debug_assert_eq!(w.rows, y.len());
    for (row, yo) in w.data.chunks_exact(w.cols).zip(y.iter_mut()) {
        *yo += dot(row, x);
    }
}

/// dx += W^T dy  (accumulated row-wise so access stays contiguous)
pub fn matvec_t_acc(w: &Tensor2, dy: &[f64], dx: &mut [f64]) {
    debug_assert_eq!(w.rows, dy.len());
    debug_assert_eq!(w.cols, dx.len());
    for (row, &d) in w.data.chunks_exact(w.cols).zip(dy) {
        if d != 0.0 {
            axpy(d, row, dx);
        }
    }
}

/// dW += dy x^T
pub fn outer_acc(dw: &mut Tensor2, dy: &[f64], x: &[f64]) {
    debug_assert_eq!(dw.rows, dy.len());
    debug_assert_eq!(dw.cols, x.len());
    for (row, &d) in dw.data.chunks_exact_mut(dw.cols).zip(dy) {
        if d != 0.0 {
            axpy(d, x, row);
        }
    }
}
