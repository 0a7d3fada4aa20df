//! Pooling kernels: max pooling with saved argmax, global average pooling.

use crate::error::{AutodiffError, Result};

pub(crate) struct MaxPoolOut {
    pub out: Vec<f64>,
    /// Flat input index of the maximum for each output element; ties keep
    /// the first element in row-major scan order.
    pub argmax: Vec<usize>,
    pub out_h: usize,
    pub out_w: usize,
}

pub(crate) fn maxpool_forward(
    input: &[f64],
    dims: (usize, usize, usize, usize),
    kernel: usize,
    stride: usize,
) -> Result<MaxPoolOut> {
    let (n, c, h, w) = dims;
    if kernel == 0 || stride == 0 {
        return Err(AutodiffError::Shape(format!(
            "max_pool2d kernel and stride must be positive, got kernel={kernel} stride={stride}"
        )));
    }
    if h < kernel || w < kernel {
        return Err(AutodiffError::Shape(format!(
            "max_pool2d kernel {kernel} exceeds input {h}x{w}"
        )));
    }
    let out_h = (h - kernel) / stride + 1;
    let out_w = (w - kernel) / stride + 1;
    let mut out = vec![0.0; n * c * out_h * out_w];
    let mut argmax = vec![0usize; out.len()];
    for b in 0..n {
        for ch in 0..c {
            let in_base = (b * c + ch) * h * w;
            let out_base = (b * c + ch) * out_h * out_w;
            for oy in 0..out_h {
                for ox in 0..out_w {
                    let mut best = f64::NEG_INFINITY;
                    let mut best_idx = 0;
                    for ky in 0..kernel {
                        let row = in_base + (oy * stride + ky) * w + ox * stride;
                        for kx in 0..kernel {
                            let v = input[row + kx];
                            if v > best {
                                best = v;
                                best_idx = row + kx;
                            }
                        }
                    }
                    out[out_base + oy * out_w + ox] = best;
                    argmax[out_base + oy * out_w + ox] = best_idx;
                }
            }
        }
    }
    Ok(MaxPoolOut {
        out,
        argmax,
        out_h,
        out_w,
    })
}

pub(crate) fn maxpool_backward(dout: &[f64], argmax: &[usize], input_len: usize) -> Vec<f64> {
    let mut din = vec![0.0; input_len];
    for (&g, &idx) in dout.iter().zip(argmax) {
        din[idx] += g;
    }
    din
}

/// NCHW -> NC mean over the spatial dimensions.
pub(crate) fn gap_forward(input: &[f64], dims: (usize, usize, usize, usize)) -> Vec<f64> {
    let (n, c, h, w) = dims;
    let spatial = (h * w) as f64;
    let mut out = vec![0.0; n * c];
    for i in 0..n * c {
        out[i] = input[i * h * w..(i + 1) * h * w].iter().sum::<f64>() / spatial;
    }
    out
}

pub(crate) fn gap_backward(dout: &[f64], dims: (usize, usize, usize, usize)) -> Vec<f64> {
    let (n, c, h, w) = dims;
    let spatial = h * w;
    let inv = 1.0 / spatial as f64;
    let mut din = vec![0.0; n * c * spatial];
    for i in 0..n * c {
        let g = dout[i] * inv;
        for v in &mut din[i * spatial..(i + 1) * spatial] {
            *v = g;
        }
    }
    din
}
