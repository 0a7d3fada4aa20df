//! Direct 2-d convolution kernels (forward and backward).
//!
//! The input is copied into a zero-padded scratch buffer once per sample so
//! the inner loops carry no boundary branches. `groups == in_channels`
//! gives a depthwise convolution.

use crate::error::{AutodiffError, Result};

/// Resolved convolution geometry. All shape validation happens here so the
/// kernels below can assume consistent dimensions.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Conv2dSpec {
    pub batch: usize,
    pub in_channels: usize,
    pub in_h: usize,
    pub in_w: usize,
    pub out_channels: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
    pub groups: usize,
    pub out_h: usize,
    pub out_w: usize,
}

impl Conv2dSpec {
    pub fn resolve(
        input: &[usize],
        weight: &[usize],
        bias: &[usize],
        stride: usize,
        padding: usize,
        groups: usize,
    ) -> Result<Self> {
        let err = |msg: String| Err(AutodiffError::Shape(msg));
        let [batch, in_channels, in_h, in_w] = match input {
            &[n, c, h, w] => [n, c, h, w],
            _ => return err(format!("conv2d input must be NCHW, got {input:?}")),
        };
        let [out_channels, w_in, kh, kw] = match weight {
            &[o, i, kh, kw] => [o, i, kh, kw],
            _ => return err(format!("conv2d weight must be OIKK, got {weight:?}")),
        };
        if kh != kw {
            return err(format!("conv2d kernel must be square, got {kh}x{kw}"));
        }
        if stride == 0 || groups == 0 {
            return err(format!(
                "conv2d stride and groups must be positive, got stride={stride} groups={groups}"
            ));
        }
        if in_channels % groups != 0 || out_channels % groups != 0 {
            return err(format!(
                "conv2d channels must divide groups: in={in_channels} out={out_channels} groups={groups}"
            ));
        }
        if w_in != in_channels / groups {
            return err(format!(
                "conv2d weight input-channel dim is {w_in}, expected {} (in={in_channels} / groups={groups})",
                in_channels / groups
            ));
        }
        if bias != [out_channels] {
            return err(format!(
                "conv2d bias shape {bias:?} does not match {out_channels} output channels"
            ));
        }
        if in_h + 2 * padding < kh || in_w + 2 * padding < kh {
            return err(format!(
                "conv2d kernel {kh} exceeds padded input {}x{}",
                in_h + 2 * padding,
                in_w + 2 * padding
            ));
        }
        Ok(Self {
            batch,
            in_channels,
            in_h,
            in_w,
            out_channels,
            kernel: kh,
            stride,
            padding,
            groups,
            out_h: (in_h + 2 * padding - kh) / stride + 1,
            out_w: (in_w + 2 * padding - kw) / stride + 1,
        })
    }

    pub fn output_shape(&self) -> Vec<usize> {
        vec![self.batch, self.out_channels, self.out_h, self.out_w]
    }

    fn padded_dims(&self) -> (usize, usize) {
        (self.in_h + 2 * self.padding, self.in_w + 2 * self.padding)
    }
}

fn pad_sample(s: &Conv2dSpec, sample: &[f64], padded: &mut [f64]) {
    let (hp, wp) = s.padded_dims();
    padded.fill(0.0);
    for c in 0..s.in_channels {
        for y in 0..s.in_h {
            let src = &sample[(c * s.in_h + y) * s.in_w..][..s.in_w];
            let dst = &mut padded[c * hp * wp + (y + s.padding) * wp + s.padding..][..s.in_w];
            dst.copy_from_slice(src);
        }
    }
}

pub(crate) fn forward(s: &Conv2dSpec, input: &[f64], weight: &[f64], bias: &[f64]) -> Vec<f64> {
    let (hp, wp) = s.padded_dims();
    let k = s.kernel;
    let cpg_in = s.in_channels / s.groups;
    let cpg_out = s.out_channels / s.groups;
    let sample_len = s.in_channels * s.in_h * s.in_w;
    let plane = s.out_h * s.out_w;

    let mut padded = vec![0.0; s.in_channels * hp * wp];
    let mut out = vec![0.0; s.batch * s.out_channels * plane];
    for n in 0..s.batch {
        pad_sample(s, &input[n * sample_len..][..sample_len], &mut padded);
        for o in 0..s.out_channels {
            let group = o / cpg_out;
            let w_base = o * cpg_in * k * k;
            let out_plane = &mut out[(n * s.out_channels + o) * plane..][..plane];
            out_plane.fill(bias[o]);
            for icl in 0..cpg_in {
                let ic = group * cpg_in + icl;
                for ky in 0..k {
                    let w_row = &weight[w_base + (icl * k + ky) * k..][..k];
                    for oy in 0..s.out_h {
                        let in_row = &padded[ic * hp * wp + (oy * s.stride + ky) * wp..][..wp];
                        let out_row = &mut out_plane[oy * s.out_w..][..s.out_w];
                        if s.stride == 1 {
                            for (kx, &wv) in w_row.iter().enumerate() {
                                let shifted = &in_row[kx..kx + s.out_w];
                                for (acc, &x) in out_row.iter_mut().zip(shifted) {
                                    *acc += x * wv;
                                }
                            }
                        } else {
                            for (kx, &wv) in w_row.iter().enumerate() {
                                for (ox, acc) in out_row.iter_mut().enumerate() {
                                    *acc += in_row[ox * s.stride + kx] * wv;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Gradients w.r.t. input, weight and bias given the output gradient.
pub(crate) fn backward(
    s: &Conv2dSpec,
    input: &[f64],
    weight: &[f64],
    dout: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (hp, wp) = s.padded_dims();
    let k = s.kernel;
    let cpg_in = s.in_channels / s.groups;
    let cpg_out = s.out_channels / s.groups;
    let sample_len = s.in_channels * s.in_h * s.in_w;
    let plane = s.out_h * s.out_w;

    let mut din = vec![0.0; input.len()];
    let mut dweight = vec![0.0; weight.len()];
    let mut dbias = vec![0.0; s.out_channels];
    let mut padded = vec![0.0; s.in_channels * hp * wp];
    let mut dpadded = vec![0.0; s.in_channels * hp * wp];

    for n in 0..s.batch {
        pad_sample(s, &input[n * sample_len..][..sample_len], &mut padded);
        dpadded.fill(0.0);
        for o in 0..s.out_channels {
            let group = o / cpg_out;
            let w_base = o * cpg_in * k * k;
            let dout_plane = &dout[(n * s.out_channels + o) * plane..][..plane];
            dbias[o] += dout_plane.iter().sum::<f64>();
            for icl in 0..cpg_in {
                let ic = group * cpg_in + icl;
                for ky in 0..k {
                    for oy in 0..s.out_h {
                        let row_off = ic * hp * wp + (oy * s.stride + ky) * wp;
                        let dout_row = &dout_plane[oy * s.out_w..][..s.out_w];
                        for kx in 0..k {
                            let wv = weight[w_base + (icl * k + ky) * k + kx];
                            let mut acc = 0.0;
                            if s.stride == 1 {
                                let in_row = &padded[row_off + kx..][..s.out_w];
                                let dp_row = &mut dpadded[row_off + kx..][..s.out_w];
                                for ((&g, &x), dp) in
                                    dout_row.iter().zip(in_row).zip(dp_row.iter_mut())
                                {
                                    acc += g * x;
                                    *dp += g * wv;
                                }
                            } else {
                                for (ox, &g) in dout_row.iter().enumerate() {
                                    let idx = row_off + ox * s.stride + kx;
                                    acc += g * padded[idx];
                                    dpadded[idx] += g * wv;
                                }
                            }
                            dweight[w_base + (icl * k + ky) * k + kx] += acc;
                        }
                    }
                }
            }
        }
        // crop the padded gradient back onto the sample
        let din_sample = &mut din[n * sample_len..][..sample_len];
        for c in 0..s.in_channels {
            for y in 0..s.in_h {
                let src = &dpadded[c * hp * wp + (y + s.padding) * wp + s.padding..][..s.in_w];
                let dst = &mut din_sample[(c * s.in_h + y) * s.in_w..][..s.in_w];
                for (d, &v) in dst.iter_mut().zip(src) {
                    *d += v;
                }
            }
        }
    }
    (din, dweight, dbias)
}
