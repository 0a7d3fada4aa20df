//! Per-channel batch normalization kernels.
//!
//! Training mode normalizes by the biased batch variance and updates the
//! running statistics with the unbiased variance; evaluation mode normalizes
//! by the running statistics. This matches the common framework convention.

use crate::error::{AutodiffError, Result};

/// Context saved at forward time for the backward pass.
#[derive(Debug)]
pub(crate) struct BnCtx {
    pub batch: usize,
    pub channels: usize,
    pub spatial: usize,
    /// 1 / sqrt(var + eps) per channel; batch stats in training mode,
    /// running stats in eval mode.
    pub invstd: Vec<f64>,
    /// Normalized input, same layout as the input tensor.
    pub xhat: Vec<f64>,
    pub training: bool,
}

pub(crate) struct BnForward {
    pub out: Vec<f64>,
    pub ctx: BnCtx,
    /// Biased per-channel batch statistics (training mode only).
    pub batch_mean: Vec<f64>,
    pub batch_var: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn forward(
    input: &[f64],
    dims: (usize, usize, usize, usize),
    gamma: &[f64],
    beta: &[f64],
    running_mean: &[f64],
    running_var: &[f64],
    eps: f64,
    training: bool,
) -> Result<BnForward> {
    let (n, c, h, w) = dims;
    let spatial = h * w;
    let per_channel = n * spatial;
    if training && per_channel < 2 {
        return Err(AutodiffError::DegenerateBatch(per_channel));
    }

    let mut out = vec![0.0; input.len()];
    let mut xhat = vec![0.0; input.len()];
    let mut invstd = vec![0.0; c];
    let mut batch_mean = Vec::new();
    let mut batch_var = Vec::new();

    if training {
        batch_mean = vec![0.0; c];
        batch_var = vec![0.0; c];
        for ch in 0..c {
            let mut sum = 0.0;
            for b in 0..n {
                let base = (b * c + ch) * spatial;
                sum += input[base..base + spatial].iter().sum::<f64>();
            }
            let mean = sum / per_channel as f64;
            let mut var_sum = 0.0;
            for b in 0..n {
                let base = (b * c + ch) * spatial;
                for &x in &input[base..base + spatial] {
                    let d = x - mean;
                    var_sum += d * d;
                }
            }
            let var = var_sum / per_channel as f64;
            batch_mean[ch] = mean;
            batch_var[ch] = var;
            invstd[ch] = 1.0 / (var + eps).sqrt();
        }
    } else {
        for ch in 0..c {
            invstd[ch] = 1.0 / (running_var[ch] + eps).sqrt();
        }
    }

    for ch in 0..c {
        let mean = if training {
            batch_mean[ch]
        } else {
            running_mean[ch]
        };
        let istd = invstd[ch];
        let (g, b0) = (gamma[ch], beta[ch]);
        for b in 0..n {
            let base = (b * c + ch) * spatial;
            for i in base..base + spatial {
                let xh = (input[i] - mean) * istd;
                xhat[i] = xh;
                out[i] = g * xh + b0;
            }
        }
    }

    Ok(BnForward {
        out,
        ctx: BnCtx {
            batch: n,
            channels: c,
            spatial,
            invstd,
            xhat,
            training,
        },
        batch_mean,
        batch_var,
    })
}

/// Gradients w.r.t. input, gamma and beta.
pub(crate) fn backward(ctx: &BnCtx, gamma: &[f64], dout: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (n, c, spatial) = (ctx.batch, ctx.channels, ctx.spatial);
    let m = (n * spatial) as f64;
    let mut din = vec![0.0; dout.len()];
    let mut dgamma = vec![0.0; c];
    let mut dbeta = vec![0.0; c];

    for ch in 0..c {
        let mut sum_dy = 0.0;
        let mut sum_dy_xhat = 0.0;
        for b in 0..n {
            let base = (b * c + ch) * spatial;
            for i in base..base + spatial {
                sum_dy += dout[i];
                sum_dy_xhat += dout[i] * ctx.xhat[i];
            }
        }
        dgamma[ch] = sum_dy_xhat;
        dbeta[ch] = sum_dy;

        let scale = gamma[ch] * ctx.invstd[ch];
        if ctx.training {
            // batch statistics participate in the forward value
            let mean_dy = sum_dy / m;
            let mean_dy_xhat = sum_dy_xhat / m;
            for b in 0..n {
                let base = (b * c + ch) * spatial;
                for i in base..base + spatial {
                    din[i] = scale * (dout[i] - mean_dy - ctx.xhat[i] * mean_dy_xhat);
                }
            }
        } else {
            // running statistics are constants
            for b in 0..n {
                let base = (b * c + ch) * spatial;
                for i in base..base + spatial {
                    din[i] = scale * dout[i];
                }
            }
        }
    }
    (din, dgamma, dbeta)
}
