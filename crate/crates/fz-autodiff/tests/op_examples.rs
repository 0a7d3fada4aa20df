//! Worked examples and independent forward oracles for every graph op.

use fz_autodiff::{bce_value, rng, AutodiffError, Graph, Tensor, BCE_EPSILON};
use rand::Rng;

fn random_tensor(shape: &[usize], seed: u64) -> Tensor {
    let mut r = rng::seeded(seed);
    let n: usize = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Direct-summation convolution: six nested loops, no shared code with the
/// engine kernel.
#[allow(clippy::too_many_arguments)]
fn naive_conv2d(
    input: &Tensor,
    weight: &Tensor,
    bias: &[f64],
    stride: usize,
    padding: usize,
    groups: usize,
) -> Vec<f64> {
    let (n, c_in, h, w) = (
        input.shape()[0],
        input.shape()[1],
        input.shape()[2],
        input.shape()[3],
    );
    let (c_out, _, k, _) = (
        weight.shape()[0],
        weight.shape()[1],
        weight.shape()[2],
        weight.shape()[3],
    );
    let cpg_in = c_in / groups;
    let cpg_out = c_out / groups;
    let out_h = (h + 2 * padding - k) / stride + 1;
    let out_w = (w + 2 * padding - k) / stride + 1;
    let mut out = vec![0.0; n * c_out * out_h * out_w];
    for b in 0..n {
        for o in 0..c_out {
            for oy in 0..out_h {
                for ox in 0..out_w {
                    let mut acc = bias[o];
                    for icl in 0..cpg_in {
                        let ic = (o / cpg_out) * cpg_in + icl;
                        for ky in 0..k {
                            for kx in 0..k {
                                let iy = (oy * stride + ky) as isize - padding as isize;
                                let ix = (ox * stride + kx) as isize - padding as isize;
                                if iy >= 0 && ix >= 0 && (iy as usize) < h && (ix as usize) < w {
                                    let xv = input.data()
                                        [((b * c_in + ic) * h + iy as usize) * w + ix as usize];
                                    let wv =
                                        weight.data()[((o * cpg_in + icl) * k + ky) * k + kx];
                                    acc += xv * wv;
                                }
                            }
                        }
                    }
                    out[((b * c_out + o) * out_h + oy) * out_w + ox] = acc;
                }
            }
        }
    }
    out
}

fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs() / 1.0_f64.max(x.abs()).max(y.abs()))
        .fold(0.0, f64::max)
}

#[test]
fn conv2d_identity_1x1_kernel() {
    let mut g = Graph::new();
    let x = random_tensor(&[1, 2, 4, 4], 1);
    let input = g.leaf(x.clone());
    // 1x1 kernel mapping each channel to itself
    let weight = g.leaf(Tensor::new(vec![2, 2, 1, 1], vec![1.0, 0.0, 0.0, 1.0]).unwrap());
    let bias = g.leaf(Tensor::zeros(&[2]));
    let out = g.conv2d(input, weight, bias, 1, 0, 1).unwrap();
    assert_eq!(g.value(out).data(), x.data());
}

#[test]
fn conv2d_all_ones_kernel_sums_window() {
    let mut g = Graph::new();
    let c = 2.5;
    let input = g.leaf(Tensor::filled(&[1, 1, 5, 5], c));
    let weight = g.leaf(Tensor::filled(&[1, 1, 3, 3], 1.0));
    let bias = g.leaf(Tensor::zeros(&[1]));
    let out = g.conv2d(input, weight, bias, 1, 0, 1).unwrap();
    assert_eq!(g.value(out).shape(), &[1, 1, 3, 3]);
    for &v in g.value(out).data() {
        assert!((v - 9.0 * c).abs() < 1e-12);
    }
}

#[test]
fn conv2d_matches_direct_summation_oracle() {
    for (seed, stride, padding, groups, c_in, c_out) in [
        (10u64, 1, 0, 1, 3, 2),
        (11, 1, 1, 1, 3, 2),
        (12, 2, 1, 1, 4, 4),
        (13, 1, 1, 4, 4, 4), // depthwise
        (14, 2, 0, 2, 4, 6),
    ] {
        let input = random_tensor(&[1, c_in, 5, 5], seed);
        let weight = random_tensor(&[c_out, c_in / groups, 3, 3], seed + 100);
        let bias = random_tensor(&[c_out], seed + 200);
        let expected = naive_conv2d(&input, &weight, bias.data(), stride, padding, groups);

        let mut g = Graph::new();
        let (i, w, b) = (g.leaf(input), g.leaf(weight), g.leaf(bias));
        let out = g.conv2d(i, w, b, stride, padding, groups).unwrap();
        assert!(
            max_rel_err(g.value(out).data(), &expected) <= 1e-12,
            "conv mismatch for stride={stride} padding={padding} groups={groups}"
        );
    }
}

#[test]
fn conv2d_rejects_bad_shapes() {
    let mut g = Graph::new();
    let i = g.leaf(Tensor::zeros(&[1, 3, 5, 5]));
    let w = g.leaf(Tensor::zeros(&[2, 2, 3, 3])); // expects in/groups == 3
    let b = g.leaf(Tensor::zeros(&[2]));
    let err = g.conv2d(i, w, b, 1, 0, 1).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("weight input-channel dim"), "got: {msg}");
}

#[test]
fn linear_identity_and_zero_weight() {
    let mut g = Graph::new();
    let x = random_tensor(&[3, 4], 2);
    let input = g.leaf(x.clone());
    let mut eye = vec![0.0; 16];
    for i in 0..4 {
        eye[i * 4 + i] = 1.0;
    }
    let w = g.leaf(Tensor::new(vec![4, 4], eye).unwrap());
    let b = g.leaf(Tensor::zeros(&[4]));
    let out = g.linear(input, w, b).unwrap();
    assert_eq!(g.value(out).data(), x.data());

    let zero_w = g.leaf(Tensor::zeros(&[2, 4]));
    let bias = g.leaf(Tensor::new(vec![2], vec![0.5, -1.5]).unwrap());
    let out = g.linear(input, zero_w, bias).unwrap();
    for row in g.value(out).data().chunks(2) {
        assert_eq!(row, &[0.5, -1.5]);
    }
}

#[test]
fn linear_matches_nested_loop_oracle() {
    let input = random_tensor(&[4, 8], 3);
    let weight = random_tensor(&[3, 8], 4);
    let bias = random_tensor(&[3], 5);
    let mut expected = vec![0.0; 4 * 3];
    for n in 0..4 {
        for o in 0..3 {
            let mut acc = bias.data()[o];
            for f in 0..8 {
                acc += input.data()[n * 8 + f] * weight.data()[o * 8 + f];
            }
            expected[n * 3 + o] = acc;
        }
    }
    let mut g = Graph::new();
    let (i, w, b) = (g.leaf(input), g.leaf(weight), g.leaf(bias));
    let out = g.linear(i, w, b).unwrap();
    assert!(max_rel_err(g.value(out).data(), &expected) <= 1e-12);
}

#[test]
fn activation_values() {
    let mut g = Graph::new();
    let x = g.leaf(Tensor::new(vec![3], vec![-1.0, 2.0, 0.0]).unwrap());
    let r = g.relu(x);
    assert_eq!(g.value(r).data(), &[0.0, 2.0, 0.0]);

    let x = g.leaf(Tensor::new(vec![2], vec![0.0, 3.0_f64.ln()]).unwrap());
    let s = g.sigmoid(x);
    assert!((g.value(s).data()[0] - 0.5).abs() < 1e-15);
    assert!((g.value(s).data()[1] - 0.75).abs() < 1e-15);
}

#[test]
fn batchnorm_two_value_channel() {
    // channel holds {1, 3}: mean 2, biased variance 1, so the outputs are
    // +-1/sqrt(1 + eps)
    let eps = 1e-5;
    let mut g = Graph::new();
    let x = g.leaf(Tensor::new(vec![2, 1, 1, 1], vec![1.0, 3.0]).unwrap());
    let gamma = g.leaf(Tensor::filled(&[1], 1.0));
    let beta = g.leaf(Tensor::zeros(&[1]));
    let mut rm = Tensor::zeros(&[1]);
    let mut rv = Tensor::filled(&[1], 1.0);
    let out = g
        .batchnorm2d(x, gamma, beta, &mut rm, &mut rv, 0.1, eps, true, true)
        .unwrap();
    let expected = 1.0 / (1.0 + eps).sqrt();
    assert!((g.value(out).data()[0] + expected).abs() <= 1e-12);
    assert!((g.value(out).data()[1] - expected).abs() <= 1e-12);
    assert!((g.value(out).data()[1] - 1.0).abs() < 1e-4);
    // running stats moved toward the batch: mean 0.1 * 2, var 0.9 + 0.1 * 2
    assert!((rm.data()[0] - 0.2).abs() < 1e-12);
    assert!((rv.data()[0] - (0.9 + 0.1 * 2.0)).abs() < 1e-12);
}

#[test]
fn batchnorm_eval_is_identity_with_unit_running_stats() {
    let mut g = Graph::new();
    let x = random_tensor(&[2, 3, 4, 4], 6);
    let input = g.leaf(x.clone());
    let gamma = g.leaf(Tensor::filled(&[3], 1.0));
    let beta = g.leaf(Tensor::zeros(&[3]));
    let mut rm = Tensor::zeros(&[3]);
    let mut rv = Tensor::filled(&[3], 1.0);
    let out = g
        .batchnorm2d(input, gamma, beta, &mut rm, &mut rv, 0.1, 1e-5, false, false)
        .unwrap();
    for (&o, &i) in g.value(out).data().iter().zip(x.data()) {
        assert!((o - i).abs() < 1e-4, "eval-mode output strayed: {o} vs {i}");
    }
    // eval mode must never move the running stats
    assert_eq!(rm.data(), &[0.0, 0.0, 0.0]);
}

#[test]
fn batchnorm_training_output_statistics() {
    let x = random_tensor(&[4, 3, 5, 5], 7);
    let eps = 1e-5;
    let mut g = Graph::new();
    let input = g.leaf(x.clone());
    let gamma = g.leaf(Tensor::filled(&[3], 1.0));
    let beta = g.leaf(Tensor::zeros(&[3]));
    let mut rm = Tensor::zeros(&[3]);
    let mut rv = Tensor::filled(&[3], 1.0);
    let out = g
        .batchnorm2d(input, gamma, beta, &mut rm, &mut rv, 0.1, eps, true, true)
        .unwrap();

    let (n, c, h, w) = (4, 3, 5, 5);
    let m = (n * h * w) as f64;
    for ch in 0..c {
        let mut vals = Vec::new();
        for b in 0..n {
            let base = (b * c + ch) * h * w;
            vals.extend_from_slice(&g.value(out).data()[base..base + h * w]);
        }
        let mean = vals.iter().sum::<f64>() / m;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
        assert!(mean.abs() <= 1e-10, "channel {ch} mean {mean}");

        // recompute the input variance to get the exact eps correction
        let mut xs = Vec::new();
        for b in 0..n {
            let base = (b * c + ch) * h * w;
            xs.extend_from_slice(&x.data()[base..base + h * w]);
        }
        let xmean = xs.iter().sum::<f64>() / m;
        let xvar = xs.iter().map(|v| (v - xmean) * (v - xmean)).sum::<f64>() / m;
        let expected = xvar / (xvar + eps);
        assert!(
            (var - expected).abs() <= 1e-10,
            "channel {ch} variance {var}, expected {expected}"
        );
    }
}

#[test]
fn batchnorm_rejects_single_element_channels() {
    let mut g = Graph::new();
    let x = g.leaf(Tensor::zeros(&[1, 2, 1, 1]));
    let gamma = g.leaf(Tensor::filled(&[2], 1.0));
    let beta = g.leaf(Tensor::zeros(&[2]));
    let mut rm = Tensor::zeros(&[2]);
    let mut rv = Tensor::filled(&[2], 1.0);
    let err = g
        .batchnorm2d(x, gamma, beta, &mut rm, &mut rv, 0.1, 1e-5, true, true)
        .unwrap_err();
    assert!(matches!(err, AutodiffError::DegenerateBatch(1)));
}

#[test]
fn dropout_identities() {
    let x = random_tensor(&[100], 8);
    let mut rng = rng::seeded(9);

    let mut g = Graph::new();
    let input = g.leaf(x.clone());
    let out = g.dropout(input, 0.0, true, &mut rng).unwrap();
    assert_eq!(g.value(out).data(), x.data());

    let out = g.dropout(input, 0.9, false, &mut rng).unwrap();
    assert_eq!(g.value(out).data(), x.data());

    assert!(matches!(
        g.dropout(input, 1.0, true, &mut rng),
        Err(AutodiffError::InvalidProbability(_))
    ));
}

#[test]
fn dropout_monte_carlo_statistics() {
    let n = 1_000_000;
    let mut g = Graph::new();
    let input = g.leaf(Tensor::filled(&[n], 1.0));
    let mut rng = rng::seeded(10);
    let out = g.dropout(input, 0.5, true, &mut rng).unwrap();
    let data = g.value(out).data();
    let mean = data.iter().sum::<f64>() / n as f64;
    let zero_frac = data.iter().filter(|&&v| v == 0.0).count() as f64 / n as f64;
    assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    assert!((zero_frac - 0.5).abs() < 0.01, "zero fraction {zero_frac}");
}

#[test]
fn pool_and_merge_basics() {
    let mut g = Graph::new();
    let c = 3.25;
    let input = g.leaf(Tensor::filled(&[2, 3, 4, 4], c));
    let gap = g.global_avg_pool(input).unwrap();
    assert_eq!(g.value(gap).shape(), &[2, 3]);
    for &v in g.value(gap).data() {
        assert!((v - c).abs() < 1e-12);
    }

    let x = random_tensor(&[2, 3, 4, 4], 11);
    let a = g.leaf(x.clone());
    let doubled = g.residual_add(a, a).unwrap();
    for (&d, &v) in g.value(doubled).data().iter().zip(x.data()) {
        assert_eq!(d, 2.0 * v);
    }

    let lhs = g.leaf(random_tensor(&[1, 3, 2, 2], 12));
    let rhs = g.leaf(random_tensor(&[1, 5, 2, 2], 13));
    let cat = g.channel_concat(lhs, rhs).unwrap();
    assert_eq!(g.value(cat).shape(), &[1, 8, 2, 2]);

    let flat = g.flatten(cat).unwrap();
    assert_eq!(g.value(flat).shape(), &[1, 32]);

    let mismatched = g.leaf(Tensor::zeros(&[1, 3, 3, 3]));
    assert!(g.residual_add(a, mismatched).is_err());
}

#[test]
fn max_pool_picks_window_maxima() {
    let mut g = Graph::new();
    let data = vec![
        1.0, 2.0, 5.0, 4.0, //
        3.0, 0.0, -1.0, 2.0, //
        7.0, 1.0, 0.0, 0.5, //
        2.0, 2.0, 0.25, 9.0,
    ];
    let input = g.leaf(Tensor::new(vec![1, 1, 4, 4], data).unwrap());
    let out = g.max_pool2d(input, 2, 2).unwrap();
    assert_eq!(g.value(out).shape(), &[1, 1, 2, 2]);
    assert_eq!(g.value(out).data(), &[3.0, 5.0, 7.0, 9.0]);
}

#[test]
fn backward_sigmoid_at_zero() {
    let mut g = Graph::new();
    let x = g.leaf_requiring_grad(Tensor::scalar(0.0));
    let y = g.sigmoid(x);
    let grads = g.backward(y).unwrap();
    assert!((grads.node(x).unwrap().data()[0] - 0.25).abs() < 1e-15);
}

#[test]
fn backward_requires_scalar() {
    let mut g = Graph::new();
    let x = g.leaf_requiring_grad(Tensor::zeros(&[3]));
    let y = g.relu(x);
    assert!(matches!(
        g.backward(y),
        Err(AutodiffError::NonScalarLoss(_))
    ));
}

#[test]
fn frozen_leaf_receives_no_gradient() {
    use fz_autodiff::Parameter;
    let mut g = Graph::new();
    let mut frozen = Parameter::new("w_frozen", random_tensor(&[4], 14));
    frozen.requires_grad = false;
    let live = Parameter::new("w_live", random_tensor(&[4], 15));

    let fid = g.param(0, &frozen);
    let lid = g.param(1, &live);
    let sum = g.residual_add(fid, lid).unwrap();
    let coeffs = Tensor::filled(&[4], 1.0);
    let loss = g.weighted_sum(sum, &coeffs).unwrap();
    let grads = g.backward(loss).unwrap();

    assert!(grads.node(fid).is_none());
    assert!(grads.node(lid).is_some());
    let touched: Vec<usize> = grads.params().map(|(i, _)| i).collect();
    assert_eq!(touched, vec![1]);

    let mut params = vec![frozen, live];
    grads.accumulate_into(&mut params).unwrap();
    assert!(params[0].grad.is_none());
    assert!(params[1].grad.is_some());
}

#[test]
fn channel_concat_gradient_splits_back() {
    let lhs = random_tensor(&[1, 3, 2, 2], 16);
    let rhs = random_tensor(&[1, 5, 2, 2], 17);
    fz_autodiff::gradcheck::check_gradients(&[lhs, rhs], 1e-5, 1e-4, |g, ids| {
        g.channel_concat(ids[0], ids[1])
    })
    .unwrap();
}

#[test]
fn bce_worked_examples() {
    let mut g = Graph::new();

    // perfect prediction clamps to 1 - eps
    let p = g.leaf(Tensor::scalar(1.0));
    let loss = g.bce_loss(p, &Tensor::scalar(1.0)).unwrap();
    assert!(g.value(loss).data()[0] <= 1e-6);
    assert!(g.value(loss).data()[0] >= 0.0);

    let p = g.leaf(Tensor::scalar(0.5));
    let loss = g.bce_loss(p, &Tensor::scalar(1.0)).unwrap();
    assert!((g.value(loss).data()[0] - 2.0_f64.ln()).abs() < 1e-12);

    // worst case clamps to eps: loss is -ln(eps)
    let p = g.leaf(Tensor::scalar(0.0));
    let loss = g.bce_loss(p, &Tensor::scalar(1.0)).unwrap();
    let expected = -BCE_EPSILON.ln();
    assert!((g.value(loss).data()[0] - expected).abs() < 1e-9);
    assert!((expected - 16.118095650958319).abs() < 1e-9);

    let p = g.leaf(Tensor::scalar(0.5));
    assert!(matches!(
        g.bce_loss(p, &Tensor::scalar(0.25)),
        Err(AutodiffError::NonBinaryTarget(_))
    ));
}

#[test]
fn bce_value_matches_graph_op() {
    let preds = vec![0.1, 0.6, 0.93, 0.5];
    let targets = vec![0.0, 1.0, 1.0, 0.0];
    let plain = bce_value(&preds, &targets);

    let mut g = Graph::new();
    let p = g.leaf(Tensor::new(vec![4], preds).unwrap());
    let loss = g
        .bce_loss(p, &Tensor::new(vec![4], targets).unwrap())
        .unwrap();
    assert_eq!(g.value(loss).data()[0], plain);
    assert!(plain >= 0.0);
}

#[test]
fn gradients_accumulate_until_reset() {
    use fz_autodiff::Parameter;
    let mut params = vec![Parameter::new("w", Tensor::scalar(1.0))];

    for _ in 0..2 {
        let mut g = Graph::new();
        let w = g.param(0, &params[0]);
        let s = g.sigmoid(w);
        let loss = g.weighted_sum(s, &Tensor::scalar(1.0)).unwrap();
        let grads = g.backward(loss).unwrap();
        grads.accumulate_into(&mut params).unwrap();
    }
    let doubled = params[0].grad.as_ref().unwrap().data()[0];

    params[0].zero_grad();
    let mut g = Graph::new();
    let w = g.param(0, &params[0]);
    let s = g.sigmoid(w);
    let loss = g.weighted_sum(s, &Tensor::scalar(1.0)).unwrap();
    g.backward(loss)
        .unwrap()
        .accumulate_into(&mut params)
        .unwrap();
    let single = params[0].grad.as_ref().unwrap().data()[0];

    assert!((doubled - 2.0 * single).abs() < 1e-15);
}
