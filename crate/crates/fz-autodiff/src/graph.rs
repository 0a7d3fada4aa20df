//! Recorded computation graph and the reverse pass.
//!
//! A [`Graph`] is built fresh for every forward pass. Operations validate
//! shapes, compute eagerly, and push a node holding the result plus whatever
//! context the backward rule needs. [`Graph::backward`] walks the nodes in
//! reverse creation order (which is a valid topological order because every
//! operand precedes its consumer) and accumulates gradients into leaves.

use rand::Rng;

use crate::conv::{self, Conv2dSpec};
use crate::error::{AutodiffError, Result};
use crate::norm::{self, BnCtx};
use crate::param::Parameter;
use crate::pool;
use crate::tensor::Tensor;

/// Predictions are clamped to `[BCE_EPSILON, 1 - BCE_EPSILON]` inside the
/// binary cross-entropy loss so log(0) can never occur.
pub const BCE_EPSILON: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

enum Op {
    Leaf,
    Conv2d {
        input: NodeId,
        weight: NodeId,
        bias: NodeId,
        spec: Conv2dSpec,
    },
    Linear {
        input: NodeId,
        weight: NodeId,
        bias: NodeId,
    },
    Relu {
        input: NodeId,
    },
    Sigmoid {
        input: NodeId,
    },
    BatchNorm {
        input: NodeId,
        gamma: NodeId,
        beta: NodeId,
        ctx: Box<BnCtx>,
    },
    Dropout {
        input: NodeId,
        /// Per-element multiplier: 0 for dropped, 1/(1-p) for kept.
        mask: Box<[f64]>,
    },
    MaxPool {
        input: NodeId,
        argmax: Box<[usize]>,
    },
    GlobalAvgPool {
        input: NodeId,
    },
    ResidualAdd {
        lhs: NodeId,
        rhs: NodeId,
    },
    ChannelConcat {
        lhs: NodeId,
        rhs: NodeId,
    },
    Flatten {
        input: NodeId,
    },
    WeightedSum {
        input: NodeId,
        coeffs: Tensor,
    },
    BceLoss {
        pred: NodeId,
        target: Tensor,
    },
}

struct Node {
    value: Tensor,
    needs_grad: bool,
    op: Op,
}

/// Gradients produced by a backward pass. Leaf gradients are retained;
/// intermediate gradients are dropped as soon as they have been consumed.
pub struct Gradients {
    by_node: Vec<Option<Tensor>>,
    param_nodes: Vec<(NodeId, usize)>,
}

impl Gradients {
    pub fn node(&self, id: NodeId) -> Option<&Tensor> {
        self.by_node.get(id.0).and_then(|g| g.as_ref())
    }

    /// Gradients of parameter leaves, as `(parameter index, gradient)`.
    /// Frozen parameters never appear here.
    pub fn params(&self) -> impl Iterator<Item = (usize, &Tensor)> {
        self.param_nodes
            .iter()
            .filter_map(move |&(node, idx)| self.by_node[node.0].as_ref().map(|g| (idx, g)))
    }

    /// Accumulates parameter gradients into their grad slots.
    pub fn accumulate_into(&self, params: &mut [Parameter]) -> Result<()> {
        for (idx, grad) in self.params() {
            let p = params.get_mut(idx).ok_or_else(|| {
                AutodiffError::State(format!("parameter index {idx} out of range"))
            })?;
            if p.requires_grad {
                p.accumulate_grad(grad)?;
            }
        }
        Ok(())
    }
}

#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
    param_nodes: Vec<(NodeId, usize)>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self, id: NodeId) -> &Tensor {
        &self.nodes[id.0].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, needs_grad: bool, op: Op) -> NodeId {
        self.nodes.push(Node {
            value,
            needs_grad,
            op,
        });
        NodeId(self.nodes.len() - 1)
    }

    fn needs(&self, id: NodeId) -> bool {
        self.nodes[id.0].needs_grad
    }

    /// Constant leaf; no gradient is computed for it.
    pub fn leaf(&mut self, value: Tensor) -> NodeId {
        self.push(value, false, Op::Leaf)
    }

    /// Leaf whose gradient is wanted (inputs under test, loss probes).
    pub fn leaf_requiring_grad(&mut self, value: Tensor) -> NodeId {
        self.push(value, true, Op::Leaf)
    }

    /// Leaf bound to a model parameter. The tensor value is copied into the
    /// graph; `index` identifies the parameter for gradient write-back.
    pub fn param(&mut self, index: usize, p: &Parameter) -> NodeId {
        let id = self.push(p.value.clone(), p.requires_grad, Op::Leaf);
        if p.requires_grad {
            self.param_nodes.push((id, index));
        }
        id
    }

    pub fn conv2d(
        &mut self,
        input: NodeId,
        weight: NodeId,
        bias: NodeId,
        stride: usize,
        padding: usize,
        groups: usize,
    ) -> Result<NodeId> {
        let spec = Conv2dSpec::resolve(
            self.value(input).shape(),
            self.value(weight).shape(),
            self.value(bias).shape(),
            stride,
            padding,
            groups,
        )?;
        let out = conv::forward(
            &spec,
            self.value(input).data(),
            self.value(weight).data(),
            self.value(bias).data(),
        );
        let value = Tensor::new(spec.output_shape(), out)?;
        let needs = self.needs(input) || self.needs(weight) || self.needs(bias);
        Ok(self.push(
            value,
            needs,
            Op::Conv2d {
                input,
                weight,
                bias,
                spec,
            },
        ))
    }

    /// `out = input * weight^T + bias` with input `[N, F]`, weight `[O, F]`.
    pub fn linear(&mut self, input: NodeId, weight: NodeId, bias: NodeId) -> Result<NodeId> {
        let (n, f) = self.value(input).dims2()?;
        let (o, f2) = self.value(weight).dims2()?;
        let b = self.value(bias).dims1()?;
        if f != f2 {
            return Err(AutodiffError::Shape(format!(
                "linear input features {f} do not match weight features {f2}"
            )));
        }
        if b != o {
            return Err(AutodiffError::Shape(format!(
                "linear bias length {b} does not match {o} outputs"
            )));
        }
        let x = self.value(input).data();
        let w = self.value(weight).data();
        let bv = self.value(bias).data();
        let mut out = vec![0.0; n * o];
        for row in 0..n {
            let xr = &x[row * f..(row + 1) * f];
            let or = &mut out[row * o..(row + 1) * o];
            for (j, acc) in or.iter_mut().enumerate() {
                let wr = &w[j * f..(j + 1) * f];
                let mut s = bv[j];
                for (xv, wv) in xr.iter().zip(wr) {
                    s += xv * wv;
                }
                *acc = s;
            }
        }
        let value = Tensor::new(vec![n, o], out)?;
        let needs = self.needs(input) || self.needs(weight) || self.needs(bias);
        Ok(self.push(
            value,
            needs,
            Op::Linear {
                input,
                weight,
                bias,
            },
        ))
    }

    pub fn relu(&mut self, input: NodeId) -> NodeId {
        let value = Tensor::new(
            self.value(input).shape().to_vec(),
            self.value(input).data().iter().map(|&x| x.max(0.0)).collect(),
        )
        .expect("relu preserves shape");
        let needs = self.needs(input);
        self.push(value, needs, Op::Relu { input })
    }

    pub fn sigmoid(&mut self, input: NodeId) -> NodeId {
        let value = Tensor::new(
            self.value(input).shape().to_vec(),
            self.value(input)
                .data()
                .iter()
                .map(|&x| 1.0 / (1.0 + (-x).exp()))
                .collect(),
        )
        .expect("sigmoid preserves shape");
        let needs = self.needs(input);
        self.push(value, needs, Op::Sigmoid { input })
    }

    /// Batch normalization over NCHW input with per-channel gamma/beta.
    ///
    /// In training mode the batch statistics normalize the input and, when
    /// `update_running_stats` is set, the running buffers are updated in
    /// place with `momentum`. A frozen layer passes `false` to leave them
    /// untouched. Eval mode normalizes by the running buffers.
    #[allow(clippy::too_many_arguments)]
    pub fn batchnorm2d(
        &mut self,
        input: NodeId,
        gamma: NodeId,
        beta: NodeId,
        running_mean: &mut Tensor,
        running_var: &mut Tensor,
        momentum: f64,
        eps: f64,
        training: bool,
        update_running_stats: bool,
    ) -> Result<NodeId> {
        let dims = self.value(input).dims4()?;
        let c = dims.1;
        for (name, t) in [
            ("gamma", gamma),
            ("beta", beta),
        ] {
            if self.value(t).shape() != [c] {
                return Err(AutodiffError::Shape(format!(
                    "batchnorm {name} shape {:?} does not match {c} channels",
                    self.value(t).shape()
                )));
            }
        }
        if running_mean.shape() != [c] || running_var.shape() != [c] {
            return Err(AutodiffError::Shape(format!(
                "batchnorm running stats must have shape [{c}], got {:?} and {:?}",
                running_mean.shape(),
                running_var.shape()
            )));
        }
        let fwd = norm::forward(
            self.value(input).data(),
            dims,
            self.value(gamma).data(),
            self.value(beta).data(),
            running_mean.data(),
            running_var.data(),
            eps,
            training,
        )?;
        if training && update_running_stats {
            let m = (dims.0 * dims.2 * dims.3) as f64;
            let unbias = m / (m - 1.0);
            for ch in 0..c {
                let rm = &mut running_mean.data_mut()[ch];
                *rm = (1.0 - momentum) * *rm + momentum * fwd.batch_mean[ch];
                let rv = &mut running_var.data_mut()[ch];
                *rv = (1.0 - momentum) * *rv + momentum * fwd.batch_var[ch] * unbias;
            }
        }
        let value = Tensor::new(self.value(input).shape().to_vec(), fwd.out)?;
        let needs = self.needs(input) || self.needs(gamma) || self.needs(beta);
        Ok(self.push(
            value,
            needs,
            Op::BatchNorm {
                input,
                gamma,
                beta,
                ctx: Box::new(fwd.ctx),
            },
        ))
    }

    /// Inverted dropout: each element is zeroed with probability `p` during
    /// training and survivors are scaled by `1/(1-p)`, so eval mode is the
    /// exact identity.
    pub fn dropout<R: Rng>(
        &mut self,
        input: NodeId,
        p: f64,
        training: bool,
        rng: &mut R,
    ) -> Result<NodeId> {
        if !(0.0..1.0).contains(&p) {
            return Err(AutodiffError::InvalidProbability(p));
        }
        if !training || p == 0.0 {
            let value = self.value(input).clone();
            let needs = self.needs(input);
            let mask = vec![1.0; value.numel()].into_boxed_slice();
            return Ok(self.push(value, needs, Op::Dropout { input, mask }));
        }
        let scale = 1.0 / (1.0 - p);
        let mask: Vec<f64> = (0..self.value(input).numel())
            .map(|_| if rng.gen::<f64>() < p { 0.0 } else { scale })
            .collect();
        let data: Vec<f64> = self
            .value(input)
            .data()
            .iter()
            .zip(&mask)
            .map(|(&x, &m)| x * m)
            .collect();
        let value = Tensor::new(self.value(input).shape().to_vec(), data)?;
        let needs = self.needs(input);
        Ok(self.push(
            value,
            needs,
            Op::Dropout {
                input,
                mask: mask.into_boxed_slice(),
            },
        ))
    }

    pub fn max_pool2d(&mut self, input: NodeId, kernel: usize, stride: usize) -> Result<NodeId> {
        let dims = self.value(input).dims4()?;
        let pooled = pool::maxpool_forward(self.value(input).data(), dims, kernel, stride)?;
        let value = Tensor::new(vec![dims.0, dims.1, pooled.out_h, pooled.out_w], pooled.out)?;
        let needs = self.needs(input);
        Ok(self.push(
            value,
            needs,
            Op::MaxPool {
                input,
                argmax: pooled.argmax.into_boxed_slice(),
            },
        ))
    }

    /// NCHW -> NC spatial mean.
    pub fn global_avg_pool(&mut self, input: NodeId) -> Result<NodeId> {
        let dims = self.value(input).dims4()?;
        let out = pool::gap_forward(self.value(input).data(), dims);
        let value = Tensor::new(vec![dims.0, dims.1], out)?;
        let needs = self.needs(input);
        Ok(self.push(value, needs, Op::GlobalAvgPool { input }))
    }

    pub fn residual_add(&mut self, lhs: NodeId, rhs: NodeId) -> Result<NodeId> {
        if self.value(lhs).shape() != self.value(rhs).shape() {
            return Err(AutodiffError::Shape(format!(
                "residual_add operands differ: {:?} vs {:?}",
                self.value(lhs).shape(),
                self.value(rhs).shape()
            )));
        }
        let data: Vec<f64> = self
            .value(lhs)
            .data()
            .iter()
            .zip(self.value(rhs).data())
            .map(|(&a, &b)| a + b)
            .collect();
        let value = Tensor::new(self.value(lhs).shape().to_vec(), data)?;
        let needs = self.needs(lhs) || self.needs(rhs);
        Ok(self.push(value, needs, Op::ResidualAdd { lhs, rhs }))
    }

    /// Concatenates two NCHW tensors along the channel axis.
    pub fn channel_concat(&mut self, lhs: NodeId, rhs: NodeId) -> Result<NodeId> {
        let (n1, c1, h1, w1) = self.value(lhs).dims4()?;
        let (n2, c2, h2, w2) = self.value(rhs).dims4()?;
        if (n1, h1, w1) != (n2, h2, w2) {
            return Err(AutodiffError::Shape(format!(
                "channel_concat needs matching N,H,W: {:?} vs {:?}",
                self.value(lhs).shape(),
                self.value(rhs).shape()
            )));
        }
        let spatial = h1 * w1;
        let mut data = Vec::with_capacity(n1 * (c1 + c2) * spatial);
        for b in 0..n1 {
            data.extend_from_slice(
                &self.value(lhs).data()[b * c1 * spatial..(b + 1) * c1 * spatial],
            );
            data.extend_from_slice(
                &self.value(rhs).data()[b * c2 * spatial..(b + 1) * c2 * spatial],
            );
        }
        let value = Tensor::new(vec![n1, c1 + c2, h1, w1], data)?;
        let needs = self.needs(lhs) || self.needs(rhs);
        Ok(self.push(value, needs, Op::ChannelConcat { lhs, rhs }))
    }

    /// Collapses all dimensions after the first: `[N, ...] -> [N, F]`.
    pub fn flatten(&mut self, input: NodeId) -> Result<NodeId> {
        let shape = self.value(input).shape();
        if shape.len() < 2 {
            return Err(AutodiffError::Shape(format!(
                "flatten needs rank >= 2, got {shape:?}"
            )));
        }
        let n = shape[0];
        let rest: usize = shape[1..].iter().product();
        let value = Tensor::new(vec![n, rest], self.value(input).data().to_vec())?;
        let needs = self.needs(input);
        Ok(self.push(value, needs, Op::Flatten { input }))
    }

    /// Scalar `sum(input * coeffs)`; the reduction used to build test losses.
    pub fn weighted_sum(&mut self, input: NodeId, coeffs: &Tensor) -> Result<NodeId> {
        if coeffs.shape() != self.value(input).shape() {
            return Err(AutodiffError::Shape(format!(
                "weighted_sum coefficients {:?} do not match input {:?}",
                coeffs.shape(),
                self.value(input).shape()
            )));
        }
        let s: f64 = self
            .value(input)
            .data()
            .iter()
            .zip(coeffs.data())
            .map(|(&x, &c)| x * c)
            .sum();
        let needs = self.needs(input);
        Ok(self.push(
            Tensor::scalar(s),
            needs,
            Op::WeightedSum {
                input,
                coeffs: coeffs.clone(),
            },
        ))
    }

    /// Mean binary cross-entropy of predicted probabilities against binary
    /// targets. Predictions are clamped to `[BCE_EPSILON, 1 - BCE_EPSILON]`.
    pub fn bce_loss(&mut self, pred: NodeId, target: &Tensor) -> Result<NodeId> {
        if target.shape() != self.value(pred).shape() {
            return Err(AutodiffError::Shape(format!(
                "bce_loss target shape {:?} does not match predictions {:?}",
                target.shape(),
                self.value(pred).shape()
            )));
        }
        for &y in target.data() {
            if y != 0.0 && y != 1.0 {
                return Err(AutodiffError::NonBinaryTarget(y));
            }
        }
        let loss = bce_value(self.value(pred).data(), target.data());
        let needs = self.needs(pred);
        Ok(self.push(
            Tensor::scalar(loss),
            needs,
            Op::BceLoss {
                pred,
                target: target.clone(),
            },
        ))
    }

    /// Reverse pass from a scalar loss node. Gradients of all leaves that
    /// require them are returned; frozen parameter leaves receive nothing.
    pub fn backward(&self, loss: NodeId) -> Result<Gradients> {
        let loss_node = &self.nodes[loss.0];
        if loss_node.value.numel() != 1 {
            return Err(AutodiffError::NonScalarLoss(
                loss_node.value.shape().to_vec(),
            ));
        }
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::filled(loss_node.value.shape(), 1.0));

        for idx in (0..=loss.0).rev() {
            if !self.nodes[idx].needs_grad {
                grads[idx] = None;
                continue;
            }
            let (parents, rest) = grads.split_at_mut(idx);
            let Some(gout) = rest[0].as_ref() else {
                continue;
            };
            match &self.nodes[idx].op {
                Op::Leaf => continue, // keep the gradient for the caller
                Op::Conv2d {
                    input,
                    weight,
                    bias,
                    spec,
                } => {
                    let (din, dw, db) = conv::backward(
                        spec,
                        self.value(*input).data(),
                        self.value(*weight).data(),
                        gout.data(),
                    );
                    self.add_grad(parents, *input, self.value(*input).shape(), din);
                    self.add_grad(parents, *weight, self.value(*weight).shape(), dw);
                    self.add_grad(parents, *bias, self.value(*bias).shape(), db);
                }
                Op::Linear {
                    input,
                    weight,
                    bias,
                } => {
                    let (n, f) = self.value(*input).dims2()?;
                    let (o, _) = self.value(*weight).dims2()?;
                    let x = self.value(*input).data();
                    let w = self.value(*weight).data();
                    let g = gout.data();
                    if self.needs(*input) {
                        let mut din = vec![0.0; n * f];
                        for row in 0..n {
                            for j in 0..o {
                                let gv = g[row * o + j];
                                let wr = &w[j * f..(j + 1) * f];
                                let dr = &mut din[row * f..(row + 1) * f];
                                for (d, &wv) in dr.iter_mut().zip(wr) {
                                    *d += gv * wv;
                                }
                            }
                        }
                        self.add_grad(parents, *input, self.value(*input).shape(), din);
                    }
                    if self.needs(*weight) {
                        let mut dw = vec![0.0; o * f];
                        for row in 0..n {
                            let xr = &x[row * f..(row + 1) * f];
                            for j in 0..o {
                                let gv = g[row * o + j];
                                let dr = &mut dw[j * f..(j + 1) * f];
                                for (d, &xv) in dr.iter_mut().zip(xr) {
                                    *d += gv * xv;
                                }
                            }
                        }
                        self.add_grad(parents, *weight, self.value(*weight).shape(), dw);
                    }
                    if self.needs(*bias) {
                        let mut db = vec![0.0; o];
                        for row in 0..n {
                            for (j, d) in db.iter_mut().enumerate() {
                                *d += g[row * o + j];
                            }
                        }
                        self.add_grad(parents, *bias, self.value(*bias).shape(), db);
                    }
                }
                Op::Relu { input } => {
                    let din: Vec<f64> = self
                        .value(*input)
                        .data()
                        .iter()
                        .zip(gout.data())
                        .map(|(&x, &g)| if x > 0.0 { g } else { 0.0 })
                        .collect();
                    self.add_grad(parents, *input, self.value(*input).shape(), din);
                }
                Op::Sigmoid { input } => {
                    let din: Vec<f64> = self.nodes[idx]
                        .value
                        .data()
                        .iter()
                        .zip(gout.data())
                        .map(|(&y, &g)| g * y * (1.0 - y))
                        .collect();
                    self.add_grad(parents, *input, self.value(*input).shape(), din);
                }
                Op::BatchNorm {
                    input,
                    gamma,
                    beta,
                    ctx,
                } => {
                    let (din, dgamma, dbeta) =
                        norm::backward(ctx, self.value(*gamma).data(), gout.data());
                    self.add_grad(parents, *input, self.value(*input).shape(), din);
                    self.add_grad(parents, *gamma, self.value(*gamma).shape(), dgamma);
                    self.add_grad(parents, *beta, self.value(*beta).shape(), dbeta);
                }
                Op::Dropout { input, mask } => {
                    let din: Vec<f64> = gout
                        .data()
                        .iter()
                        .zip(mask.iter())
                        .map(|(&g, &m)| g * m)
                        .collect();
                    self.add_grad(parents, *input, self.value(*input).shape(), din);
                }
                Op::MaxPool { input, argmax } => {
                    let din =
                        pool::maxpool_backward(gout.data(), argmax, self.value(*input).numel());
                    self.add_grad(parents, *input, self.value(*input).shape(), din);
                }
                Op::GlobalAvgPool { input } => {
                    let dims = self.value(*input).dims4()?;
                    let din = pool::gap_backward(gout.data(), dims);
                    self.add_grad(parents, *input, self.value(*input).shape(), din);
                }
                Op::ResidualAdd { lhs, rhs } => {
                    self.add_grad(parents, *lhs, self.value(*lhs).shape(), gout.data().to_vec());
                    self.add_grad(parents, *rhs, self.value(*rhs).shape(), gout.data().to_vec());
                }
                Op::ChannelConcat { lhs, rhs } => {
                    let (n, c1, h, w) = self.value(*lhs).dims4()?;
                    let (_, c2, _, _) = self.value(*rhs).dims4()?;
                    let spatial = h * w;
                    let g = gout.data();
                    let mut dl = vec![0.0; n * c1 * spatial];
                    let mut dr = vec![0.0; n * c2 * spatial];
                    for b in 0..n {
                        let base = b * (c1 + c2) * spatial;
                        dl[b * c1 * spatial..(b + 1) * c1 * spatial]
                            .copy_from_slice(&g[base..base + c1 * spatial]);
                        dr[b * c2 * spatial..(b + 1) * c2 * spatial]
                            .copy_from_slice(&g[base + c1 * spatial..base + (c1 + c2) * spatial]);
                    }
                    self.add_grad(parents, *lhs, self.value(*lhs).shape(), dl);
                    self.add_grad(parents, *rhs, self.value(*rhs).shape(), dr);
                }
                Op::Flatten { input } => {
                    self.add_grad(
                        parents,
                        *input,
                        self.value(*input).shape(),
                        gout.data().to_vec(),
                    );
                }
                Op::WeightedSum { input, coeffs } => {
                    let g = gout.data()[0];
                    let din: Vec<f64> = coeffs.data().iter().map(|&c| c * g).collect();
                    self.add_grad(parents, *input, self.value(*input).shape(), din);
                }
                Op::BceLoss { pred, target } => {
                    let g = gout.data()[0];
                    let m = target.numel() as f64;
                    let din: Vec<f64> = self
                        .value(*pred)
                        .data()
                        .iter()
                        .zip(target.data())
                        .map(|(&p, &y)| {
                            // gradient is zero where the clamp is active
                            if p > BCE_EPSILON && p < 1.0 - BCE_EPSILON {
                                g * (p - y) / (p * (1.0 - p)) / m
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    self.add_grad(parents, *pred, self.value(*pred).shape(), din);
                }
            }
            // intermediate gradient no longer needed
            rest[0] = None;
        }

        Ok(Gradients {
            by_node: grads,
            param_nodes: self.param_nodes.clone(),
        })
    }

    fn add_grad(&self, grads: &mut [Option<Tensor>], id: NodeId, shape: &[usize], data: Vec<f64>) {
        if !self.nodes[id.0].needs_grad {
            return;
        }
        match &mut grads[id.0] {
            Some(acc) => {
                for (a, b) in acc.data_mut().iter_mut().zip(&data) {
                    *a += b;
                }
            }
            slot @ None => {
                *slot = Some(Tensor::new(shape.to_vec(), data).expect("gradient shape matches"));
            }
        }
    }
}

/// Mean binary cross-entropy as a plain value, sharing the clamp with the
/// graph op. Used by validation loops that do not need gradients.
pub fn bce_value(preds: &[f64], targets: &[f64]) -> f64 {
    let m = preds.len() as f64;
    preds
        .iter()
        .zip(targets)
        .map(|(&p, &y)| {
            let p = p.clamp(BCE_EPSILON, 1.0 - BCE_EPSILON);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum::<f64>()
        / m
}
