//! Adam optimizer and reduce-on-plateau learning-rate scheduler.

use crate::error::{AutodiffError, Result};
use crate::param::Parameter;

/// Adam hyperparameters. The defaults are the usual ones; only the learning
/// rate is commonly overridden.
#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    fn validate(&self) -> Result<()> {
        if self.lr <= 0.0 {
            return Err(AutodiffError::Config(format!(
                "learning rate must be positive, got {}",
                self.lr
            )));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(AutodiffError::Config(format!(
                    "{name} must be in [0, 1), got {b}"
                )));
            }
        }
        if self.eps <= 0.0 {
            return Err(AutodiffError::Config(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

struct Slot {
    m: Vec<f64>,
    v: Vec<f64>,
}

/// Adam with bias correction. Moment buffers exist only for parameters that
/// required gradients when the optimizer was created; frozen parameters are
/// never touched.
pub struct Adam {
    pub lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    slots: Vec<Option<Slot>>,
}

impl Adam {
    pub fn new(config: AdamConfig, params: &[Parameter]) -> Result<Self> {
        config.validate()?;
        let slots = params
            .iter()
            .map(|p| {
                p.requires_grad.then(|| Slot {
                    m: vec![0.0; p.value.numel()],
                    v: vec![0.0; p.value.numel()],
                })
            })
            .collect();
        Ok(Self {
            lr: config.lr,
            beta1: config.beta1,
            beta2: config.beta2,
            eps: config.eps,
            t: 0,
            slots,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One optimizer step over the accumulated gradients. A missing gradient
    /// is treated as zero.
    pub fn step(&mut self, params: &mut [Parameter]) -> Result<()> {
        if params.len() != self.slots.len() {
            return Err(AutodiffError::State(format!(
                "optimizer tracks {} parameters, got {}",
                self.slots.len(),
                params.len()
            )));
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (p, slot) in params.iter_mut().zip(&mut self.slots) {
            let Some(slot) = slot else {
                if p.requires_grad {
                    return Err(AutodiffError::State(format!(
                        "parameter '{}' became trainable after optimizer construction",
                        p.name
                    )));
                }
                continue;
            };
            if !p.requires_grad {
                return Err(AutodiffError::State(format!(
                    "parameter '{}' was frozen after optimizer construction",
                    p.name
                )));
            }
            if slot.m.len() != p.value.numel() {
                return Err(AutodiffError::State(format!(
                    "moment buffers for '{}' hold {} values, parameter has {}",
                    p.name,
                    slot.m.len(),
                    p.value.numel()
                )));
            }
            if let Some(g) = &p.grad {
                if g.shape() != p.value.shape() {
                    return Err(AutodiffError::State(format!(
                        "gradient shape {:?} does not match parameter '{}'",
                        g.shape(),
                        p.name
                    )));
                }
            }
            let zero;
            let grad: &[f64] = match &p.grad {
                Some(g) => g.data(),
                None => {
                    zero = vec![0.0; p.value.numel()];
                    &zero
                }
            };
            for i in 0..p.value.numel() {
                let g = grad[i];
                slot.m[i] = self.beta1 * slot.m[i] + (1.0 - self.beta1) * g;
                slot.v[i] = self.beta2 * slot.v[i] + (1.0 - self.beta2) * g * g;
                let m_hat = slot.m[i] / bc1;
                let v_hat = slot.v[i] / bc2;
                p.value.data_mut()[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
        Ok(())
    }
}

/// Reduce-on-plateau settings; the monitored metric is validation accuracy
/// (higher is better).
#[derive(Debug, Clone, Copy)]
pub struct SchedulerConfig {
    pub factor: f64,
    pub patience: usize,
    pub min_lr: f64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            factor: 0.1,
            patience: 3,
            min_lr: 1e-6,
        }
    }
}

/// Cuts the learning rate by `factor` once the monitored metric has failed
/// to improve strictly for `patience` consecutive observations, never below
/// `min_lr`.
#[derive(Debug)]
pub struct PlateauScheduler {
    factor: f64,
    patience: usize,
    min_lr: f64,
    best: Option<f64>,
    stale: usize,
}

impl PlateauScheduler {
    pub fn new(config: SchedulerConfig) -> Result<Self> {
        if !(0.0..1.0).contains(&config.factor) || config.factor == 0.0 {
            return Err(AutodiffError::Config(format!(
                "scheduler factor must be in (0, 1), got {}",
                config.factor
            )));
        }
        if config.patience == 0 {
            return Err(AutodiffError::Config(
                "scheduler patience must be positive".into(),
            ));
        }
        if config.min_lr < 0.0 {
            return Err(AutodiffError::Config(format!(
                "min_lr must be non-negative, got {}",
                config.min_lr
            )));
        }
        Ok(Self {
            factor: config.factor,
            patience: config.patience,
            min_lr: config.min_lr,
            best: None,
            stale: 0,
        })
    }

    /// Observes a metric value and returns the (possibly reduced) rate.
    pub fn step(&mut self, metric: f64, lr: f64) -> f64 {
        match self.best {
            Some(best) if metric <= best => {
                self.stale += 1;
                if self.stale >= self.patience {
                    self.stale = 0;
                    return (lr * self.factor).max(self.min_lr);
                }
                lr
            }
            _ => {
                self.best = Some(metric);
                self.stale = 0;
                lr
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;

    fn param(value: f64) -> Parameter {
        Parameter::new("p", Tensor::scalar(value))
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut params = vec![param(1.5)];
        let mut adam = Adam::new(AdamConfig::default(), &params).unwrap();
        for _ in 0..5 {
            adam.step(&mut params).unwrap();
        }
        assert_eq!(params[0].value.data()[0], 1.5);
        assert_eq!(adam.step_count(), 5);
    }

    #[test]
    fn first_step_matches_hand_computation() {
        // m_hat = g, v_hat = g^2 after bias correction at t = 1, so the
        // update is lr * g / (|g| + eps) which is about lr.
        let mut params = vec![param(1.0)];
        params[0].grad = Some(Tensor::scalar(2.0));
        let mut adam = Adam::new(AdamConfig::default(), &params).unwrap();
        adam.step(&mut params).unwrap();
        let expected = 1.0 - 1e-3 * 2.0 / (2.0 + 1e-8);
        assert!((params[0].value.data()[0] - expected).abs() < 1e-12);
        assert!((params[0].value.data()[0] - 0.999).abs() < 1e-6);
    }

    #[test]
    fn matches_scalar_oracle_over_two_steps() {
        // independent scalar Adam with constant gradient
        let (lr, b1, b2, eps): (f64, f64, f64, f64) = (1e-3, 0.9, 0.999, 1e-8);
        let g = 0.7;
        let mut x = 0.3;
        let (mut m, mut v) = (0.0, 0.0);
        for t in 1..=2u32 {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mh = m / (1.0 - b1.powi(t as i32));
            let vh = v / (1.0 - b2.powi(t as i32));
            x -= lr * mh / (vh.sqrt() + eps);
        }

        let mut params = vec![param(0.3)];
        let mut adam = Adam::new(AdamConfig::default(), &params).unwrap();
        for _ in 0..2 {
            params[0].grad = Some(Tensor::scalar(g));
            adam.step(&mut params).unwrap();
        }
        assert!((params[0].value.data()[0] - x).abs() < 1e-12);
    }

    #[test]
    fn frozen_parameters_are_skipped() {
        let mut p = param(2.0);
        p.requires_grad = false;
        let mut params = vec![p, param(1.0)];
        let mut adam = Adam::new(AdamConfig::default(), &params).unwrap();
        params[1].grad = Some(Tensor::scalar(1.0));
        adam.step(&mut params).unwrap();
        assert_eq!(params[0].value.data()[0], 2.0);
        assert!(params[1].value.data()[0] < 1.0);
    }

    #[test]
    fn plateau_reduces_after_patience_stale_calls() {
        let mut s = PlateauScheduler::new(SchedulerConfig {
            factor: 0.1,
            patience: 3,
            min_lr: 1e-6,
        })
        .unwrap();
        let mut lr = 0.01;
        for (i, &acc) in [0.7, 0.7, 0.7, 0.7].iter().enumerate() {
            lr = s.step(acc, lr);
            if i < 3 {
                assert_eq!(lr, 0.01, "no cut before the fourth call");
            }
        }
        assert!((lr - 0.001).abs() < 1e-15);
    }

    #[test]
    fn improvement_keeps_rate() {
        let mut s = PlateauScheduler::new(SchedulerConfig::default()).unwrap();
        let mut lr = 0.01;
        for &acc in &[0.6, 0.7] {
            lr = s.step(acc, lr);
        }
        assert_eq!(lr, 0.01);
    }

    #[test]
    fn rate_never_drops_below_floor() {
        let mut s = PlateauScheduler::new(SchedulerConfig {
            factor: 0.1,
            patience: 1,
            min_lr: 1e-6,
        })
        .unwrap();
        let mut lr = 1e-6;
        s.step(0.5, lr);
        for _ in 0..10 {
            lr = s.step(0.4, lr);
        }
        assert_eq!(lr, 1e-6);
    }
}
