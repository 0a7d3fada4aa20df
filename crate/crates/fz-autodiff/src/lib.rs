//! Reverse-mode automatic differentiation on dense `f64` tensors.
//!
//! The engine records the forward operations used by the training pipeline
//! (convolution, linear, batch normalization, pooling, activations, dropout,
//! binary cross-entropy) into a [`Graph`] and computes gradients by walking
//! the recorded nodes in reverse. It also provides the Adam optimizer and a
//! reduce-on-plateau learning-rate scheduler.
//!
//! Everything runs single-threaded in `f64`: identical seeds give
//! bit-identical results.

#![forbid(unsafe_code)]

mod conv;
mod error;
mod graph;
mod norm;
mod optim;
mod param;
mod pool;
mod tensor;

pub mod gradcheck;
pub mod rng;

pub use error::{AutodiffError, Result};
pub use graph::{bce_value, Gradients, Graph, NodeId, BCE_EPSILON};
pub use optim::{Adam, AdamConfig, PlateauScheduler, SchedulerConfig};
pub use param::Parameter;
pub use tensor::Tensor;
