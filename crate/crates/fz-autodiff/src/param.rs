use crate::error::{AutodiffError, Result};
use crate::tensor::Tensor;

/// A named model weight plus its accumulated gradient.
///
/// `requires_grad == false` marks a frozen parameter: backward never writes
/// its gradient and the optimizer never touches its value.
#[derive(Debug, Clone)]
pub struct Parameter {
    pub name: String,
    pub value: Tensor,
    pub grad: Option<Tensor>,
    pub requires_grad: bool,
}

impl Parameter {
    pub fn new(name: impl Into<String>, value: Tensor) -> Self {
        Self {
            name: name.into(),
            value,
            grad: None,
            requires_grad: true,
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad = None;
    }

    /// Adds `g` into the gradient slot, allocating it on first use.
    pub fn accumulate_grad(&mut self, g: &Tensor) -> Result<()> {
        if g.shape() != self.value.shape() {
            return Err(AutodiffError::Shape(format!(
                "gradient shape {:?} does not match parameter '{}' of shape {:?}",
                g.shape(),
                self.name,
                self.value.shape()
            )));
        }
        match &mut self.grad {
            Some(acc) => {
                for (a, b) in acc.data_mut().iter_mut().zip(g.data()) {
                    *a += b;
                }
            }
            None => self.grad = Some(g.clone()),
        }
        Ok(())
    }
}
