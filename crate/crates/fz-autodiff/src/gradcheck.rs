//! Central finite-difference gradient checking.
//!
//! The numeric side only ever evaluates the forward pass, so it is an
//! independent oracle for the reverse pass. Non-scalar outputs are reduced
//! to a scalar with a fixed weighted sum so that every output element
//! contributes to the checked gradient.
//!
//! Builders are invoked many times (twice per input element); a builder
//! that uses randomness, such as dropout, must reseed its RNG on every call
//! so it denotes one fixed function.

use crate::graph::{Graph, NodeId};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub elements: usize,
}

/// Relative error with a unit floor, so tiny gradients are compared
/// absolutely and large ones relatively.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs())
}

/// Deterministic, non-constant reduction coefficients.
fn reduction_coeffs(shape: &[usize]) -> Tensor {
    let n: usize = shape.iter().product();
    let data: Vec<f64> = (0..n as u64)
        .map(|i| 0.25 + 0.75 * ((i.wrapping_mul(2654435761) % 1000) as f64 / 1000.0))
        .collect();
    Tensor::new(shape.to_vec(), data).expect("coefficient shape is valid")
}

/// Checks the autodiff gradients of `build` against central finite
/// differences (step `h`) for every element of every input tensor.
///
/// Fails with a description of the first element whose relative error
/// exceeds `tol`.
pub fn check_gradients<F>(
    inputs: &[Tensor],
    h: f64,
    tol: f64,
    mut build: F,
) -> Result<GradCheckReport, String>
where
    F: FnMut(&mut Graph, &[NodeId]) -> crate::Result<NodeId>,
{
    fn evaluate<F>(
        build: &mut F,
        tensors: &[Tensor],
    ) -> Result<(Graph, Vec<NodeId>, NodeId), String>
    where
        F: FnMut(&mut Graph, &[NodeId]) -> crate::Result<NodeId>,
    {
        let mut g = Graph::new();
        let ids: Vec<NodeId> = tensors
            .iter()
            .map(|t| g.leaf_requiring_grad(t.clone()))
            .collect();
        let out = build(&mut g, &ids).map_err(|e| format!("forward failed: {e}"))?;
        let out = if g.value(out).numel() == 1 {
            out
        } else {
            let coeffs = reduction_coeffs(g.value(out).shape());
            g.weighted_sum(out, &coeffs)
                .map_err(|e| format!("reduction failed: {e}"))?
        };
        Ok((g, ids, out))
    }

    let (graph, ids, out) = evaluate(&mut build, inputs)?;
    let grads = graph
        .backward(out)
        .map_err(|e| format!("backward failed: {e}"))?;
    let analytic: Vec<Vec<f64>> = ids
        .iter()
        .zip(inputs)
        .map(|(id, t)| {
            grads
                .node(*id)
                .map(|g| g.data().to_vec())
                .unwrap_or_else(|| vec![0.0; t.numel()])
        })
        .collect();

    let mut work: Vec<Tensor> = inputs.to_vec();
    let mut max_rel: f64 = 0.0;
    let mut elements = 0;
    for i in 0..inputs.len() {
        for j in 0..inputs[i].numel() {
            let orig = work[i].data()[j];
            work[i].data_mut()[j] = orig + h;
            let (gp, _, op) = evaluate(&mut build, &work)?;
            let f_plus = gp.value(op).data()[0];
            work[i].data_mut()[j] = orig - h;
            let (gm, _, om) = evaluate(&mut build, &work)?;
            let f_minus = gm.value(om).data()[0];
            work[i].data_mut()[j] = orig;

            let fd = (f_plus - f_minus) / (2.0 * h);
            let ad = analytic[i][j];
            let rel = relative_error(ad, fd);
            if rel > tol {
                return Err(format!(
                    "gradient mismatch at input {i} element {j}: autodiff {ad}, \
                     finite difference {fd}, relative error {rel:.3e} (tol {tol:.1e})"
                ));
            }
            max_rel = max_rel.max(rel);
            elements += 1;
        }
    }
    Ok(GradCheckReport {
        max_rel_err: max_rel,
        elements,
    })
}
