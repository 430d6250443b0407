//! Central-difference gradient checking for arbitrary scalar-valued graphs.

use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Verifies the analytic gradient of `f` against central differences.
///
/// `inputs` are `(rows, cols, values)` triples; each becomes a trainable
/// leaf. The function must return a scalar. For every input element the
/// graph is rebuilt twice with the element nudged by ±`h`, and the relative
/// error between analytic and numeric gradients must stay within `tol`
/// (the denominator is floored at 1e-6 so gradients near zero compare
/// absolutely).
pub fn grad_check<T, F>(
    f: &F,
    inputs: &[(usize, usize, Vec<f64>)],
    h: f64,
    tol: f64,
) -> Result<(), String>
where
    T: Scalar,
    F: Fn(&[Tensor<T>]) -> Tensor<T>,
{
    let build = |values: &[Vec<f64>]| -> Vec<Tensor<T>> {
        inputs
            .iter()
            .zip(values)
            .map(|((r, c, _), vals)| {
                Tensor::leaf(*r, *c, vals.iter().map(|&v| T::from_f64(v)).collect())
            })
            .collect()
    };
    let eval = |values: &[Vec<f64>]| -> f64 {
        let leaves = build(values);
        let out = f(&leaves);
        assert_eq!(
            out.shape(),
            (1, 1),
            "grad_check: function must return a scalar, got {:?}",
            out.shape()
        );
        out.value().to_f64()
    };

    let base: Vec<Vec<f64>> = inputs.iter().map(|(_, _, v)| v.clone()).collect();

    // One forward/backward pass for the analytic gradients.
    let leaves = build(&base);
    let out = f(&leaves);
    assert_eq!(
        out.shape(),
        (1, 1),
        "grad_check: function must return a scalar, got {:?}",
        out.shape()
    );
    out.backward();
    let analytic: Vec<Vec<f64>> = leaves
        .iter()
        .map(|leaf| match leaf.grad() {
            Some(g) => g.iter().map(|&v| v.to_f64()).collect(),
            None => vec![0.0; leaf.numel()],
        })
        .collect();

    for (i, (_, _, vals)) in inputs.iter().enumerate() {
        for j in 0..vals.len() {
            let mut plus = base.clone();
            plus[i][j] += h;
            let mut minus = base.clone();
            minus[i][j] -= h;
            let numeric = (eval(&plus) - eval(&minus)) / (2.0 * h);
            let a = analytic[i][j];
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-6);
            if !rel.is_finite() || rel > tol {
                return Err(format!(
                    "input {i} element {j}: analytic {a} vs numeric {numeric} (relative error {rel})"
                ));
            }
        }
    }
    Ok(())
}
