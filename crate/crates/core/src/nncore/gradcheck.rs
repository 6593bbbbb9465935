use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::tape::{Tape, Var};

pub const DEFAULT_EPS: f64 = 1e-5;

/// Compares reverse-mode gradients of `f` against central differences.
///
/// `f` receives a fresh tape and one leaf per entry of `params` and must
/// return a `1 × 1` node. The result is the maximum over every parameter
/// component of `|g_a − g_n| / max(1, |g_a|, |g_n|)`.
pub fn grad_check<F>(f: F, params: &[Matrix], eps: f64) -> Result<f64>
where
    F: Fn(&mut Tape, &[Var]) -> Result<Var>,
{
    if !(eps > 0.0) {
        return Err(Error::Config(format!(
            "grad_check eps must be positive, got {eps}"
        )));
    }
    let mut tape = Tape::new();
    let vars: Vec<Var> = params.iter().map(|p| tape.leaf(p.clone())).collect();
    let out = f(&mut tape, &vars)?;
    if tape.value(out).shape() != [1, 1] {
        return Err(Error::shape("grad_check", tape.value(out).shape(), [1, 1]));
    }
    tape.backward(out)?;
    let analytic: Vec<Matrix> = vars.iter().map(|&v| tape.grad_or_zeros(v)).collect();

    let eval = |perturbed: &[Matrix]| -> Result<f64> {
        let mut t = Tape::new();
        let vs: Vec<Var> = perturbed.iter().map(|p| t.leaf(p.clone())).collect();
        let o = f(&mut t, &vs)?;
        let v = t.scalar(o);
        if !v.is_finite() {
            return Err(Error::Numeric("grad_check objective is non-finite".into()));
        }
        Ok(v)
    };

    let mut work: Vec<Matrix> = params.to_vec();
    let mut worst = 0.0f64;
    for p in 0..params.len() {
        for k in 0..params[p].len() {
            let orig = params[p].as_slice()[k];
            work[p].as_mut_slice()[k] = orig + eps;
            let plus = eval(&work)?;
            work[p].as_mut_slice()[k] = orig - eps;
            let minus = eval(&work)?;
            work[p].as_mut_slice()[k] = orig;

            let numeric = (plus - minus) / (2.0 * eps);
            let a = analytic[p].as_slice()[k];
            let rel = (a - numeric).abs() / 1f64.max(a.abs()).max(numeric.abs());
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_objective_is_exact() {
        let w = Matrix::row_vector(&[0.3, -1.2, 4.0]);
        let err = grad_check(
            |t, v| {
                let s = t.scale(v[0], 2.5)?;
                t.sum(s)
            },
            &[w],
            DEFAULT_EPS,
        )
        .unwrap();
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn sum_of_squares_at_ones() {
        let w = Matrix::filled(2, 3, 1.0);
        let err = grad_check(
            |t, v| {
                let sq = t.mul(v[0], v[0])?;
                t.sum(sq)
            },
            &[w],
            DEFAULT_EPS,
        )
        .unwrap();
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn rejects_non_scalar_output() {
        let w = Matrix::filled(2, 2, 1.0);
        assert!(grad_check(|t, v| t.relu(v[0]), &[w], DEFAULT_EPS).is_err());
    }
}
