//! Grundmann–Möller quadrature on the 4-simplex.

use crate::error::{arg_err, Result};

/// Quadrature on the reference 4-simplex in barycentric coordinates. The
/// weights sum to the reference volume `1/24`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 5]>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// Grundmann–Möller rule exact for polynomials of degree at least `degree`.
/// Even degrees are rounded up to the next odd rule.
pub fn gm_quadrature(degree: usize) -> Result<QuadratureRule> {
    if !(1..=7).contains(&degree) {
        return arg_err(format!("quadrature degree must be in 1..=7, got {degree}"));
    }
    const N: usize = 4;
    let s = degree / 2;
    let d = 2 * s + 1;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=s {
        let denom = (d + N - 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * 2f64.powi(-2 * s as i32) * denom.powi(d as i32) / (factorial(i) * factorial(d + N - i));
        let mut betas = Vec::new();
        compositions(s - i, N + 1, &mut Vec::new(), &mut betas);
        for beta in betas {
            points.push(std::array::from_fn(|j| (2 * beta[j] + 1) as f64 / denom));
            weights.push(w);
        }
    }
    Ok(QuadratureRule { points, weights, degree: d })
}
