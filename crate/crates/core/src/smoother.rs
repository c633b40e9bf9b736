//! Polynomial and diagonal smoothers used inside the preconditioners.

use crate::error::{arg_err, Result};
use crate::krylov::LinearOperator;
use crate::sparse::{norm2, CsrMatrix};

/// Preconditioning of the polynomial argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scaling {
    /// Polynomial in `D⁻¹A`, `D = diag(A)`.
    Jacobi,
    /// Polynomial in `A` itself.
    None,
}

/// `z = p(D⁻¹A) D⁻¹ r`, where `1 − λ p(λ)` is the scaled Chebyshev
/// polynomial of the given degree on `[λ_max/10, 1.1 λ_max]`. The result is
/// a symmetric positive definite approximate inverse of `A`.
#[derive(Clone, Debug)]
pub struct Chebyshev {
    a: CsrMatrix,
    inv_diag: Vec<f64>,
    degree: usize,
    lower: f64,
    upper: f64,
}

/// Estimate the largest eigenvalue of `D⁻¹A` by power iteration from a fixed
/// start vector.
pub fn power_iteration(a: &CsrMatrix, inv_diag: &[f64], iterations: usize) -> f64 {
    let n = a.nrows();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 / 7.0).collect();
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let nx = norm2(&x);
        if nx == 0.0 {
            break;
        }
        a.mul_vec_into(&x, &mut y);
        for (yi, d) in y.iter_mut().zip(inv_diag) {
            *yi *= d;
        }
        lambda = norm2(&y) / nx;
        let ny = norm2(&y);
        if ny == 0.0 {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
    }
    lambda
}

impl Chebyshev {
    pub fn new(a: &CsrMatrix, degree: usize, scaling: Scaling) -> Result<Self> {
        if degree == 0 {
            return arg_err("Chebyshev degree must be at least 1");
        }
        if a.nrows() != a.ncols() {
            return arg_err("Chebyshev smoother needs a square matrix");
        }
        let inv_diag: Vec<f64> = match scaling {
            Scaling::Jacobi => {
                let d = a.diagonal();
                if let Some(i) = d.iter().position(|&x| !(x > 0.0)) {
                    return arg_err(format!("diagonal entry {i} is not positive"));
                }
                d.iter().map(|x| 1.0 / x).collect()
            }
            Scaling::None => vec![1.0; a.nrows()],
        };
        let lmax = power_iteration(a, &inv_diag, 20);
        Ok(Self::with_bounds(a, inv_diag, degree, lmax / 10.0, 1.1 * lmax))
    }

    fn with_bounds(a: &CsrMatrix, inv_diag: Vec<f64>, degree: usize, lower: f64, upper: f64) -> Self {
        Chebyshev { a: a.clone(), inv_diag, degree, lower, upper }
    }

    /// Smoother on an explicit interval, for tests against closed forms.
    pub fn with_interval(a: &CsrMatrix, degree: usize, scaling: Scaling, lower: f64, upper: f64) -> Result<Self> {
        if !(0.0 < lower && lower < upper) {
            return arg_err(format!("invalid Chebyshev interval [{lower}, {upper}]"));
        }
        let mut s = Self::new(a, degree, scaling)?;
        s.lower = lower;
        s.upper = upper;
        Ok(s)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.a
    }
}

impl LinearOperator for Chebyshev {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn apply_into(&self, r: &[f64], x: &mut [f64]) {
        let n = r.len();
        let theta = 0.5 * (self.upper + self.lower);
        let delta = 0.5 * (self.upper - self.lower);
        let sigma = theta / delta;
        let mut rho = 1.0 / sigma;
        let mut d: Vec<f64> = r.iter().zip(&self.inv_diag).map(|(ri, di)| ri * di / theta).collect();
        x.copy_from_slice(&d);
        let mut ax = vec![0.0; n];
        for _ in 1..self.degree {
            self.a.mul_vec_into(x, &mut ax);
            let rho_new = 1.0 / (2.0 * sigma - rho);
            let c1 = rho_new * rho;
            let c2 = 2.0 * rho_new / delta;
            for i in 0..n {
                d[i] = c1 * d[i] + c2 * self.inv_diag[i] * (r[i] - ax[i]);
                x[i] += d[i];
            }
            rho = rho_new;
        }
    }
}

/// `z = ((h⁻² + τ) diag(M))⁻¹ r`.
#[derive(Clone, Debug)]
pub struct ScaledMass {
    inv: Vec<f64>,
}

impl ScaledMass {
    pub fn new(mass: &CsrMatrix, h: f64, tau: f64) -> Result<Self> {
        if !(h > 0.0 && tau > 0.0) {
            return arg_err(format!("scaled mass smoother needs h, tau > 0, got {h}, {tau}"));
        }
        let s = h.powi(-2) + tau;
        let d = mass.diagonal();
        if d.iter().any(|&x| !(x > 0.0)) {
            return arg_err("mass matrix has a non-positive diagonal entry");
        }
        Ok(ScaledMass { inv: d.iter().map(|x| 1.0 / (s * x)).collect() })
    }
}

impl LinearOperator for ScaledMass {
    fn dim(&self) -> usize {
        self.inv.len()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv) {
            *zi = ri * di;
        }
    }
}

/// Either smoother behind one interface.
#[derive(Clone, Debug)]
pub enum Smoother {
    Chebyshev(Chebyshev),
    ScaledMass(ScaledMass),
}

impl LinearOperator for Smoother {
    fn dim(&self) -> usize {
        match self {
            Smoother::Chebyshev(s) => s.dim(),
            Smoother::ScaledMass(s) => s.dim(),
        }
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Smoother::Chebyshev(s) => s.apply_into(r, z),
            Smoother::ScaledMass(s) => s.apply_into(r, z),
        }
    }
}
