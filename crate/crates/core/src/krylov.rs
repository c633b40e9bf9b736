//! Preconditioned conjugate gradients and Lanczos spectral estimates.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg_err, Error, Result};
use crate::sparse::{axpy, dot, norm2, CsrMatrix};

/// A square linear map on `R^n`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_into(x, y)
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y)
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

/// The identity on `R^n`.
#[derive(Clone, Copy, Debug)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x)
    }
}

/// Wraps a closure as an operator.
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnOperator { n, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&(self.f)(x))
    }
}

/// Outcome of a PCG solve.
#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Final `‖b − Ax‖₂ / ‖b‖₂`.
    pub relative_residual: f64,
    pub residual_history: Vec<f64>,
    /// CG step lengths, one per iteration.
    pub alphas: Vec<f64>,
    /// CG direction updates, one per completed direction update.
    pub betas: Vec<f64>,
    pub wall_time: Duration,
}

impl SolveReport {
    /// Ritz values of the preconditioned operator from the Lanczos
    /// tridiagonal matrix implied by the CG coefficients, ascending.
    pub fn ritz_values(&self) -> Vec<f64> {
        lanczos_ritz(&self.alphas, &self.betas)
    }
}

/// Eigenvalues of the Lanczos matrix built from CG coefficients.
pub fn lanczos_ritz(alphas: &[f64], betas: &[f64]) -> Vec<f64> {
    let m = alphas.len();
    if m == 0 {
        return Vec::new();
    }
    let mut t = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = 1.0 / alphas[j] + if j > 0 { betas[j - 1] / alphas[j - 1] } else { 0.0 };
        if j + 1 < m {
            let off = betas[j].sqrt() / alphas[j];
            t[(j, j + 1)] = off;
            t[(j + 1, j)] = off;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(t).eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("non-finite value in {what}")))
    }
}

/// PCG run that keeps its coefficients when it stops on an error.
fn pcg_run(
    a: &dyn LinearOperator,
    b: &dyn LinearOperator,
    rhs: &[f64],
    tol: f64,
    maxit: usize,
) -> (Vec<f64>, SolveReport, Option<Error>) {
    let start = Instant::now();
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let mut report = SolveReport::default();
    let finish = |x: Vec<f64>, mut report: SolveReport, err: Option<Error>| {
        report.wall_time = start.elapsed();
        (x, report, err)
    };
    if a.dim() != n || b.dim() != n {
        let e = Error::Argument(format!("operator sizes {} / {} do not match rhs {n}", a.dim(), b.dim()));
        return finish(x, report, Some(e));
    }
    if let Err(e) = check_finite(rhs, "right-hand side") {
        return finish(x, report, Some(e));
    }
    let bnorm = norm2(rhs);
    if bnorm == 0.0 {
        report.converged = true;
        return finish(x, report, None);
    }
    let mut r = rhs.to_vec();
    let mut z = b.apply(&r);
    let mut rz = dot(&r, &z);
    if !rz.is_finite() {
        return finish(x, report, Some(Error::Numeric("preconditioned residual".into())));
    }
    if rz <= 0.0 {
        return finish(x, report, Some(Error::NotPositiveDefinite(format!("<Bb, b> = {rz}"))));
    }
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    report.relative_residual = 1.0;
    for _ in 0..maxit {
        a.apply_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !pq.is_finite() {
            return finish(x, report, Some(Error::Numeric("<Ap, p> is not finite".into())));
        }
        if pq <= 0.0 {
            return finish(x, report, Some(Error::NotPositiveDefinite(format!("<Ap, p> = {pq}"))));
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        report.alphas.push(alpha);
        report.iterations += 1;
        let res = norm2(&r) / bnorm;
        report.relative_residual = res;
        report.residual_history.push(res);
        if !res.is_finite() {
            return finish(x, report, Some(Error::Numeric("residual is not finite".into())));
        }
        if res <= tol {
            report.converged = true;
            break;
        }
        b.apply_into(&r, &mut z);
        let rz_new = dot(&r, &z);
        if !rz_new.is_finite() {
            return finish(x, report, Some(Error::Numeric("preconditioned residual".into())));
        }
        if rz_new <= 0.0 {
            return finish(x, report, Some(Error::NotPositiveDefinite(format!("<Br, r> = {rz_new}"))));
        }
        let beta = rz_new / rz;
        report.betas.push(beta);
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
        rz = rz_new;
    }
    finish(x, report, None)
}

/// Solve `A x = b` by conjugate gradients preconditioned with `B`, starting
/// from zero and stopping when `‖b − Ax‖₂ ≤ tol ‖b‖₂` or after `maxit`
/// iterations (reported as not converged).
pub fn pcg(
    a: &dyn LinearOperator,
    b: &dyn LinearOperator,
    rhs: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    if !(tol > 0.0) {
        return arg_err(format!("tolerance must be positive, got {tol}"));
    }
    let (x, report, err) = pcg_run(a, b, rhs, tol, maxit);
    match err {
        Some(e) => Err(e),
        None => Ok((x, report)),
    }
}

/// Extreme Ritz values of `BA` and their ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kappa: f64,
    pub iterations: usize,
}

/// Estimate the spectrum of `BA` from the Lanczos matrix of a PCG run on a
/// fixed pseudo-random right-hand side, stopping at convergence to `1e-10`,
/// after `maxit` iterations, or at a breakdown.
pub fn condition_estimate(a: &dyn LinearOperator, b: &dyn LinearOperator, maxit: usize) -> Result<ConditionEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let rhs: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (_, report, err) = pcg_run(a, b, &rhs, 1e-10, maxit);
    if let Some(e @ Error::Argument(_)) = err {
        return Err(e);
    }
    let ritz = report.ritz_values();
    if ritz.is_empty() {
        return Err(err.unwrap_or_else(|| Error::Numeric("no Lanczos coefficients".into())));
    }
    let (lo, hi) = (ritz[0], *ritz.last().unwrap());
    Ok(ConditionEstimate { lambda_min: lo, lambda_max: hi, kappa: hi / lo, iterations: report.iterations })
}

/// Ritz values of `A` after `steps` unpreconditioned Lanczos steps from a
/// fixed pseudo-random start.
pub fn lanczos_ritz_values(a: &dyn LinearOperator, steps: usize) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c05);
    let rhs: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (_, report, err) = pcg_run(a, &Identity(a.dim()), &rhs, 1e-300, steps);
    if let Some(e) = err {
        if report.alphas.is_empty() {
            return Err(e);
        }
    }
    Ok(report.ritz_values())
}
