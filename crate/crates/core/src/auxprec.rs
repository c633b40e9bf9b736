//! Auxiliary-space (HX) preconditioners for `τ M_k + K_k`, `k = 1, 2, 3`.
//!
//! All operators act on residual vectors and return coefficient vectors, so
//! the transposes of the interpolants and derivative matrices are plain
//! matrix transposes.

use std::cell::Cell;

use crate::error::{arg_err, Result};
use crate::femspace::{assemble_mass, assemble_stiffness, derivative_matrix, weighted_sum};
use crate::interp::{interpolant_matrix, InterpolantMatrix};
use crate::krylov::{pcg, Identity, LinearOperator};
use crate::mgscalar::{MeshHierarchy, ScalarMultigrid};
use crate::quadrature::QuadratureRule;
use crate::smoother::{Chebyshev, Scaling, ScaledMass, Smoother};
use crate::sparse::{axpy, CsrMatrix};

/// Fine-level smoother in each space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmootherKind {
    /// Jacobi-scaled Chebyshev of degree 3.
    Chebyshev,
    /// `((h⁻² + τ) diag M)⁻¹`.
    ScaledMass,
}

/// How the gradient-range part is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `τ⁻¹ D B^{(k-1)} Dᵀ` with the recursion collapsed.
    Standard,
    /// `D (τ K_{k-1})⁻¹ Dᵀ` with the inner solve done by capped CG.
    RangeProjection,
}

#[derive(Clone, Copy, Debug)]
pub struct HxOptions {
    pub smoother: SmootherKind,
    pub variant: Variant,
    pub inner_tol: f64,
    pub inner_maxit: usize,
}

impl Default for HxOptions {
    fn default() -> Self {
        HxOptions { smoother: SmootherKind::Chebyshev, variant: Variant::Standard, inner_tol: 1e-8, inner_maxit: 50 }
    }
}

/// Counters from the inner solves of [`Variant::RangeProjection`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InnerStats {
    pub solves: usize,
    pub iterations: usize,
    /// Inner solves that stopped at the iteration cap.
    pub capped: usize,
}

struct Block {
    a: CsrMatrix,
    smoother: Smoother,
    pi: InterpolantMatrix,
    /// `D_{j-1}`.
    d: CsrMatrix,
}

/// `B = S_k + Π_k B₀ Π_kᵀ + τ⁻¹ D_{k-1} B^{(k-1)} D_{k-1}ᵀ` on one level.
pub struct HxPreconditioner {
    k: usize,
    tau: f64,
    opts: HxOptions,
    mg: ScalarMultigrid,
    /// Blocks for degrees `1..=k`.
    blocks: Vec<Block>,
    /// `K_{k-1}`, kept for the range-projection variant.
    lower_stiffness: Option<CsrMatrix>,
    stats: Cell<InnerStats>,
}

impl HxPreconditioner {
    /// Build the preconditioner for degree `k` on the finest level of `hier`.
    pub fn new(hier: &MeshHierarchy, k: usize, tau: f64, quad: &QuadratureRule, opts: HxOptions) -> Result<Self> {
        if !(1..=3).contains(&k) {
            return arg_err(format!("HX preconditioners exist for k = 1..=3, got {k}"));
        }
        if !(tau > 0.0) {
            return arg_err(format!("weight tau must be positive, got {tau}"));
        }
        let mg = ScalarMultigrid::new(hier, tau, quad)?;
        let level = hier.finest();
        let mesh = hier.mesh(level);
        let geom = hier.geometry(level);
        let mut blocks = Vec::with_capacity(k);
        for j in 1..=k {
            let space = hier.space(level, j)?;
            let mass = assemble_mass(&space, quad)?;
            let stiffness = assemble_stiffness(&space)?;
            let a = weighted_sum(&mass, &stiffness, tau)?;
            let smoother = match opts.smoother {
                SmootherKind::Chebyshev => Smoother::Chebyshev(Chebyshev::new(&a, 3, Scaling::Jacobi)?),
                SmootherKind::ScaledMass => Smoother::ScaledMass(ScaledMass::new(&mass, geom.max_diameter(), tau)?),
            };
            let pi = interpolant_matrix(mesh, j)?;
            let d = derivative_matrix(mesh, geom, j - 1)?;
            blocks.push(Block { a, smoother, pi, d });
        }
        let lower_stiffness = match opts.variant {
            Variant::Standard => None,
            Variant::RangeProjection => Some(assemble_stiffness(&hier.space(level, k - 1)?)?),
        };
        Ok(HxPreconditioner { k, tau, opts, mg, blocks, lower_stiffness, stats: Cell::new(InnerStats::default()) })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// The system matrix `τ M_k + K_k`.
    pub fn matrix(&self) -> &CsrMatrix {
        &self.blocks[self.k - 1].a
    }

    pub fn scalar_multigrid(&self) -> &ScalarMultigrid {
        &self.mg
    }

    pub fn inner_stats(&self) -> InnerStats {
        self.stats.get()
    }

    fn block(&self, j: usize) -> &Block {
        &self.blocks[j - 1]
    }

    /// `S_j r + Π_j B₀ Π_jᵀ r`.
    fn fine_part(&self, j: usize, r: &[f64]) -> Vec<f64> {
        let b = self.block(j);
        let mut z = b.smoother.apply(r);
        let aux = self.mg.block_apply(&b.pi.matrix.mul_vec_transposed(r));
        axpy(1.0, &b.pi.matrix.mul_vec(&aux), &mut z);
        z
    }

    /// Collapsed form: the inner preconditioner is `B₀` for `k = 1` and the
    /// first two terms of `B^{(k-1)}` otherwise.
    pub fn apply_expanded(&self, r: &[f64]) -> Vec<f64> {
        let mut z = self.fine_part(self.k, r);
        let d = &self.block(self.k).d;
        let s = d.mul_vec_transposed(r);
        let inner = if self.k == 1 { self.mg.vcycle(&s) } else { self.fine_part(self.k - 1, &s) };
        axpy(1.0 / self.tau, &d.mul_vec(&inner), &mut z);
        z
    }

    fn recursive(&self, j: usize, r: &[f64]) -> Vec<f64> {
        if j == 0 {
            return self.mg.vcycle(r);
        }
        let mut z = self.fine_part(j, r);
        let d = &self.block(j).d;
        let inner = self.recursive(j - 1, &d.mul_vec_transposed(r));
        axpy(1.0 / self.tau, &d.mul_vec(&inner), &mut z);
        z
    }

    /// The literal recursive definition, for checking the collapsed form.
    pub fn apply_recursive(&self, r: &[f64]) -> Vec<f64> {
        self.recursive(self.k, r)
    }

    /// `S_k + Π_k B₀ Π_kᵀ + D (τ K_{k-1})⁻¹ Dᵀ`, the inverse approximated by
    /// CG. Only approximately linear and symmetric because the inner solve is
    /// truncated.
    pub fn apply_range_projection(&self, r: &[f64]) -> Result<Vec<f64>> {
        let Some(lower) = &self.lower_stiffness else {
            return arg_err("preconditioner was not built for the range-projection variant");
        };
        let mut z = self.fine_part(self.k, r);
        let d = &self.block(self.k).d;
        let s = d.mul_vec_transposed(r);
        let mut stats = self.stats.get();
        stats.solves += 1;
        let inner = match pcg(lower, &Identity(s.len()), &s, self.opts.inner_tol, self.opts.inner_maxit) {
            Ok((p, rep)) => {
                stats.iterations += rep.iterations;
                if !rep.converged {
                    stats.capped += 1;
                }
                p
            }
            Err(_) => {
                stats.capped += 1;
                vec![0.0; s.len()]
            }
        };
        self.stats.set(stats);
        axpy(1.0 / self.tau, &d.mul_vec(&inner), &mut z);
        Ok(z)
    }
}

impl LinearOperator for HxPreconditioner {
    fn dim(&self) -> usize {
        self.matrix().nrows()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let out = match self.opts.variant {
            Variant::Standard => self.apply_expanded(r),
            Variant::RangeProjection => self.apply_range_projection(r).expect("built for this variant"),
        };
        z.copy_from_slice(&out)
    }
}
