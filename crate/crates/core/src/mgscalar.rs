//! Geometric multigrid for the scalar problem `τ M₀ + K₀` on a hierarchy of
//! uniformly refined meshes.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{arg_err, Error, Result};
use crate::femspace::{assemble_operator, WhitneySpace};
use crate::krylov::LinearOperator;
use crate::mesh::{bey_refine, GeomCache, Mesh4};
use crate::quadrature::QuadratureRule;
use crate::smoother::{Chebyshev, Scaling};
use crate::sparse::CsrMatrix;

/// Nested meshes, coarsest first, with cached geometry.
#[derive(Clone, Debug)]
pub struct MeshHierarchy {
    meshes: Vec<Mesh4>,
    geoms: Vec<GeomCache>,
}

impl MeshHierarchy {
    /// `coarse` followed by `refinements` uniform refinements.
    pub fn uniform(coarse: Mesh4, refinements: usize) -> Result<Self> {
        let mut meshes = vec![coarse];
        for _ in 0..refinements {
            let fine = bey_refine(meshes.last().unwrap())?;
            meshes.push(fine);
        }
        Self::from_meshes(meshes)
    }

    pub fn from_meshes(meshes: Vec<Mesh4>) -> Result<Self> {
        if meshes.is_empty() {
            return arg_err("a hierarchy needs at least one mesh");
        }
        let geoms = meshes.iter().map(|m| m.geometry()).collect::<Result<Vec<_>>>()?;
        Ok(MeshHierarchy { meshes, geoms })
    }

    pub fn len(&self) -> usize {
        self.meshes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meshes.is_empty()
    }

    pub fn finest(&self) -> usize {
        self.meshes.len() - 1
    }

    pub fn mesh(&self, level: usize) -> &Mesh4 {
        &self.meshes[level]
    }

    pub fn geometry(&self, level: usize) -> &GeomCache {
        &self.geoms[level]
    }

    pub fn space(&self, level: usize, k: usize) -> Result<WhitneySpace<'_>> {
        if level >= self.meshes.len() {
            return arg_err(format!("level {level} is not in a hierarchy of {} meshes", self.meshes.len()));
        }
        WhitneySpace::new(k, &self.meshes[level], &self.geoms[level])
    }

    /// Truncate to the levels `0..=level`.
    pub fn truncated(&self, level: usize) -> Self {
        MeshHierarchy { meshes: self.meshes[..=level].to_vec(), geoms: self.geoms[..=level].to_vec() }
    }
}

/// Vertex prolongation from `coarse` to `fine`. The fine mesh must keep the
/// coarse vertices first and add one midpoint per coarse edge, in edge order.
pub fn vertex_prolongation(coarse: &Mesh4, fine: &Mesh4) -> Result<CsrMatrix> {
    let nc = coarse.num_vertices();
    let edges = coarse.subsimplices(1);
    if fine.num_vertices() != nc + edges.len() {
        return Err(Error::Mesh(format!(
            "fine mesh has {} vertices, expected {} for nested refinement",
            fine.num_vertices(),
            nc + edges.len()
        )));
    }
    let close = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12);
    let mut trip = Vec::with_capacity(nc + 2 * edges.len());
    for i in 0..nc {
        if !close(&coarse.vertices()[i], &fine.vertices()[i]) {
            return Err(Error::Mesh(format!("vertex {i} moved between levels")));
        }
        trip.push((i, i, 1.0));
    }
    for e in 0..edges.len() {
        let s = edges.simplex(e);
        let (a, b) = (coarse.vertices()[s[0] as usize], coarse.vertices()[s[1] as usize]);
        let mid: [f64; 4] = std::array::from_fn(|i| 0.5 * (a[i] + b[i]));
        if !close(&mid, &fine.vertices()[nc + e]) {
            return Err(Error::Mesh(format!("fine vertex {} is not the midpoint of coarse edge {e}", nc + e)));
        }
        trip.push((nc + e, s[0] as usize, 0.5));
        trip.push((nc + e, s[1] as usize, 0.5));
    }
    CsrMatrix::from_triplets(fine.num_vertices(), nc, &trip)
}

struct Level {
    a: CsrMatrix,
    smoother: Chebyshev,
    /// Prolongation from the next coarser level.
    prolong: CsrMatrix,
}

/// Symmetric V(1,1)-cycle with Chebyshev smoothing and an exact coarse solve.
pub struct ScalarMultigrid {
    tau: f64,
    coarse_a: CsrMatrix,
    coarse: Cholesky<f64, Dyn>,
    /// Levels `1..=L`, coarsest first.
    levels: Vec<Level>,
}

impl ScalarMultigrid {
    /// Rediscretize `τ M₀ + K₀` on every level of `hier`.
    pub fn new(hier: &MeshHierarchy, tau: f64, quad: &QuadratureRule) -> Result<Self> {
        if !(tau > 0.0) {
            return arg_err(format!("weight tau must be positive, got {tau}"));
        }
        let coarse_a = assemble_operator(&hier.space(0, 0)?, quad, tau)?;
        let n0 = coarse_a.nrows();
        let dense = DMatrix::from_fn(n0, n0, |i, j| coarse_a.get(i, j));
        let coarse = Cholesky::new(dense)
            .ok_or_else(|| Error::NotPositiveDefinite("coarse scalar matrix".into()))?;
        let mut levels = Vec::with_capacity(hier.finest());
        for l in 1..hier.len() {
            let a = assemble_operator(&hier.space(l, 0)?, quad, tau)?;
            let smoother = Chebyshev::new(&a, 3, Scaling::Jacobi)?;
            let prolong = vertex_prolongation(hier.mesh(l - 1), hier.mesh(l))?;
            levels.push(Level { a, smoother, prolong });
        }
        Ok(ScalarMultigrid { tau, coarse_a, coarse, levels })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    /// The fine-level matrix.
    pub fn matrix(&self) -> &CsrMatrix {
        self.levels.last().map(|l| &l.a).unwrap_or(&self.coarse_a)
    }

    fn coarse_solve(&self, r: &[f64]) -> Vec<f64> {
        self.coarse.solve(&DVector::from_column_slice(r)).as_slice().to_vec()
    }

    fn cycle(&self, depth: usize, r: &[f64]) -> Vec<f64> {
        if depth == 0 {
            return self.coarse_solve(r);
        }
        let lvl = &self.levels[depth - 1];
        let mut x = lvl.smoother.apply(r);
        let mut res = residual(&lvl.a, r, &x);
        let rc = lvl.prolong.mul_vec_transposed(&res);
        let xc = self.cycle(depth - 1, &rc);
        let corr = lvl.prolong.mul_vec(&xc);
        x.iter_mut().zip(&corr).for_each(|(xi, ci)| *xi += ci);
        res = residual(&lvl.a, r, &x);
        let post = lvl.smoother.apply(&res);
        x.iter_mut().zip(&post).for_each(|(xi, pi)| *xi += pi);
        x
    }

    /// One V-cycle from a zero initial guess: `B₀ r`.
    pub fn vcycle(&self, r: &[f64]) -> Vec<f64> {
        self.cycle(self.levels.len(), r)
    }

    /// `B₀` applied to each of the `len / n` vertex-indexed blocks of `r`.
    pub fn block_apply(&self, r: &[f64]) -> Vec<f64> {
        let n = self.dim();
        debug_assert_eq!(r.len() % n, 0);
        r.chunks(n).flat_map(|blk| self.vcycle(blk)).collect()
    }
}

fn residual(a: &CsrMatrix, r: &[f64], x: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    r.iter().zip(&ax).map(|(ri, ai)| ri - ai).collect()
}

impl LinearOperator for ScalarMultigrid {
    fn dim(&self) -> usize {
        self.matrix().nrows()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(&self.vcycle(r))
    }
}
