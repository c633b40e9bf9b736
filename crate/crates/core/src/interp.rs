//! Canonical interpolants from componentwise-linear Lagrange fields into the
//! Whitney spaces, stored as sparse matrices.
//!
//! For a field with piecewise-linear components the average of a linear
//! integrand over a subsimplex is the mean of its vertex values, so each row
//! has `(k+1) · n_k` entries and needs no quadrature.

use crate::error::{arg_err, Result};
use crate::mesh::Mesh4;
use crate::proxy4::{cross_vv, det4, FormProxy, Vec4};
use crate::sparse::CsrMatrix;

/// Number of proxy components of a `k`-form.
pub const fn components(k: usize) -> usize {
    match k {
        0 | 4 => 1,
        1 | 3 => 4,
        _ => 6,
    }
}

/// `n_k` copies of the vertex Lagrange space, component-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LagrangeProductSpace {
    pub components: usize,
    pub nvertices: usize,
}

impl LagrangeProductSpace {
    pub fn for_degree(k: usize, mesh: &Mesh4) -> Self {
        LagrangeProductSpace { components: components(k), nvertices: mesh.num_vertices() }
    }

    pub fn ndofs(&self) -> usize {
        self.components * self.nvertices
    }

    pub fn index(&self, component: usize, vertex: usize) -> usize {
        component * self.nvertices + vertex
    }
}

/// Component-major nodal values of a proxy field at the mesh vertices.
pub fn nodal_values<F: Fn(&[f64; 4]) -> FormProxy>(mesh: &Mesh4, field: F) -> Vec<f64> {
    let nv = mesh.num_vertices();
    let mut out = Vec::new();
    for (v, x) in mesh.vertices().iter().enumerate() {
        let p = field(x);
        let comps = p.components();
        if out.is_empty() {
            out = vec![0.0; comps.len() * nv];
        }
        for (c, &val) in comps.iter().enumerate() {
            out[c * nv + v] = val;
        }
    }
    out
}

/// `Π_k` as a sparse matrix of shape `(#k-subsimplices) × (n_k · #vertices)`.
#[derive(Clone, Debug)]
pub struct InterpolantMatrix {
    pub degree: usize,
    pub source: LagrangeProductSpace,
    pub matrix: CsrMatrix,
}

impl InterpolantMatrix {
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.matrix.ncols() {
            return arg_err(format!("interpolant expects {} values, got {}", self.matrix.ncols(), x.len()));
        }
        Ok(self.matrix.mul_vec(x))
    }

    pub fn transpose_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.matrix.nrows() {
            return arg_err(format!("interpolant transpose expects {} values, got {}", self.matrix.nrows(), y.len()));
        }
        Ok(self.matrix.mul_vec_transposed(y))
    }
}

/// Moment weights of a subsimplex: the fixed vector/bivector against which
/// field values are contracted.
fn moment_weights(mesh: &Mesh4, k: usize, simplex: &[u32]) -> Vec<f64> {
    let a0 = mesh.vertex(simplex[0] as usize);
    let v: Vec<Vec4> = simplex[1..].iter().map(|&i| mesh.vertex(i as usize) - a0).collect();
    match k {
        0 => vec![1.0],
        1 => v[0].0.to_vec(),
        2 => cross_vv(&v[0], &v[1]).upper.to_vec(),
        _ => (0..4).map(|c| det4([Vec4::unit(c), v[0], v[1], v[2]])).collect(),
    }
}

pub fn interpolant_matrix(mesh: &Mesh4, k: usize) -> Result<InterpolantMatrix> {
    if k > 3 {
        return arg_err(format!("interpolants exist for k = 0..=3, got {k}"));
    }
    let source = LagrangeProductSpace::for_degree(k, mesh);
    let n = mesh.count(k);
    let mut trip = Vec::with_capacity(n * (k + 1) * source.components);
    for f in 0..n {
        let simplex: Vec<u32> = if k == 0 { vec![f as u32] } else { mesh.subsimplices(k).simplex(f).to_vec() };
        let t = moment_weights(mesh, k, &simplex);
        let share = 1.0 / (k + 1) as f64;
        for (c, &tc) in t.iter().enumerate() {
            for &vtx in &simplex {
                trip.push((f, source.index(c, vtx as usize), share * tc));
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(n, source.ndofs(), &trip)?;
    Ok(InterpolantMatrix { degree: k, source, matrix })
}

/// Edge interpolant into `V¹`.
pub fn pi_curl_matrix(mesh: &Mesh4) -> Result<InterpolantMatrix> {
    interpolant_matrix(mesh, 1)
}

/// Triangle interpolant into `V²`.
pub fn pi_div_matrix(mesh: &Mesh4) -> Result<InterpolantMatrix> {
    interpolant_matrix(mesh, 2)
}

/// Tetrahedron-flux interpolant into `V³`.
pub fn pi_div4_matrix(mesh: &Mesh4) -> Result<InterpolantMatrix> {
    interpolant_matrix(mesh, 3)
}
