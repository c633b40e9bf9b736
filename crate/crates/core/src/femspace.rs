//! Lowest-order Whitney spaces on pentatope meshes: basis evaluation,
//! mass/stiffness assembly, discrete exterior derivatives, loads and errors.
//!
//! The basis function of a `k`-subsimplex `f = (i₀ < … < i_k)` of an element
//! is `Σ_m (−1)^m λ_{i_m} G(f∖i_m)`, where `G` is the proxy of the wedge of
//! barycentric gradients. Its exterior derivative is the constant
//! `(k+1) G(f)`. The canonical degree of freedom of `f` is the average over
//! `f` of the form evaluated on the edge vectors `a_{i_m} − a_{i₀}`, which
//! pairs to one with the basis function of `f` itself.

use crate::error::{arg_err, Error, Result};
use crate::mesh::{local_subsimplices, GeomCache, Mesh4};
use crate::proxy4::{cross_vv, form_eval, skew_apply, FormProxy, Vec4};
use crate::quadrature::QuadratureRule;
use crate::sparse::CsrMatrix;

/// Proxy of `dλ_{f₀} ∧ … ∧ dλ_{f_{k-1}}` for a tuple of local indices.
fn gradient_wedge(grads: &[Vec4; 5], f: &[usize]) -> FormProxy {
    match *f {
        [] => FormProxy::Zero(1.0),
        [a] => FormProxy::One(grads[a]),
        [a, b] => FormProxy::Two(cross_vv(&grads[a], &grads[b])),
        [a, b, c] => FormProxy::Three(skew_apply(&cross_vv(&grads[a], &grads[b]), &grads[c])),
        [a, b, c, d] => {
            let g_bcd = skew_apply(&cross_vv(&grads[b], &grads[c]), &grads[d]);
            FormProxy::Four(grads[a].dot(&g_bcd))
        }
        _ => panic!("gradient wedge of more than four factors"),
    }
}

/// Local basis values without input validation, appended to `out`.
fn whitney_basis_into(k: usize, grads: &[Vec4; 5], bary: &[f64; 5], out: &mut Vec<FormProxy>) {
    out.clear();
    let mut rest = Vec::with_capacity(4);
    for f in local_subsimplices(k) {
        let mut value = FormProxy::zero(k).expect("k <= 3");
        for m in 0..f.len() {
            rest.clear();
            rest.extend(f.iter().enumerate().filter(|&(p, _)| p != m).map(|(_, &i)| i));
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            value.add_scaled(sign * bary[f[m]], &gradient_wedge(grads, &rest));
        }
        out.push(value);
    }
}

fn check_degree(k: usize) -> Result<()> {
    if k > 3 {
        return arg_err(format!("Whitney spaces exist for k = 0..=3, got {k}"));
    }
    Ok(())
}

/// Values of the local Whitney basis of degree `k` at a barycentric point,
/// one per local `k`-subsimplex in lexicographic order.
pub fn whitney_eval(k: usize, grads: &[Vec4; 5], bary: &[f64; 5]) -> Result<Vec<FormProxy>> {
    check_degree(k)?;
    if bary.iter().any(|&l| !(l >= -1e-12)) || (bary.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return arg_err(format!("invalid barycentric coordinates {bary:?}"));
    }
    let mut out = Vec::new();
    whitney_basis_into(k, grads, bary, &mut out);
    Ok(out)
}

/// Constant exterior derivatives of the local basis of degree `k`.
pub fn whitney_derivative(k: usize, grads: &[Vec4; 5]) -> Result<Vec<FormProxy>> {
    check_degree(k)?;
    Ok(local_subsimplices(k)
        .iter()
        .map(|f| gradient_wedge(grads, f).scale((k + 1) as f64))
        .collect())
}

/// Physical coordinates of a barycentric point of element `e`.
pub fn physical_point(mesh: &Mesh4, e: usize, bary: &[f64; 5]) -> [f64; 4] {
    let el = mesh.element(e);
    let mut x = [0.0; 4];
    for (i, &v) in el.iter().enumerate() {
        let a = mesh.vertices()[v as usize];
        for c in 0..4 {
            x[c] += bary[i] * a[c];
        }
    }
    x
}

/// Edge vectors `a_{s_m} − a_{s₀}` of a subsimplex given by vertex ids.
pub fn edge_vectors(mesh: &Mesh4, simplex: &[u32]) -> Vec<Vec4> {
    let a0 = mesh.vertex(simplex[0] as usize);
    simplex[1..].iter().map(|&v| mesh.vertex(v as usize) - a0).collect()
}

/// The global space `V^k` spanned by the Whitney functions of all
/// `k`-subsimplices.
#[derive(Clone, Copy, Debug)]
pub struct WhitneySpace<'a> {
    k: usize,
    mesh: &'a Mesh4,
    geom: &'a GeomCache,
}

impl<'a> WhitneySpace<'a> {
    pub fn new(k: usize, mesh: &'a Mesh4, geom: &'a GeomCache) -> Result<Self> {
        check_degree(k)?;
        if geom.volume.len() != mesh.num_elements() {
            return arg_err("geometry cache does not match the mesh");
        }
        Ok(WhitneySpace { k, mesh, geom })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn mesh(&self) -> &'a Mesh4 {
        self.mesh
    }

    pub fn geometry(&self) -> &'a GeomCache {
        self.geom
    }

    pub fn ndofs(&self) -> usize {
        self.mesh.count(self.k)
    }

    /// Global dof ids and orientation signs of the local basis of element `e`.
    pub fn element_dofs(&self, e: usize) -> (Vec<u32>, Vec<f64>) {
        let dofs = self.mesh.element_dofs(self.k, e);
        let signs = if self.k == 0 {
            vec![1.0; 5]
        } else {
            self.mesh.subsimplices(self.k).element_signs(e).iter().map(|&s| s as f64).collect()
        };
        (dofs, signs)
    }

    fn pattern(&self) -> CsrMatrix {
        let lists: Vec<Vec<u32>> = (0..self.mesh.num_elements()).map(|e| self.element_dofs(e).0).collect();
        CsrMatrix::from_element_pattern(self.ndofs(), lists.iter().map(|v| v.as_slice()))
    }

    /// Value of the discrete field with coefficients `coeffs` at a barycentric
    /// point of element `e`.
    pub fn evaluate(&self, coeffs: &[f64], e: usize, bary: &[f64; 5]) -> FormProxy {
        let mut basis = Vec::new();
        whitney_basis_into(self.k, &self.geom.grads[e], bary, &mut basis);
        let (dofs, signs) = self.element_dofs(e);
        let mut v = FormProxy::zero(self.k).expect("k <= 3");
        for ((b, &d), s) in basis.iter().zip(&dofs).zip(&signs) {
            v.add_scaled(s * coeffs[d as usize], b);
        }
        v
    }
}

/// L² Gram matrix of the global Whitney basis.
pub fn assemble_mass(space: &WhitneySpace, quad: &QuadratureRule) -> Result<CsrMatrix> {
    if quad.degree < 2 {
        return arg_err("mass assembly needs a quadrature rule of degree >= 2");
    }
    let mut m = space.pattern();
    let n = local_subsimplices(space.k).len();
    let mut local = vec![0.0; n * n];
    let mut basis = Vec::with_capacity(n);
    for e in 0..space.mesh.num_elements() {
        local.iter_mut().for_each(|x| *x = 0.0);
        let scale = 24.0 * space.geom.volume[e];
        for (p, w) in quad.points.iter().zip(&quad.weights) {
            whitney_basis_into(space.k, &space.geom.grads[e], p, &mut basis);
            for a in 0..n {
                for b in a..n {
                    local[a * n + b] += w * scale * basis[a].inner(&basis[b]);
                }
            }
        }
        let (dofs, signs) = space.element_dofs(e);
        for a in 0..n {
            for b in a..n {
                let v = local[a * n + b] * signs[a] * signs[b];
                local[a * n + b] = v;
                local[b * n + a] = v;
            }
        }
        m.add_local(&dofs, &local);
    }
    m.prune_zeros();
    Ok(m)
}

/// Gram matrix of the exterior derivatives, `(dλ_f, dλ_g)`.
pub fn assemble_stiffness(space: &WhitneySpace) -> Result<CsrMatrix> {
    let mut m = space.pattern();
    let n = local_subsimplices(space.k).len();
    let mut local = vec![0.0; n * n];
    for e in 0..space.mesh.num_elements() {
        let d = whitney_derivative(space.k, &space.geom.grads[e])?;
        let (dofs, signs) = space.element_dofs(e);
        let vol = space.geom.volume[e];
        for a in 0..n {
            for b in a..n {
                let v = vol * d[a].inner(&d[b]) * signs[a] * signs[b];
                local[a * n + b] = v;
                local[b * n + a] = v;
            }
        }
        m.add_local(&dofs, &local);
    }
    Ok(m)
}

/// Matrix of `τ (u, v) + (du, dv)`; mass and stiffness share a pattern.
pub fn assemble_operator(space: &WhitneySpace, quad: &QuadratureRule, tau: f64) -> Result<CsrMatrix> {
    let mass = assemble_mass(space, quad)?;
    let stiff = assemble_stiffness(space)?;
    weighted_sum(&mass, &stiff, tau)
}

/// `τ M + K` for separately assembled mass and stiffness matrices.
pub fn weighted_sum(mass: &CsrMatrix, stiff: &CsrMatrix, tau: f64) -> Result<CsrMatrix> {
    if !(tau > 0.0) {
        return arg_err(format!("weight tau must be positive, got {tau}"));
    }
    match mass.combine_same_pattern(tau, stiff, 1.0) {
        Ok(m) => Ok(m),
        Err(_) => {
            // patterns differ after zero pruning; fall back to a merge
            let mut trip = Vec::with_capacity(mass.nnz() + stiff.nnz());
            for (mat, s) in [(mass, tau), (stiff, 1.0)] {
                for r in 0..mat.nrows() {
                    let (cols, vals) = mat.row(r);
                    trip.extend(cols.iter().zip(vals).map(|(&c, &v)| (r, c as usize, s * v)));
                }
            }
            CsrMatrix::from_triplets(mass.nrows(), mass.ncols(), &trip)
        }
    }
}

fn round_integer(x: f64) -> Result<f64> {
    let r = x.round();
    if (x - r).abs() > 1e-10 {
        return Err(Error::Assembly(format!("derivative entry {x} is not an integer")));
    }
    Ok(r)
}

/// Sparse matrix `D_k` mapping `k`-coefficients to `(k+1)`-coefficients of the
/// exterior derivative, `k = 0..=2`. Entries are canonical `(k+1)`-dofs of
/// the derivatives of the `k`-basis, computed per element and checked for
/// agreement between elements that share a subsimplex.
pub fn derivative_matrix(mesh: &Mesh4, geom: &GeomCache, k: usize) -> Result<CsrMatrix> {
    if k > 2 {
        return arg_err(format!("derivative matrices exist for k = 0..=2, got {k}"));
    }
    let nrows = mesh.count(k + 1);
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nrows];
    let lo = local_subsimplices(k);
    let hi = local_subsimplices(k + 1);
    let signs_of = |deg: usize, e: usize| -> Vec<f64> {
        if deg == 0 {
            vec![1.0; 5]
        } else {
            mesh.subsimplices(deg).element_signs(e).iter().map(|&s| s as f64).collect()
        }
    };
    for e in 0..mesh.num_elements() {
        let d = whitney_derivative(k, &geom.grads[e])?;
        let lo_ids = mesh.element_dofs(k, e);
        let hi_ids = mesh.element_dofs(k + 1, e);
        let lo_signs = signs_of(k, e);
        let hi_signs = signs_of(k + 1, e);
        for (gi, g) in hi.iter().enumerate() {
            let simplex: Vec<u32> = g.iter().map(|&i| mesh.element(e)[i]).collect();
            let vecs = edge_vectors(mesh, &simplex);
            for (fi, f) in lo.iter().enumerate() {
                let raw = form_eval(&d[fi], &vecs)?;
                let value = round_integer(raw)? * lo_signs[fi] * hi_signs[gi];
                let incident = f.iter().all(|i| g.contains(i));
                if !incident {
                    if value != 0.0 {
                        return Err(Error::Assembly(format!(
                            "element {e}: nonzero derivative moment on a non-incident pair"
                        )));
                    }
                    continue;
                }
                let row = &mut rows[hi_ids[gi] as usize];
                let col = lo_ids[fi];
                match row.iter().find(|(c, _)| *c == col) {
                    Some(&(_, prev)) if prev != value => {
                        return Err(Error::Assembly(format!(
                            "element {e}: derivative entry ({}, {col}) is {value}, previously {prev}",
                            hi_ids[gi]
                        )));
                    }
                    Some(_) => {}
                    None => row.push((col, value)),
                }
            }
        }
    }
    let trip: Vec<(usize, usize, f64)> = rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c as usize, v)))
        .collect();
    CsrMatrix::from_triplets(nrows, mesh.count(k), &trip)
}

/// Load vector `F_j = τ (u, λ_j) + (du, dλ_j)` for an exact solution `u`
/// with exterior derivative `du`.
pub fn assemble_load<U, DU>(space: &WhitneySpace, quad: &QuadratureRule, u: U, du: DU, tau: f64) -> Result<Vec<f64>>
where
    U: Fn(&[f64; 4]) -> FormProxy,
    DU: Fn(&[f64; 4]) -> FormProxy,
{
    if quad.degree < 5 {
        return arg_err("load assembly needs a quadrature rule of degree >= 5");
    }
    let mut f = vec![0.0; space.ndofs()];
    let mut basis = Vec::new();
    for e in 0..space.mesh.num_elements() {
        let dbasis = whitney_derivative(space.k, &space.geom.grads[e])?;
        let (dofs, signs) = space.element_dofs(e);
        let scale = 24.0 * space.geom.volume[e];
        let mut local = vec![0.0; dofs.len()];
        for (p, w) in quad.points.iter().zip(&quad.weights) {
            let x = physical_point(space.mesh, e, p);
            let (ux, dux) = (u(&x), du(&x));
            if ux.degree() != space.k || dux.degree() != space.k + 1 {
                return arg_err("exact solution has the wrong form degree");
            }
            whitney_basis_into(space.k, &space.geom.grads[e], p, &mut basis);
            for a in 0..dofs.len() {
                local[a] += w * scale * (tau * ux.inner(&basis[a]) + dux.inner(&dbasis[a]));
            }
        }
        for a in 0..dofs.len() {
            f[dofs[a] as usize] += signs[a] * local[a];
        }
    }
    Ok(f)
}

/// `‖u_h − u‖_{L²}` by elementwise quadrature.
pub fn l2_error<U>(space: &WhitneySpace, coeffs: &[f64], u: U, quad: &QuadratureRule) -> Result<f64>
where
    U: Fn(&[f64; 4]) -> FormProxy,
{
    if coeffs.len() != space.ndofs() {
        return arg_err(format!("expected {} coefficients, got {}", space.ndofs(), coeffs.len()));
    }
    let mut sum = 0.0;
    for e in 0..space.mesh.num_elements() {
        let scale = 24.0 * space.geom.volume[e];
        for (p, w) in quad.points.iter().zip(&quad.weights) {
            let x = physical_point(space.mesh, e, p);
            let mut diff = space.evaluate(coeffs, e, p);
            let exact = u(&x);
            if exact.degree() != space.k {
                return arg_err("exact solution has the wrong form degree");
            }
            diff.add_scaled(-1.0, &exact);
            sum += w * scale * diff.inner(&diff);
        }
    }
    Ok(sum.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::kuhn_unit_tesseract;
    use crate::quadrature::gm_quadrature;

    fn reference() -> Mesh4 {
        let v = vec![
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        Mesh4::new(v, vec![[0, 1, 2, 3, 4]]).unwrap()
    }

    #[test]
    fn invalid_inputs() {
        let m = reference();
        let g = m.geometry().unwrap();
        assert!(whitney_eval(4, &g.grads[0], &[0.2; 5]).is_err());
        assert!(whitney_eval(1, &g.grads[0], &[0.5, 0.5, 0.5, -0.5, 0.0]).is_err());
        assert!(whitney_eval(1, &g.grads[0], &[0.3; 5]).is_err());
        assert!(derivative_matrix(&m, &g, 3).is_err());
        let q1 = gm_quadrature(1).unwrap();
        let s = WhitneySpace::new(0, &m, &g).unwrap();
        assert!(assemble_mass(&s, &q1).is_err());
        let q3 = gm_quadrature(3).unwrap();
        assert!(assemble_load(&s, &q3, |_| FormProxy::Zero(0.0), |_| FormProxy::One(Vec4::ZERO), 1.0).is_err());
    }

    #[test]
    fn vertex_basis_at_vertices() {
        let m = reference();
        let g = m.geometry().unwrap();
        for i in 0..5 {
            let mut b = [0.0; 5];
            b[i] = 1.0;
            let v = whitney_eval(0, &g.grads[0], &b).unwrap();
            for (j, p) in v.iter().enumerate() {
                assert_eq!(*p, FormProxy::Zero(if i == j { 1.0 } else { 0.0 }));
            }
        }
    }

    #[test]
    fn edge_basis_on_reference_edge() {
        let m = reference();
        let g = m.geometry().unwrap();
        // midpoint of the edge between local vertices 1 and 2
        let v = whitney_eval(1, &g.grads[0], &[0.0, 0.5, 0.5, 0.0, 0.0]).unwrap();
        // local edge (1,2) is the fifth in lexicographic order
        assert_eq!(local_subsimplices(1)[4], vec![1, 2]);
        let FormProxy::One(b) = v[4] else { panic!() };
        let (a1, a2) = (m.vertex(1), m.vertex(2));
        assert!((b.dot(&(a1 - a2)) + 1.0).abs() < 1e-15);
        assert!((b.dot(&(a2 - a1)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reference_mass_for_vertex_basis() {
        let m = reference();
        let g = m.geometry().unwrap();
        let s = WhitneySpace::new(0, &m, &g).unwrap();
        let mass = assemble_mass(&s, &gm_quadrature(2).unwrap()).unwrap();
        let t = 1.0 / 24.0;
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { t / 15.0 } else { t / 30.0 };
                assert!((mass.get(i, j) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn constant_gradient_vanishes() {
        let m = kuhn_unit_tesseract(1).unwrap();
        let g = m.geometry().unwrap();
        let d0 = derivative_matrix(&m, &g, 0).unwrap();
        assert!(d0.mul_vec(&vec![1.0; m.num_vertices()]).iter().all(|&x| x == 0.0));
        for r in 0..d0.nrows() {
            let (cols, vals) = d0.row(r);
            let e = m.subsimplices(1).simplex(r);
            assert_eq!(cols, e);
            assert_eq!(vals, &[-1.0, 1.0]);
        }
    }
}
