//! Proxies of differential forms in four dimensions.
//!
//! A `k`-form on R⁴ is represented by a scalar (`k = 0, 4`), a 4-vector
//! (`k = 1, 3`) or a 4×4 skew-symmetric matrix (`k = 2`). The operations in
//! this module express wedge products, evaluation on vectors and the first
//! order derivatives in terms of these proxies using the Levi-Civita symbol.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{arg_err, Result};

/// Increasing index pairs, the storage order of [`Skew4`].
pub const SKEW_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Proxy of a 1-form or a 3-form.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Vec4([a, b, c, d])
    }

    /// Unit vector along axis `i` (zero-based).
    pub fn unit(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        Vec4(v)
    }

    pub fn dot(&self, other: &Vec4) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, o: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for Vec4 {
    fn add_assign(&mut self, o: Vec4) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, o: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        Vec4(self.0.map(|x| -x))
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, s: f64) -> Vec4 {
        Vec4(self.0.map(|x| x * s))
    }
}

/// Proxy of a 2-form: a skew-symmetric 4×4 matrix stored by its entries
/// above the diagonal in [`SKEW_PAIRS`] order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Skew4 {
    pub upper: [f64; 6],
}

impl Skew4 {
    pub const ZERO: Skew4 = Skew4 { upper: [0.0; 6] };

    pub fn from_upper(upper: [f64; 6]) -> Self {
        Skew4 { upper }
    }

    /// Position of the pair `(i, j)`, `i < j`, in the storage order.
    pub fn pair_index(i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < 4);
        match (i, j) {
            (0, 1) => 0,
            (0, 2) => 1,
            (0, 3) => 2,
            (1, 2) => 3,
            (1, 3) => 4,
            _ => 5,
        }
    }

    /// Entry `(i, j)` of the reconstructed matrix (zero-based).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[Self::pair_index(i, j)],
            Greater => -self.upper[Self::pair_index(j, i)],
            Equal => 0.0,
        }
    }

    pub fn to_matrix(&self) -> Mat4 {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self.get(i, j))))
    }

    /// Sum over increasing pairs of entry products, i.e. half the Frobenius
    /// product of the full matrices.
    pub fn dot(&self, other: &Skew4) -> f64 {
        self.upper.iter().zip(other.upper.iter()).map(|(a, b)| a * b).sum()
    }

    /// Frobenius product `κ : η` of the full matrices.
    pub fn frobenius(&self, other: &Skew4) -> f64 {
        2.0 * self.dot(other)
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|x| x.is_finite())
    }
}

impl Add for Skew4 {
    type Output = Skew4;
    fn add(self, o: Skew4) -> Skew4 {
        Skew4 { upper: std::array::from_fn(|i| self.upper[i] + o.upper[i]) }
    }
}

impl AddAssign for Skew4 {
    fn add_assign(&mut self, o: Skew4) {
        for i in 0..6 {
            self.upper[i] += o.upper[i];
        }
    }
}

impl Sub for Skew4 {
    type Output = Skew4;
    fn sub(self, o: Skew4) -> Skew4 {
        Skew4 { upper: std::array::from_fn(|i| self.upper[i] - o.upper[i]) }
    }
}

impl Neg for Skew4 {
    type Output = Skew4;
    fn neg(self) -> Skew4 {
        Skew4 { upper: self.upper.map(|x| -x) }
    }
}

impl Mul<f64> for Skew4 {
    type Output = Skew4;
    fn mul(self, s: f64) -> Skew4 {
        Skew4 { upper: self.upper.map(|x| x * s) }
    }
}

/// General 4×4 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat4(pub [[f64; 4]; 4]);

impl Mat4 {
    pub fn identity() -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 })))
    }

    pub fn from_columns(cols: [Vec4; 4]) -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| cols[j].0[i])))
    }

    pub fn transpose(&self) -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    pub fn mul_vec(&self, v: &Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| (0..4).map(|j| self.0[i][j] * v.0[j]).sum()))
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> f64 {
        let m = &self.0;
        let minor = |c: usize| {
            let cols: Vec<usize> = (0..4).filter(|&x| x != c).collect();
            let a = |r: usize, k: usize| m[r][cols[k]];
            a(1, 0) * (a(2, 1) * a(3, 2) - a(2, 2) * a(3, 1))
                - a(1, 1) * (a(2, 0) * a(3, 2) - a(2, 2) * a(3, 0))
                + a(1, 2) * (a(2, 0) * a(3, 1) - a(2, 1) * a(3, 0))
        };
        m[0][0] * minor(0) - m[0][1] * minor(1) + m[0][2] * minor(2) - m[0][3] * minor(3)
    }
}

/// Determinant of the matrix with the given columns.
pub fn det4(cols: [Vec4; 4]) -> f64 {
    Mat4::from_columns(cols).det()
}

/// The proxy of a `k`-form, `k = 0..=4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormProxy {
    Zero(f64),
    One(Vec4),
    Two(Skew4),
    Three(Vec4),
    Four(f64),
}

impl FormProxy {
    pub fn degree(&self) -> usize {
        match self {
            FormProxy::Zero(_) => 0,
            FormProxy::One(_) => 1,
            FormProxy::Two(_) => 2,
            FormProxy::Three(_) => 3,
            FormProxy::Four(_) => 4,
        }
    }

    /// The zero form of degree `k`.
    pub fn zero(k: usize) -> Result<Self> {
        Ok(match k {
            0 => FormProxy::Zero(0.0),
            1 => FormProxy::One(Vec4::ZERO),
            2 => FormProxy::Two(Skew4::ZERO),
            3 => FormProxy::Three(Vec4::ZERO),
            4 => FormProxy::Four(0.0),
            _ => return arg_err(format!("form degree {k} exceeds 4")),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        match *self {
            FormProxy::Zero(c) => FormProxy::Zero(c * s),
            FormProxy::One(v) => FormProxy::One(v * s),
            FormProxy::Two(k) => FormProxy::Two(k * s),
            FormProxy::Three(v) => FormProxy::Three(v * s),
            FormProxy::Four(c) => FormProxy::Four(c * s),
        }
    }

    /// Proxy components as a flat slice view (1, 4 or 6 numbers).
    pub fn components(&self) -> &[f64] {
        match self {
            FormProxy::Zero(c) | FormProxy::Four(c) => std::slice::from_ref(c),
            FormProxy::One(v) | FormProxy::Three(v) => &v.0,
            FormProxy::Two(k) => &k.upper,
        }
    }

    fn components_mut(&mut self) -> &mut [f64] {
        match self {
            FormProxy::Zero(c) | FormProxy::Four(c) => std::slice::from_mut(c),
            FormProxy::One(v) | FormProxy::Three(v) => &mut v.0,
            FormProxy::Two(k) => &mut k.upper,
        }
    }

    /// `self += s * other`. Panics if the degrees differ.
    pub fn add_scaled(&mut self, s: f64, other: &FormProxy) {
        assert_eq!(self.degree(), other.degree(), "form degree mismatch");
        for (a, b) in self.components_mut().iter_mut().zip(other.components()) {
            *a += s * b;
        }
    }

    /// Pointwise inner product of two proxies of equal degree. For 2-forms
    /// this is the sum over increasing index pairs, so that the induced norm
    /// is the Euclidean norm of the form's components. Panics if the
    /// degrees differ.
    pub fn inner(&self, other: &FormProxy) -> f64 {
        assert_eq!(self.degree(), other.degree(), "form degree mismatch");
        self.components().iter().zip(other.components()).map(|(a, b)| a * b).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|x| x.is_finite())
    }
}

fn permutation_sign(idx: [usize; 4]) -> i8 {
    for a in 0..4 {
        for b in a + 1..4 {
            if idx[a] == idx[b] {
                return 0;
            }
        }
    }
    let mut inversions = 0;
    for a in 0..4 {
        for b in a + 1..4 {
            if idx[a] > idx[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn eps_table() -> &'static [i8; 256] {
    static TABLE: OnceLock<[i8; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        std::array::from_fn(|n| permutation_sign([n & 3, (n >> 2) & 3, (n >> 4) & 3, (n >> 6) & 3]))
    })
}

/// Levi-Civita symbol with zero-based indices, no range check.
#[inline]
pub(crate) fn eps(i: usize, j: usize, k: usize, l: usize) -> f64 {
    eps_table()[i | (j << 2) | (k << 4) | (l << 6)] as f64
}

/// Levi-Civita symbol `ε_{ijkl}` for one-based indices in `1..=4`.
pub fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> Result<i8> {
    let idx = [i, j, k, l];
    if idx.iter().any(|&x| !(1..=4).contains(&x)) {
        return arg_err(format!("Levi-Civita indices must lie in 1..=4, got {idx:?}"));
    }
    Ok(eps_table()[(i - 1) | ((j - 1) << 2) | ((k - 1) << 4) | ((l - 1) << 6)])
}

/// `[u × v]_{ij} = Σ_{k,l} ε_{ijkl} u_k v_l`.
pub fn cross_vv(u: &Vec4, v: &Vec4) -> Skew4 {
    Skew4 {
        upper: SKEW_PAIRS.map(|(i, j)| {
            let mut s = 0.0;
            for k in 0..4 {
                for l in 0..4 {
                    s += eps(i, j, k, l) * u.0[k] * v.0[l];
                }
            }
            s
        }),
    }
}

/// `κ × η = Σ_{i<j} Σ_{k<l} ε_{ijkl} κ_{ij} η_{kl}`.
pub fn cross_kk(kappa: &Skew4, eta: &Skew4) -> f64 {
    let mut s = 0.0;
    for (p, &(i, j)) in SKEW_PAIRS.iter().enumerate() {
        for (q, &(k, l)) in SKEW_PAIRS.iter().enumerate() {
            s += eps(i, j, k, l) * kappa.upper[p] * eta.upper[q];
        }
    }
    s
}

/// Matrix-vector product of the reconstructed skew matrix with `v`.
pub fn skew_apply(kappa: &Skew4, v: &Vec4) -> Vec4 {
    Vec4(std::array::from_fn(|i| (0..4).map(|j| kappa.get(i, j) * v.0[j]).sum()))
}

/// `[K m]_{ij} = Σ_{k,l} ε_{ijkl} m_{kl}`.
pub fn k_map(m: &Mat4) -> Skew4 {
    Skew4 {
        upper: SKEW_PAIRS.map(|(i, j)| {
            let mut s = 0.0;
            for k in 0..4 {
                for l in 0..4 {
                    s += eps(i, j, k, l) * m.0[k][l];
                }
            }
            s
        }),
    }
}

/// Curl of a vector field from its Jacobian, `jac[k][l] = ∂_k w_l`.
pub fn curl_from_jacobian(jac: &Mat4) -> Skew4 {
    k_map(jac)
}

/// Row-wise divergence of a skew field, `partials[j] = ∂_j κ`.
pub fn div_skew_from_partials(partials: &[Skew4; 4]) -> Vec4 {
    Vec4(std::array::from_fn(|i| (0..4).map(|j| partials[j].get(i, j)).sum()))
}

/// Divergence of a vector field from its Jacobian, `jac[k][l] = ∂_k w_l`.
pub fn div_from_jacobian(jac: &Mat4) -> f64 {
    (0..4).map(|i| jac.0[i][i]).sum()
}

/// Wedge product of two forms expressed through their proxies.
pub fn wedge(phi: &FormProxy, eta: &FormProxy) -> Result<FormProxy> {
    use FormProxy::*;
    if phi.degree() + eta.degree() > 4 {
        return arg_err(format!(
            "wedge of degrees {} and {} exceeds 4",
            phi.degree(),
            eta.degree()
        ));
    }
    Ok(match (phi, eta) {
        (Zero(c), other) | (other, Zero(c)) => other.scale(*c),
        (One(a), One(b)) => Two(cross_vv(a, b)),
        (One(v), Two(k)) | (Two(k), One(v)) => Three(skew_apply(k, v)),
        (One(a), Three(b)) => Four(a.dot(b)),
        (Three(b), One(a)) => Four(-a.dot(b)),
        (Two(a), Two(b)) => Four(cross_kk(a, b)),
        _ => unreachable!("degree sum checked above"),
    })
}

/// Value of a `k`-form on `k` vectors.
pub fn form_eval(phi: &FormProxy, vectors: &[Vec4]) -> Result<f64> {
    if vectors.len() != phi.degree() {
        return arg_err(format!(
            "a {}-form takes {} vectors, got {}",
            phi.degree(),
            phi.degree(),
            vectors.len()
        ));
    }
    Ok(match phi {
        FormProxy::Zero(c) => *c,
        FormProxy::One(p) => p.dot(&vectors[0]),
        FormProxy::Two(p) => p.dot(&cross_vv(&vectors[0], &vectors[1])),
        FormProxy::Three(p) => det4([*p, vectors[0], vectors[1], vectors[2]]),
        FormProxy::Four(c) => c * det4([vectors[0], vectors[1], vectors[2], vectors[3]]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn rvec(seed: &mut u64) -> Vec4 {
        Vec4(std::array::from_fn(|_| lcg(seed)))
    }

    fn rskew(seed: &mut u64) -> Skew4 {
        Skew4::from_upper(std::array::from_fn(|_| lcg(seed)))
    }

    #[test]
    fn levi_civita_values() {
        assert_eq!(levi_civita(1, 2, 3, 4).unwrap(), 1);
        assert_eq!(levi_civita(1, 1, 3, 4).unwrap(), 0);
        assert_eq!(levi_civita(2, 1, 3, 4).unwrap(), -1);
        assert!(levi_civita(0, 1, 2, 3).is_err());
        assert!(levi_civita(1, 2, 3, 5).is_err());
    }

    #[test]
    fn levi_civita_matches_brute_force_inversions() {
        // (3,4,1,2): inversions (3,1),(3,2),(4,1),(4,2) -> 4 -> even
        assert_eq!(levi_civita(3, 4, 1, 2).unwrap(), 1);
        for i in 1..=4 {
            for j in 1..=4 {
                for k in 1..=4 {
                    for l in 1..=4 {
                        let idx = [i, j, k, l];
                        let mut distinct = true;
                        let mut inv = 0;
                        for a in 0..4 {
                            for b in a + 1..4 {
                                distinct &= idx[a] != idx[b];
                                inv += (idx[a] > idx[b]) as i32;
                            }
                        }
                        let expect = if !distinct { 0 } else if inv % 2 == 0 { 1 } else { -1 };
                        assert_eq!(levi_civita(i, j, k, l).unwrap(), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn cross_vv_basis_and_antisymmetry() {
        let c = cross_vv(&Vec4::unit(0), &Vec4::unit(1));
        assert_eq!(c.upper, [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let mut seed = 7;
        for _ in 0..100 {
            let u = rvec(&mut seed);
            let v = rvec(&mut seed);
            let a = cross_vv(&u, &v);
            let b = cross_vv(&v, &u);
            for p in 0..6 {
                assert!((a.upper[p] + b.upper[p]).abs() < 1e-15);
            }
            assert_eq!(cross_vv(&u, &u).upper.map(|x| x.abs() < 1e-15), [true; 6]);
        }
    }

    #[test]
    fn cross_kk_examples() {
        let mut k12 = Skew4::ZERO;
        k12.upper[0] = 1.0;
        let mut k34 = Skew4::ZERO;
        k34.upper[5] = 1.0;
        assert_eq!(cross_kk(&k12, &k34), 1.0);
        assert_eq!(cross_kk(&k12, &k12), 0.0);
        let mut seed = 11;
        for _ in 0..100 {
            let a = rskew(&mut seed);
            let b = rskew(&mut seed);
            assert!((cross_kk(&a, &b) - cross_kk(&b, &a)).abs() < 1e-14);
        }
    }

    #[test]
    fn skew_apply_examples() {
        let mut seed = 3;
        let v = rvec(&mut seed);
        assert_eq!(skew_apply(&Skew4::ZERO, &v), Vec4::ZERO);
        let mut k12 = Skew4::ZERO;
        k12.upper[0] = 1.0;
        // dense multiply: row 0 has m[0][1] = 1, row 1 has m[1][0] = -1
        let m = k12.to_matrix();
        let e2 = Vec4::unit(1);
        assert_eq!(skew_apply(&k12, &e2), m.mul_vec(&e2));
        assert_eq!(skew_apply(&k12, &e2), Vec4::unit(0));
        for _ in 0..100 {
            let k = rskew(&mut seed);
            let v = rvec(&mut seed);
            assert!(v.dot(&skew_apply(&k, &v)).abs() < 1e-14);
        }
    }

    #[test]
    fn k_map_properties() {
        assert_eq!(k_map(&Mat4::identity()), Skew4::ZERO);
        let mut seed = 5;
        let a = Mat4(std::array::from_fn(|_| std::array::from_fn(|_| lcg(&mut seed))));
        let sym = Mat4(std::array::from_fn(|i| std::array::from_fn(|j| a.0[i][j] + a.0[j][i])));
        assert!(k_map(&sym).upper.iter().all(|x| x.abs() < 1e-14));
        for p in 0..6 {
            let mut basis = Skew4::ZERO;
            basis.upper[p] = 1.0;
            let twice = k_map(&k_map(&basis.to_matrix()).to_matrix());
            assert_eq!(twice, basis * 4.0);
        }
    }

    #[test]
    fn wedge_degree_overflow_is_rejected() {
        let a = FormProxy::Three(Vec4::unit(0));
        let b = FormProxy::Two(Skew4::ZERO);
        assert!(wedge(&a, &b).is_err());
    }

    #[test]
    fn form_eval_examples() {
        let phi = FormProxy::One(Vec4::new(1.0, 2.0, 3.0, 4.0));
        let v = Vec4::new(1.0, 0.0, -1.0, 2.0);
        assert_eq!(form_eval(&phi, &[v]).unwrap(), 6.0);
        let vol = FormProxy::Four(2.5);
        let basis = [0, 1, 2, 3].map(Vec4::unit);
        assert_eq!(form_eval(&vol, &basis).unwrap(), 2.5);
        let mut seed = 9;
        let two = FormProxy::Two(rskew(&mut seed));
        let u = rvec(&mut seed);
        assert!(form_eval(&two, &[u, u]).unwrap().abs() < 1e-15);
        assert!(form_eval(&two, &[u]).is_err());
    }

    #[test]
    fn det_of_identity_and_swap() {
        let cols = [0, 1, 2, 3].map(Vec4::unit);
        assert_eq!(det4(cols), 1.0);
        assert_eq!(det4([cols[1], cols[0], cols[2], cols[3]]), -1.0);
    }
}
