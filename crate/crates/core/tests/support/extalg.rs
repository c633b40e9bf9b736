//! Exterior algebra on R^4 in the coordinate basis `dx_I`, `I` increasing,
//! written independently of the proxy code. Used as a test oracle.
#![allow(dead_code)]

use whitney4::proxy4::{FormProxy, Skew4, Vec4};

/// Sign of the permutation sorting `seq` (distinct entries), by bubble sort.
pub fn sort_sign(seq: &[usize]) -> f64 {
    let mut v = seq.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Increasing index sets of size `k` in lexicographic order.
pub fn index_sets(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..16 {
        if mask.count_ones() as usize == k {
            out.push((0..4).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out.sort();
    out
}

/// A `k`-form as coefficients on `index_sets(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub k: usize,
    pub c: Vec<f64>,
}

impl Form {
    pub fn get(&self, set: &[usize]) -> f64 {
        let sets = index_sets(self.k);
        let pos = sets.iter().position(|s| s == set).expect("valid set");
        self.c[pos]
    }

    pub fn wedge(&self, other: &Form) -> Form {
        let k = self.k + other.k;
        let sets = index_sets(k);
        let mut c = vec![0.0; sets.len()];
        for (a, ia) in index_sets(self.k).iter().enumerate() {
            for (b, ib) in index_sets(other.k).iter().enumerate() {
                if ia.iter().any(|i| ib.contains(i)) {
                    continue;
                }
                let joined: Vec<usize> = ia.iter().chain(ib).cloned().collect();
                let mut sorted = joined.clone();
                sorted.sort();
                let pos = sets.iter().position(|s| *s == sorted).unwrap();
                c[pos] += sort_sign(&joined) * self.c[a] * other.c[b];
            }
        }
        Form { k, c }
    }

    /// Value on `k` vectors: `Σ_I ω_I det(v_j[i])_{i ∈ I}`.
    pub fn eval(&self, vecs: &[[f64; 4]]) -> f64 {
        assert_eq!(vecs.len(), self.k);
        index_sets(self.k)
            .iter()
            .zip(&self.c)
            .map(|(set, w)| w * minor(vecs, set))
            .sum()
    }
}

/// Determinant of the `k × k` matrix `[v_j[set_i]]` by Leibniz expansion.
pub fn minor(vecs: &[[f64; 4]], set: &[usize]) -> f64 {
    let k = set.len();
    if k == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for perm in permutations(k) {
        let mut p = sort_sign(&perm);
        for (j, &pj) in perm.iter().enumerate() {
            p *= vecs[j][set[pj]];
        }
        total += p;
    }
    total
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Coordinate coefficients of the form represented by a proxy. A skew proxy
/// entry `(i, j)` belongs to the complementary pair; a vector proxy of a
/// 3-form belongs to the complementary triple.
pub fn from_proxy(p: &FormProxy) -> Form {
    match p {
        FormProxy::Zero(c) => Form { k: 0, c: vec![*c] },
        FormProxy::One(v) => Form { k: 1, c: v.0.to_vec() },
        FormProxy::Two(s) => {
            let c = index_sets(2)
                .iter()
                .map(|kl| {
                    let ij: Vec<usize> = (0..4).filter(|x| !kl.contains(x)).collect();
                    let seq = [ij[0], ij[1], kl[0], kl[1]];
                    sort_sign(&seq) * s.get(ij[0], ij[1])
                })
                .collect();
            Form { k: 2, c }
        }
        FormProxy::Three(w) => {
            let c = index_sets(3)
                .iter()
                .map(|abc| {
                    let d = (0..4).find(|x| !abc.contains(x)).unwrap();
                    sort_sign(&[d, abc[0], abc[1], abc[2]]) * w.0[d]
                })
                .collect();
            Form { k: 3, c }
        }
        FormProxy::Four(c) => Form { k: 4, c: vec![*c] },
    }
}

/// Inverse of [`from_proxy`].
pub fn to_proxy(f: &Form) -> FormProxy {
    match f.k {
        0 => FormProxy::Zero(f.c[0]),
        1 => FormProxy::One(Vec4([f.c[0], f.c[1], f.c[2], f.c[3]])),
        2 => {
            let u: Vec<f64> = index_sets(2)
                .iter()
                .map(|ij| {
                    let kl: Vec<usize> = (0..4).filter(|x| !ij.contains(x)).collect();
                    sort_sign(&[ij[0], ij[1], kl[0], kl[1]]) * f.get(&kl)
                })
                .collect();
            FormProxy::Two(Skew4::from_upper([u[0], u[1], u[2], u[3], u[4], u[5]]))
        }
        3 => FormProxy::Three(Vec4(std::array::from_fn(|d| {
            let abc: Vec<usize> = (0..4).filter(|x| *x != d).collect();
            sort_sign(&[d, abc[0], abc[1], abc[2]]) * f.get(&abc)
        }))),
        _ => FormProxy::Four(f.c[0]),
    }
}

/// Exterior derivative from the partial derivatives of the coefficients,
/// `partials[j]` holding `∂_j ω_I` for every `I`.
pub fn exterior_derivative(k: usize, partials: &[Vec<f64>; 4]) -> Form {
    let sets = index_sets(k + 1);
    let lower = index_sets(k);
    let mut c = vec![0.0; sets.len()];
    for (pos, set) in sets.iter().enumerate() {
        for (m, &j) in set.iter().enumerate() {
            let rest: Vec<usize> = set.iter().cloned().filter(|&x| x != j).collect();
            let idx = lower.iter().position(|s| *s == rest).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            c[pos] += sign * partials[j][idx];
        }
    }
    Form { k: k + 1, c }
}
