//! Compressed sparse row matrices with deterministic assembly.

use std::io::Write;

use crate::error::{arg_err, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n as u32).collect(),
            values: vec![1.0; n],
        }
    }

    /// Build from `(row, col, value)` triplets. Duplicates are summed in
    /// input order and exact zeros are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(t) = triplets.iter().find(|t| t.0 >= nrows || t.1 >= ncols) {
            return arg_err(format!("triplet ({}, {}) outside {nrows}x{ncols}", t.0, t.1));
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&i| (triplets[i].0, triplets[i].1));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &i in &order {
            let (r, c, v) = triplets[i];
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c as u32);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = CsrMatrix { nrows, ncols, indptr, indices, values };
        m.prune_zeros();
        Ok(m)
    }

    /// Square matrix whose pattern couples every pair of dofs that share an
    /// element; values start at zero.
    pub fn from_element_pattern<'a, I>(n: usize, elements: I) -> Self
    where
        I: IntoIterator<Item = &'a [u32]>,
    {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        for dofs in elements {
            for &r in dofs {
                rows[r as usize].extend_from_slice(dofs);
            }
        }
        let mut indptr = Vec::with_capacity(n + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            indices.extend_from_slice(row);
            indptr.push(indices.len());
        }
        let nnz = indices.len();
        CsrMatrix { nrows: n, ncols: n, indptr, indices, values: vec![0.0; nnz] }
    }

    /// Add a dense local block into an existing pattern entry-by-entry.
    /// Panics if an entry is missing from the pattern.
    pub fn add_local(&mut self, dofs: &[u32], local: &[f64]) {
        let n = dofs.len();
        for (a, &r) in dofs.iter().enumerate() {
            let r = r as usize;
            let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
            let cols = &self.indices[lo..hi];
            for (b, &c) in dofs.iter().enumerate() {
                let pos = cols.binary_search(&c).expect("entry missing from pattern");
                self.values[lo + pos] += local[a * n + b];
            }
        }
    }

    pub fn prune_zeros(&mut self) {
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        indptr.push(0);
        let mut w = 0;
        for r in 0..self.nrows {
            for p in self.indptr[r]..self.indptr[r + 1] {
                if self.values[p] != 0.0 {
                    self.indices[w] = self.indices[p];
                    self.values[w] = self.values[p];
                    w += 1;
                }
            }
            indptr.push(w);
        }
        self.indices.truncate(w);
        self.values.truncate(w);
        self.indptr = indptr;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column ids and values of row `r`.
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&(c as u32)).map(|p| vals[p]).unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
            let mut s = 0.0;
            for p in lo..hi {
                s += self.values[p] * x[self.indices[p] as usize];
            }
            *yr = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = Aᵀ x`.
    pub fn mul_vec_transposed_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            for p in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[p] as usize] += self.values[p] * xr;
            }
        }
    }

    pub fn mul_vec_transposed(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols];
        self.mul_vec_transposed_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c as usize + 1] += 1;
        }
        for c in 0..self.ncols {
            counts[c + 1] += counts[c];
        }
        let mut next = counts.clone();
        let mut indices = vec![0u32; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.nrows {
            for p in self.indptr[r]..self.indptr[r + 1] {
                let c = self.indices[p] as usize;
                indices[next[c]] = r as u32;
                values[next[c]] = self.values[p];
                next[c] += 1;
            }
        }
        CsrMatrix { nrows: self.ncols, ncols: self.nrows, indptr: counts, indices, values }
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.ncols != other.nrows {
            return arg_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            ));
        }
        let mut acc = vec![0.0; other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut indptr = vec![0usize];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut touched: Vec<u32> = Vec::new();
        for r in 0..self.nrows {
            touched.clear();
            for p in self.indptr[r]..self.indptr[r + 1] {
                let k = self.indices[p] as usize;
                let a = self.values[p];
                for q in other.indptr[k]..other.indptr[k + 1] {
                    let c = other.indices[q] as usize;
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = 0.0;
                        touched.push(c as u32);
                    }
                    acc[c] += a * other.values[q];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c as usize] != 0.0 {
                    indices.push(c);
                    values.push(acc[c as usize]);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix { nrows: self.nrows, ncols: other.ncols, indptr, indices, values })
    }

    /// `a * self + b * other` for two matrices with identical patterns.
    pub fn combine_same_pattern(&self, a: f64, other: &CsrMatrix, b: f64) -> Result<CsrMatrix> {
        if self.indptr != other.indptr || self.indices != other.indices {
            return arg_err("matrices do not share a sparsity pattern");
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(CsrMatrix { values, ..self.clone() })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            for p in self.indptr[r]..self.indptr[r + 1] {
                row[self.indices[p] as usize] += self.values[p];
            }
        }
        d
    }

    /// Matrix Market coordinate export, 17 significant digits.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for r in 0..self.nrows {
            for p in self.indptr[r]..self.indptr[r + 1] {
                writeln!(w, "{} {} {:.16e}", r + 1, self.indices[p] + 1, self.values[p])?;
            }
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += s * x`.
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}
