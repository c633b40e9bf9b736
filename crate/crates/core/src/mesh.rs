//! Conforming pentatope meshes: Kuhn triangulation of the unit tesseract,
//! Freudenthal (red) refinement, subsimplex enumeration and element geometry.

use std::io::{BufRead, Write};
use std::sync::OnceLock;

use nalgebra::Matrix4;

use crate::error::{arg_err, Error, Result};
use crate::proxy4::Vec4;

/// Local `k`-subsimplices of a pentatope as ascending tuples of local vertex
/// indices, in lexicographic order. `k = 0..=4`.
pub fn local_subsimplices(k: usize) -> &'static [Vec<usize>] {
    static TABLE: OnceLock<Vec<Vec<Vec<usize>>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..5)
            .map(|k| {
                let mut out = Vec::new();
                for mask in 0u32..32 {
                    if mask.count_ones() as usize == k + 1 {
                        out.push((0..5).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
                    }
                }
                out.sort();
                out
            })
            .collect()
    });
    &table[k]
}

/// Deduplicated `k`-subsimplices of a mesh together with element incidence.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsimplexTable {
    k: usize,
    /// Flat ascending vertex tuples, stride `k + 1`.
    verts: Vec<u32>,
    /// Global id of every local subsimplex, stride `C(5, k + 1)`.
    elem_ids: Vec<u32>,
    /// Relative orientation of the local subsimplex versus the global one.
    elem_signs: Vec<i8>,
}

impl SubsimplexTable {
    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.verts.len() / (self.k + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn simplex(&self, id: usize) -> &[u32] {
        let s = self.k + 1;
        &self.verts[id * s..(id + 1) * s]
    }

    fn per_element(&self) -> usize {
        local_subsimplices(self.k).len()
    }

    pub fn element_ids(&self, e: usize) -> &[u32] {
        let n = self.per_element();
        &self.elem_ids[e * n..(e + 1) * n]
    }

    pub fn element_signs(&self, e: usize) -> &[i8] {
        let n = self.per_element();
        &self.elem_signs[e * n..(e + 1) * n]
    }

    /// Global id of an ascending vertex tuple, if present.
    pub fn find(&self, tuple: &[u32]) -> Option<usize> {
        let s = self.k + 1;
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.verts[mid * s..(mid + 1) * s].cmp(tuple) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

fn parity(seq: &[u32]) -> i8 {
    let mut inv = 0;
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            if seq[a] > seq[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Enumerate the `k`-subsimplices (`k = 1..=3`) of the given elements.
///
/// Tuples are taken from each element's stored vertex order; the incidence
/// sign is the parity of the permutation that sorts them ascending.
pub fn enumerate_subsimplices(elements: &[[u32; 5]], k: usize) -> Result<SubsimplexTable> {
    if !(1..=3).contains(&k) {
        return arg_err(format!("subsimplex degree must be 1..=3, got {k}"));
    }
    let s = k + 1;
    let locals = local_subsimplices(k);
    let mut all: Vec<Vec<u32>> = Vec::with_capacity(elements.len() * locals.len());
    for el in elements {
        for loc in locals {
            let mut t: Vec<u32> = loc.iter().map(|&i| el[i]).collect();
            t.sort_unstable();
            all.push(t);
        }
    }
    all.sort_unstable();
    all.dedup();
    let verts: Vec<u32> = all.into_iter().flatten().collect();
    let mut table = SubsimplexTable { k, verts, elem_ids: Vec::new(), elem_signs: Vec::new() };
    let mut ids = Vec::with_capacity(elements.len() * locals.len());
    let mut signs = Vec::with_capacity(elements.len() * locals.len());
    let mut buf = vec![0u32; s];
    for el in elements {
        for loc in locals {
            for (b, &i) in buf.iter_mut().zip(loc.iter()) {
                *b = el[i];
            }
            let sign = parity(&buf);
            buf.sort_unstable();
            let id = table.find(&buf).expect("tuple was inserted above");
            ids.push(id as u32);
            signs.push(sign);
        }
    }
    table.elem_ids = ids;
    table.elem_signs = signs;
    Ok(table)
}

/// Per-element geometry: volume, barycentric gradients and diameter.
#[derive(Clone, Debug)]
pub struct GeomCache {
    pub volume: Vec<f64>,
    pub grads: Vec<[Vec4; 5]>,
    pub diameter: Vec<f64>,
}

impl GeomCache {
    pub fn max_diameter(&self) -> f64 {
        self.diameter.iter().cloned().fold(0.0, f64::max)
    }
}

/// A conforming mesh of pentatopes.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh4 {
    vertices: Vec<[f64; 4]>,
    /// Element vertex ids, ascending.
    elements: Vec<[u32; 5]>,
    /// Vertex order used by refinement; consistent across shared faces.
    refine_order: Vec<[u32; 5]>,
    /// Sign of the determinant of the ascending-ordered element.
    orientation: Vec<i8>,
    tables: [SubsimplexTable; 3],
}

fn edge_vectors(v: &[[f64; 4]], el: &[u32; 5]) -> Matrix4<f64> {
    let a0 = v[el[0] as usize];
    Matrix4::from_fn(|r, c| v[el[c + 1] as usize][r] - a0[r])
}

impl Mesh4 {
    /// Build a mesh from coordinates and elements. The given vertex order of
    /// each element is kept as its refinement order.
    pub fn new(vertices: Vec<[f64; 4]>, elements: Vec<[u32; 5]>) -> Result<Self> {
        let nv = vertices.len();
        let mut sorted = Vec::with_capacity(elements.len());
        let mut orientation = Vec::with_capacity(elements.len());
        for (e, el) in elements.iter().enumerate() {
            if el.iter().any(|&i| i as usize >= nv) {
                return Err(Error::Mesh(format!("element {e} references a missing vertex")));
            }
            let mut s = *el;
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Mesh(format!("element {e} repeats a vertex")));
            }
            let det = edge_vectors(&vertices, &s).determinant();
            let scale = (0..5)
                .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
                .map(|(a, b)| dist(&vertices[s[a] as usize], &vertices[s[b] as usize]))
                .fold(0.0, f64::max);
            if det.abs() <= 1e-14 * scale.powi(4) {
                return Err(Error::Mesh(format!("element {e} is degenerate")));
            }
            orientation.push(if det > 0.0 { 1 } else { -1 });
            sorted.push(s);
        }
        let tables = [
            enumerate_subsimplices(&sorted, 1)?,
            enumerate_subsimplices(&sorted, 2)?,
            enumerate_subsimplices(&sorted, 3)?,
        ];
        Ok(Mesh4 { vertices, elements: sorted, refine_order: elements, orientation, tables })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn vertices(&self) -> &[[f64; 4]] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vec4 {
        Vec4(self.vertices[i])
    }

    /// Ascending vertex ids of element `e`.
    pub fn element(&self, e: usize) -> &[u32; 5] {
        &self.elements[e]
    }

    pub fn elements(&self) -> &[[u32; 5]] {
        &self.elements
    }

    pub fn refine_order(&self, e: usize) -> &[u32; 5] {
        &self.refine_order[e]
    }

    pub fn orientation(&self, e: usize) -> i8 {
        self.orientation[e]
    }

    /// Subsimplex table for `k = 1..=3`.
    pub fn subsimplices(&self, k: usize) -> &SubsimplexTable {
        &self.tables[k - 1]
    }

    /// Number of `k`-subsimplices, `k = 0..=4`.
    pub fn count(&self, k: usize) -> usize {
        match k {
            0 => self.num_vertices(),
            1..=3 => self.tables[k - 1].len(),
            _ => self.num_elements(),
        }
    }

    /// Global ids of the local `k`-subsimplices of element `e`.
    pub fn element_dofs(&self, k: usize, e: usize) -> Vec<u32> {
        match k {
            0 => self.elements[e].to_vec(),
            1..=3 => self.tables[k - 1].element_ids(e).to_vec(),
            _ => vec![e as u32],
        }
    }

    /// Orientation induced on the `t`-th local tetrahedron of element `e` by
    /// the element's boundary, relative to the tetrahedron's global order.
    pub fn facet_orientation(&self, e: usize, t: usize) -> i8 {
        let omitted = (0..5).find(|i| !local_subsimplices(3)[t].contains(i)).unwrap();
        let boundary_sign = if omitted % 2 == 0 { 1 } else { -1 };
        self.orientation[e] * boundary_sign * self.tables[2].element_signs(e)[t]
    }

    pub fn geometry(&self) -> Result<GeomCache> {
        let n = self.num_elements();
        let mut volume = Vec::with_capacity(n);
        let mut grads = Vec::with_capacity(n);
        let mut diameter = Vec::with_capacity(n);
        for (e, el) in self.elements.iter().enumerate() {
            let m = edge_vectors(&self.vertices, el);
            let det = m.determinant();
            let h = (0..5)
                .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
                .map(|(a, b)| dist(&self.vertices[el[a] as usize], &self.vertices[el[b] as usize]))
                .fold(0.0, f64::max);
            if det.abs() <= 1e-14 * h.powi(4) {
                return Err(Error::Mesh(format!("element {e} is degenerate")));
            }
            let inv = m.try_inverse().ok_or_else(|| Error::Mesh(format!("element {e} is singular")))?;
            let mut g = [Vec4::ZERO; 5];
            for i in 0..4 {
                g[i + 1] = Vec4(std::array::from_fn(|c| inv[(i, c)]));
            }
            g[0] = -(g[1] + g[2] + g[3] + g[4]);
            volume.push(det.abs() / 24.0);
            grads.push(g);
            diameter.push(h);
        }
        Ok(GeomCache { volume, grads, diameter })
    }

    /// Write the plain-text dump: `mesh4 <nv> <ne>`, coordinates, elements.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "mesh4 {} {}", self.num_vertices(), self.num_elements())?;
        for v in &self.vertices {
            writeln!(w, "{} {} {} {}", v[0], v[1], v[2], v[3])?;
        }
        for el in &self.refine_order {
            writeln!(w, "{} {} {} {} {}", el[0], el[1], el[2], el[3], el[4])?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let bad = |m: &str| Error::Mesh(format!("malformed mesh dump: {m}"));
        let header = lines.next().ok_or_else(|| bad("empty input"))??;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "mesh4" {
            return Err(bad("header"));
        }
        let nv: usize = head[1].parse().map_err(|_| bad("vertex count"))?;
        let ne: usize = head[2].parse().map_err(|_| bad("element count"))?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let line = lines.next().ok_or_else(|| bad("missing vertex line"))??;
            let xs: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("coordinate"))?;
            if xs.len() != 4 {
                return Err(bad("vertex needs 4 coordinates"));
            }
            vertices.push([xs[0], xs[1], xs[2], xs[3]]);
        }
        let mut elements = Vec::with_capacity(ne);
        for _ in 0..ne {
            let line = lines.next().ok_or_else(|| bad("missing element line"))??;
            let ids: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("vertex id"))?;
            if ids.len() != 5 {
                return Err(bad("element needs 5 vertex ids"));
            }
            elements.push([ids[0], ids[1], ids[2], ids[3], ids[4]]);
        }
        Mesh4::new(vertices, elements)
    }
}

fn dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Kuhn triangulation of `[0,1]⁴` on an `m⁴` grid of cubes, 24 pentatopes
/// per cube. Each pentatope follows a monotone lattice path, which is also
/// its refinement order.
pub fn kuhn_unit_tesseract(m: usize) -> Result<Mesh4> {
    if m == 0 {
        return arg_err("Kuhn grid size must be at least 1");
    }
    let n = m + 1;
    let id = |p: [usize; 4]| (p[0] + n * (p[1] + n * (p[2] + n * p[3]))) as u32;
    let mut vertices = Vec::with_capacity(n.pow(4));
    for l in 0..n {
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    vertices.push([i, j, k, l].map(|c| c as f64 / m as f64));
                }
            }
        }
    }
    let perms = permutations4();
    let mut elements = Vec::with_capacity(24 * m.pow(4));
    for l in 0..m {
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    for p in &perms {
                        let mut cur = [i, j, k, l];
                        let mut el = [0u32; 5];
                        el[0] = id(cur);
                        for (step, &axis) in p.iter().enumerate() {
                            cur[axis] += 1;
                            el[step + 1] = id(cur);
                        }
                        elements.push(el);
                    }
                }
            }
        }
    }
    Mesh4::new(vertices, elements)
}

/// Children of a pentatope under Freudenthal's refinement, each child given
/// by five `(p, q)` pairs of parent refinement-order positions; the child
/// vertex is the midpoint of parent vertices `p` and `q` (the vertex itself
/// when `p == q`).
pub fn freudenthal_children() -> &'static [[(usize, usize); 5]] {
    static CHILDREN: OnceLock<Vec<[(usize, usize); 5]>> = OnceLock::new();
    CHILDREN.get_or_init(|| {
        // Reference simplex {1 >= y1 >= .. >= y4 >= 0} scaled by 2 is tiled by
        // the unit Kuhn simplices whose lattice vertices lie inside it.
        let inside = |y: &[usize; 4]| y[0] <= 2 && y.windows(2).all(|w| w[0] >= w[1]);
        let to_pair = |y: &[usize; 4]| {
            let twos = y.iter().filter(|&&c| c == 2).count();
            let ones = y.iter().filter(|&&c| c == 1).count();
            (twos, twos + ones)
        };
        let mut out = Vec::new();
        for base in 0..16usize {
            for p in permutations4() {
                let mut cur: [usize; 4] = std::array::from_fn(|a| (base >> a) & 1);
                let mut ok = inside(&cur);
                let mut child = [(0, 0); 5];
                child[0] = to_pair(&cur);
                for (step, &axis) in p.iter().enumerate() {
                    cur[axis] += 1;
                    ok &= inside(&cur);
                    child[step + 1] = to_pair(&cur);
                }
                if ok {
                    out.push(child);
                }
            }
        }
        out
    })
}

/// Uniform refinement: every pentatope is split into 16 children with new
/// vertices at edge midpoints. New vertex ids are `nv + edge id`.
pub fn bey_refine(mesh: &Mesh4) -> Result<Mesh4> {
    let nv = mesh.num_vertices() as u32;
    let edges = mesh.subsimplices(1);
    let mut vertices = mesh.vertices.clone();
    vertices.reserve(edges.len());
    for e in 0..edges.len() {
        let s = edges.simplex(e);
        let (a, b) = (mesh.vertices[s[0] as usize], mesh.vertices[s[1] as usize]);
        vertices.push(std::array::from_fn(|i| 0.5 * (a[i] + b[i])));
    }
    let children = freudenthal_children();
    let mut elements = Vec::with_capacity(mesh.num_elements() * children.len());
    for order in &mesh.refine_order {
        for child in children {
            let el = child.map(|(p, q)| {
                if p == q {
                    order[p]
                } else {
                    let (a, b) = (order[p].min(order[q]), order[p].max(order[q]));
                    nv + edges.find(&[a, b]).expect("element edge is in the table") as u32
                }
            });
            elements.push(el);
        }
    }
    Mesh4::new(vertices, elements)
}
