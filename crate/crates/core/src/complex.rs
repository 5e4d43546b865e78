//! Finite simplicial complexes embedded in Euclidean space.
//!
//! Every simplex is stored as its sorted vertex tuple together with an
//! orientation sign. A sign of `+1` means the simplex carries the orientation
//! of its sorted tuple; `-1` means the opposite one. When a simplex is supplied
//! as an ordered tuple, its sign is the parity of the permutation that sorts it.

use std::collections::HashMap;

use crate::error::ComplexError;
use crate::scalar::Real;

/// Oriented simplicial complex with vertex coordinates and simplex volumes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex<R> {
    ambient_dim: usize,
    vertices: Vec<Vec<R>>,
    simplices: Vec<Vec<Vec<usize>>>,
    orientation: Vec<Vec<i8>>,
    volumes: Vec<Vec<R>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
}

/// Signed incidence matrix between p-simplices (rows) and (p+1)-simplices
/// (columns), stored column-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, i8)>>,
}

impl BoundaryMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Nonzero entries of column `j` as `(row, sign)` pairs.
    pub fn column(&self, j: usize) -> &[(usize, i8)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, i8)>] {
        &self.columns
    }

    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.columns[j]
            .iter()
            .find(|(r, _)| *r == i)
            .map_or(0, |(_, s)| *s)
    }

    /// Matrix-vector product over the integers.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        let mut out = vec![0i64; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            if x[j] == 0 {
                continue;
            }
            for &(i, s) in col {
                out[i] += i64::from(s) * x[j];
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut dense = vec![vec![0i64; self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, s) in col {
                dense[i][j] = i64::from(s);
            }
        }
        dense
    }

    /// Integer product `self * rhs`, as a dense matrix.
    pub fn compose(&self, rhs: &BoundaryMatrix) -> Vec<Vec<i64>> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = vec![vec![0i64; rhs.cols]; self.rows];
        for (j, col) in rhs.columns.iter().enumerate() {
            for &(k, s) in col {
                for &(i, t) in &self.columns[k] {
                    out[i][j] += i64::from(s) * i64::from(t);
                }
            }
        }
        out
    }
}

/// Accumulates oriented simplices before validation.
#[derive(Debug, Clone)]
pub struct ComplexBuilder<R> {
    ambient_dim: usize,
    vertices: Vec<Vec<R>>,
    oriented: Vec<Vec<Vec<usize>>>,
}

impl<R: Real> ComplexBuilder<R> {
    pub fn new(ambient_dim: usize, vertices: Vec<Vec<R>>) -> Self {
        Self { ambient_dim, vertices, oriented: Vec::new() }
    }

    /// Adds a simplex given as an ordered vertex tuple; the order fixes its
    /// orientation. Tuples of length 1 (vertices) are ignored.
    pub fn add(&mut self, simplex: &[usize]) -> &mut Self {
        if simplex.len() >= 2 {
            let q = simplex.len() - 1;
            if self.oriented.len() < q {
                self.oriented.resize(q, Vec::new());
            }
            self.oriented[q - 1].push(simplex.to_vec());
        }
        self
    }

    /// Validates and builds. With `complete_closure` missing faces are added
    /// (sorted orientation, lexicographic order after the explicit ones);
    /// otherwise a missing face is an error.
    pub fn build(&self, complete_closure: bool) -> Result<SimplicialComplex<R>, ComplexError> {
        let d = self.ambient_dim;
        for (v, coords) in self.vertices.iter().enumerate() {
            if coords.len() != d {
                return Err(ComplexError::CoordinateArity { vertex: v, expected: d, got: coords.len() });
            }
            if coords.iter().any(|c| !c.is_finite()) {
                return Err(ComplexError::NonFiniteCoordinate(v));
            }
        }
        let n_vertices = self.vertices.len();
        let top = self.oriented.len();
        if top > d {
            return Err(ComplexError::DimensionTooLarge { dim: top, ambient: d });
        }

        let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 1];
        let mut orientation: Vec<Vec<i8>> = vec![Vec::new(); top + 1];
        let mut lookup: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); top + 1];
        for v in 0..n_vertices {
            simplices[0].push(vec![v]);
            orientation[0].push(1);
            lookup[0].insert(vec![v], v);
        }

        for q in 1..=top {
            for tuple in &self.oriented[q - 1] {
                if tuple.len() != q + 1 {
                    return Err(ComplexError::SimplexArity { dim: q, simplex: tuple.clone() });
                }
                if tuple.iter().any(|&v| v >= n_vertices) {
                    return Err(ComplexError::VertexOutOfRange(tuple.clone()));
                }
                let (sorted, sign) = sort_with_parity(tuple);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(ComplexError::RepeatedVertex(tuple.clone()));
                }
                if lookup[q].contains_key(&sorted) {
                    return Err(ComplexError::Duplicate(sorted));
                }
                lookup[q].insert(sorted.clone(), simplices[q].len());
                simplices[q].push(sorted);
                orientation[q].push(sign);
            }
        }

        // Closure, top-down so that completed faces get their own faces checked.
        for q in (2..=top).rev() {
            let mut missing: Vec<Vec<usize>> = Vec::new();
            for s in &simplices[q] {
                for k in 0..s.len() {
                    let face = drop_vertex(s, k);
                    if !lookup[q - 1].contains_key(&face) {
                        if !complete_closure {
                            return Err(ComplexError::MissingFace { simplex: s.clone(), face });
                        }
                        missing.push(face);
                    }
                }
            }
            missing.sort();
            missing.dedup();
            for face in missing {
                lookup[q - 1].insert(face.clone(), simplices[q - 1].len());
                simplices[q - 1].push(face);
                orientation[q - 1].push(1);
            }
        }

        let mut volumes: Vec<Vec<R>> = Vec::with_capacity(top + 1);
        for q in 0..=top {
            let mut vols = Vec::with_capacity(simplices[q].len());
            for s in &simplices[q] {
                let pts: Vec<&[R]> = s.iter().map(|&v| self.vertices[v].as_slice()).collect();
                let vol = simplex_volume(&pts);
                if q > 0 && is_degenerate(&pts, vol) {
                    return Err(ComplexError::Degenerate(s.clone()));
                }
                vols.push(vol);
            }
            volumes.push(vols);
        }

        Ok(SimplicialComplex {
            ambient_dim: d,
            vertices: self.vertices.clone(),
            simplices,
            orientation,
            volumes,
            lookup,
        })
    }
}

fn is_degenerate<R: Real>(pts: &[&[R]], vol: R) -> bool {
    let q = pts.len() - 1;
    let mut scale = R::zero();
    for p in &pts[1..] {
        let len = p
            .iter()
            .zip(pts[0])
            .fold(R::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b))
            .sqrt();
        scale = scale.max(len);
    }
    let tol = R::epsilon() * R::from_f64(64.0).unwrap() * scale.powi(q as i32);
    !(vol > tol)
}

/// Sorts a tuple and returns the parity (+1 even, -1 odd) of the sorting
/// permutation.
pub fn sort_with_parity(tuple: &[usize]) -> (Vec<usize>, i8) {
    let mut v = tuple.to_vec();
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    (v, sign)
}

fn drop_vertex(s: &[usize], k: usize) -> Vec<usize> {
    s.iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &v)| v)
        .collect()
}

impl<R: Real> SimplicialComplex<R> {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Highest simplex dimension present.
    pub fn dimension(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &[R] {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vec<R>] {
        &self.vertices
    }

    /// Number of q-simplices (0 when q exceeds the dimension).
    pub fn count(&self, q: usize) -> usize {
        self.simplices.get(q).map_or(0, Vec::len)
    }

    /// Sorted vertex tuples of the q-simplices.
    pub fn simplices(&self, q: usize) -> &[Vec<usize>] {
        self.simplices.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn orientation(&self, q: usize, idx: usize) -> i8 {
        self.orientation[q][idx]
    }

    /// The q-simplex written as an ordered tuple carrying its orientation.
    pub fn oriented_tuple(&self, q: usize, idx: usize) -> Vec<usize> {
        let mut t = self.simplices[q][idx].clone();
        if self.orientation[q][idx] < 0 && t.len() >= 2 {
            t.swap(0, 1);
        }
        t
    }

    pub fn volumes(&self, q: usize) -> &[R] {
        self.volumes.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn volume(&self, q: usize, idx: usize) -> R {
        self.volumes[q][idx]
    }

    /// Index of the simplex with the given vertex set, in any order.
    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        if simplex.is_empty() {
            return None;
        }
        let q = simplex.len() - 1;
        let mut key = simplex.to_vec();
        key.sort_unstable();
        self.lookup.get(q)?.get(&key).copied()
    }

    /// The (p+1)-boundary matrix: rows are p-simplices, columns (p+1)-simplices.
    pub fn boundary_matrix(&self, p: usize) -> Result<BoundaryMatrix, ComplexError> {
        if p >= self.dimension() {
            return Err(ComplexError::BoundaryOutOfRange { p, dim: self.dimension() });
        }
        let q = p + 1;
        let columns = self.simplices[q]
            .iter()
            .enumerate()
            .map(|(j, tau)| {
                let o_tau = self.orientation[q][j];
                let mut col: Vec<(usize, i8)> = (0..tau.len())
                    .map(|k| {
                        let face = drop_vertex(tau, k);
                        let i = self.lookup[p][&face];
                        let parity = if k % 2 == 0 { 1 } else { -1 };
                        (i, parity * o_tau * self.orientation[p][i])
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        Ok(BoundaryMatrix { rows: self.count(p), cols: self.count(q), columns })
    }
}

/// q-dimensional volume of the simplex spanned by `q + 1` points:
/// `sqrt(det(E E^T)) / q!` where the rows of `E` are the edge vectors from the
/// first point. A single point has volume 1.
pub fn simplex_volume<R: Real, P: AsRef<[R]>>(points: &[P]) -> R {
    if points.len() <= 1 {
        return R::one();
    }
    let q = points.len() - 1;
    let origin = points[0].as_ref();
    let edges: Vec<Vec<R>> = points[1..]
        .iter()
        .map(|p| p.as_ref().iter().zip(origin).map(|(a, b)| *a - *b).collect())
        .collect();
    let mut gram = vec![vec![R::zero(); q]; q];
    for i in 0..q {
        for j in i..q {
            let dot = edges[i]
                .iter()
                .zip(&edges[j])
                .fold(R::zero(), |acc, (a, b)| acc + *a * *b);
            gram[i][j] = dot;
            gram[j][i] = dot;
        }
    }
    let det = determinant(gram);
    let mut fact = R::one();
    for k in 2..=q {
        fact = fact * R::from_usize(k).unwrap();
    }
    det.max(R::zero()).sqrt() / fact
}

/// Signed volume of a full-dimensional simplex (q = d) up to the factor q!.
fn signed_det<R: Real>(points: &[&[R]]) -> R {
    let origin = points[0];
    let m: Vec<Vec<R>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(origin).map(|(a, b)| *a - *b).collect())
        .collect();
    determinant(m)
}

fn determinant<R: Real>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    let mut det = R::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col] == R::zero() {
            return R::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det = det * m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                let v = m[col][k];
                m[row][k] = m[row][k] - factor * v;
            }
        }
    }
    det
}

/// Triangulated rectangle `[0, width] x [0, height]` with `nx * ny` cells, each
/// split along its lower-left to upper-right diagonal into two
/// counterclockwise triangles.
pub fn build_grid_2d<R: Real>(
    nx: usize,
    ny: usize,
    width: R,
    height: R,
) -> Result<SimplicialComplex<R>, ComplexError> {
    if nx == 0 || ny == 0 || !(width > R::zero()) || !(height > R::zero()) {
        return Err(ComplexError::NonPositiveDimension(format!(
            "nx={nx}, ny={ny}, width={width}, height={height}"
        )));
    }
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let dx = width / R::from_usize(nx).unwrap();
    let dy = height / R::from_usize(ny).unwrap();
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(vec![dx * R::from_usize(i).unwrap(), dy * R::from_usize(j).unwrap()]);
        }
    }
    let mut builder = ComplexBuilder::new(2, vertices);
    for j in 0..ny {
        for i in 0..nx {
            let (ll, lr, ur, ul) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            builder.add(&[ll, lr, ur]);
            builder.add(&[ll, ur, ul]);
        }
    }
    builder.build(true)
}

/// Number of tetrahedra each grid cube is split into.
pub const TETS_PER_CUBE: usize = 6;

/// Box `[0, ex] x [0, ey] x [0, ez]` with `nx * ny * nz` cubes, each split into
/// six positively oriented tetrahedra (Kuhn triangulation along the main
/// diagonal).
pub fn build_grid_3d<R: Real>(
    nx: usize,
    ny: usize,
    nz: usize,
    extents: [R; 3],
) -> Result<SimplicialComplex<R>, ComplexError> {
    if nx == 0 || ny == 0 || nz == 0 || extents.iter().any(|e| !(*e > R::zero())) {
        return Err(ComplexError::NonPositiveDimension(format!(
            "nx={nx}, ny={ny}, nz={nz}, extents={:?}",
            extents
        )));
    }
    let counts = [nx, ny, nz];
    let idx = |c: [usize; 3]| (c[2] * (ny + 1) + c[1]) * (nx + 1) + c[0];
    let step: Vec<R> = (0..3)
        .map(|a| extents[a] / R::from_usize(counts[a]).unwrap())
        .collect();
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(vec![
                    step[0] * R::from_usize(i).unwrap(),
                    step[1] * R::from_usize(j).unwrap(),
                    step[2] * R::from_usize(k).unwrap(),
                ]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(nx * ny * nz * TETS_PER_CUBE);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut tet = vec![idx(c)];
                    for axis in perm {
                        c[axis] += 1;
                        tet.push(idx(c));
                    }
                    let pts: Vec<&[R]> = tet.iter().map(|&v| vertices[v].as_slice()).collect();
                    if signed_det(&pts) < R::zero() {
                        tet.swap(2, 3);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    let mut builder = ComplexBuilder::new(3, vertices);
    for t in &tets {
        builder.add(t);
    }
    builder.build(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SimplicialComplex<f64> {
        let mut b = ComplexBuilder::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        b.add(&[0, 1]).add(&[1, 2]).add(&[0, 2]).add(&[0, 1, 2]);
        b.build(false).unwrap()
    }

    #[test]
    fn single_triangle_boundary_column() {
        let k = triangle();
        let b = k.boundary_matrix(1).unwrap();
        let e01 = k.index_of(&[0, 1]).unwrap();
        let e12 = k.index_of(&[1, 2]).unwrap();
        let e02 = k.index_of(&[0, 2]).unwrap();
        assert_eq!(b.entry(e01, 0), 1);
        assert_eq!(b.entry(e12, 0), 1);
        assert_eq!(b.entry(e02, 0), -1);
    }

    #[test]
    fn edge_boundary_signs() {
        let k = triangle();
        let b = k.boundary_matrix(0).unwrap();
        let e = k.index_of(&[0, 1]).unwrap();
        assert_eq!(b.entry(1, e), 1);
        assert_eq!(b.entry(0, e), -1);
    }

    #[test]
    fn grid_2d_counts() {
        let k = build_grid_2d(1, 1, 1.0, 1.0).unwrap();
        assert_eq!((k.num_vertices(), k.count(1), k.count(2)), (4, 5, 2));
        let k = build_grid_2d(2, 2, 1.0, 1.0).unwrap();
        assert_eq!((k.num_vertices(), k.count(1), k.count(2)), (9, 16, 8));
        let k = build_grid_2d(50, 36, 1.0, 0.72).unwrap();
        assert_eq!(k.count(2), 2 * 50 * 36);
        assert_eq!(k.count(1), 3 * 50 * 36 + 50 + 36);
    }

    #[test]
    fn grid_2d_triangles_are_counterclockwise() {
        let k = build_grid_2d(3, 2, 1.5, 1.0).unwrap();
        for idx in 0..k.count(2) {
            let t = k.oriented_tuple(2, idx);
            let pts: Vec<&[f64]> = t.iter().map(|&v| k.vertex(v)).collect();
            assert!(signed_det(&pts) > 0.0);
        }
    }

    #[test]
    fn grid_rejects_nonpositive() {
        assert!(build_grid_2d(0, 1, 1.0, 1.0).is_err());
        assert!(build_grid_2d(1, 1, -1.0, 1.0).is_err());
        assert!(build_grid_3d(1, 0, 1, [1.0, 1.0, 1.0]).is_err());
        assert!(build_grid_3d(1, 1, 1, [1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn grid_3d_single_cube() {
        let k = build_grid_3d(1, 1, 1, [1.0, 1.0, 1.0]).unwrap();
        assert_eq!(k.num_vertices(), 8);
        assert_eq!(k.count(3), TETS_PER_CUBE);
        let total: f64 = k.volumes(3).iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_3d_interior_triangles_have_two_cofaces() {
        let k = build_grid_3d(2, 2, 2, [1.0, 1.0, 1.0]).unwrap();
        let b = k.boundary_matrix(2).unwrap();
        let mut cofaces = vec![0usize; k.count(2)];
        for col in b.columns() {
            for &(i, _) in col {
                cofaces[i] += 1;
            }
        }
        for (i, tri) in k.simplices(2).iter().enumerate() {
            let on_boundary = (0..3).any(|axis| {
                let c: Vec<f64> = tri.iter().map(|&v| k.vertex(v)[axis]).collect();
                c.iter().all(|x| *x == 0.0) || c.iter().all(|x| *x == 1.0)
            });
            assert_eq!(cofaces[i], if on_boundary { 1 } else { 2 }, "triangle {tri:?}");
        }
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        for k in [build_grid_2d(3, 2, 1.0, 1.0).unwrap(), build_grid_3d(2, 1, 2, [1.0, 2.0, 1.0]).unwrap()] {
            for p in 1..k.dimension() {
                let lower = k.boundary_matrix(p - 1).unwrap();
                let upper = k.boundary_matrix(p).unwrap();
                assert!(lower.compose(&upper).iter().flatten().all(|&v| v == 0));
                assert!(upper.columns().iter().all(|c| c.len() == p + 2));
            }
        }
    }

    #[test]
    fn boundary_matrix_rejects_top_dimension() {
        let k = triangle();
        assert!(matches!(k.boundary_matrix(2), Err(ComplexError::BoundaryOutOfRange { .. })));
    }

    #[test]
    fn builder_validation() {
        let verts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let mut b = ComplexBuilder::new(2, verts.clone());
        b.add(&[0, 1, 2]);
        assert!(matches!(b.build(false), Err(ComplexError::MissingFace { .. })));
        assert_eq!(b.build(true).unwrap().count(1), 3);

        let mut b = ComplexBuilder::new(2, verts.clone());
        b.add(&[0, 1]).add(&[1, 0]);
        assert!(matches!(b.build(false), Err(ComplexError::Duplicate(_))));

        let mut b = ComplexBuilder::new(2, verts.clone());
        b.add(&[0, 0]);
        assert!(matches!(b.build(false), Err(ComplexError::RepeatedVertex(_))));

        let mut b = ComplexBuilder::new(2, verts.clone());
        b.add(&[0, 5]);
        assert!(matches!(b.build(false), Err(ComplexError::VertexOutOfRange(_))));

        let mut b = ComplexBuilder::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]);
        b.add(&[0, 1, 2]);
        assert!(matches!(b.build(true), Err(ComplexError::Degenerate(_))));
    }

    #[test]
    fn volumes() {
        assert_eq!(simplex_volume(&[[0.0, 0.0], [3.0, 4.0]]), 5.0);
        assert!((simplex_volume::<f64, _>(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]) - 0.5).abs() < 1e-15);
        let s = 1.0 / 2f64.sqrt();
        let tet = [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s], [s, s, s]];
        // edge length 1 regular tetrahedron
        assert!((simplex_volume(&tet) - 2f64.sqrt() / 12.0).abs() < 1e-12);
        // triangle embedded in 3D
        let area: f64 = simplex_volume(&[[0.0, 0.0, 1.0], [2.0, 0.0, 1.0], [0.0, 2.0, 1.0]]);
        assert!((area - 2.0).abs() < 1e-12);
        assert_eq!(simplex_volume::<f32, _>(&[[0.0f32, 0.0], [0.0, 2.0]]), 2.0);
    }
}
