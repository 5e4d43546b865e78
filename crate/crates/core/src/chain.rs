//! Integer chains on a simplicial complex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::complex::SimplicialComplex;
use crate::error::ChainError;
use crate::scalar::Real;

/// Integer combination of the p-simplices of a complex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chain {
    dim: usize,
    coeffs: Vec<i64>,
}

impl Chain {
    pub fn new(dim: usize, coeffs: Vec<i64>) -> Self {
        Self { dim, coeffs }
    }

    pub fn zero(dim: usize, len: usize) -> Self {
        Self { dim, coeffs: vec![0; len] }
    }

    /// Builds a chain on `k`, checking the coefficient count.
    pub fn on<R: Real>(k: &SimplicialComplex<R>, dim: usize, coeffs: Vec<i64>) -> Result<Self, ChainError> {
        let expected = k.count(dim);
        if coeffs.len() != expected {
            return Err(ChainError::Length { dim, expected, got: coeffs.len() });
        }
        Ok(Self { dim, coeffs })
    }

    /// Chain with coefficient `coeff` on the single simplex `idx`.
    pub fn elementary(dim: usize, len: usize, idx: usize, coeff: i64) -> Self {
        let mut c = Self::zero(dim, len);
        c.coeffs[idx] = coeff;
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `(index, coefficient)` for every nonzero entry.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().copied().enumerate().filter(|&(_, c)| c != 0)
    }

    pub fn scaled(&self, k: i64) -> Chain {
        Chain { dim: self.dim, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Chain, f: impl Fn(i64, i64) -> i64) -> Chain {
        assert_eq!(self.dim, other.dim, "chain dimensions differ");
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "chain lengths differ");
        Chain {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub(crate) fn check_on<R: Real>(&self, k: &SimplicialComplex<R>) -> Result<(), ChainError> {
        let expected = k.count(self.dim);
        if self.coeffs.len() != expected {
            return Err(ChainError::Length { dim: self.dim, expected, got: self.coeffs.len() });
        }
        Ok(())
    }
}

/// Applies the boundary operator to a p-chain, giving a (p-1)-chain.
pub fn apply_boundary<R: Real>(k: &SimplicialComplex<R>, c: &Chain) -> Result<Chain, ChainError> {
    if c.dim == 0 {
        return Err(ChainError::ZeroDimensionalBoundary);
    }
    c.check_on(k)?;
    let b = k
        .boundary_matrix(c.dim - 1)
        .map_err(|_| ChainError::MissingDimension(c.dim))?;
    Ok(Chain::new(c.dim - 1, b.apply(&c.coeffs)))
}

/// Weighted volume `sum_i V(sigma_i) |c_i|`.
pub fn mass<R: Real>(k: &SimplicialComplex<R>, c: &Chain) -> Result<R, ChainError> {
    c.check_on(k)?;
    let vols = k.volumes(c.dim);
    Ok(c
        .nonzeros()
        .fold(R::zero(), |acc, (i, v)| acc + vols[i] * R::from_i64(v.abs()).unwrap()))
}

/// True iff the two chains have identical boundaries.
pub fn shares_boundary<R: Real>(k: &SimplicialComplex<R>, a: &Chain, b: &Chain) -> Result<bool, ChainError> {
    if a.dim != b.dim {
        return Err(ChainError::DimensionMismatch(a.dim, b.dim));
    }
    Ok(apply_boundary(k, a)? == apply_boundary(k, b)?)
}

/// Index of the vertex closest to `point`; ties go to the smallest index.
pub fn nearest_vertex<R: Real>(k: &SimplicialComplex<R>, point: &[R]) -> usize {
    let mut best = 0;
    let mut best_d = R::infinity();
    for (i, v) in k.vertices().iter().enumerate() {
        let d = v
            .iter()
            .zip(point)
            .fold(R::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b));
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry<R> {
    dist: R,
    vertex: usize,
}

impl<R: Real> Eq for HeapEntry<R> {}

impl<R: Real> Ord for HeapEntry<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl<R: Real> PartialOrd for HeapEntry<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Edge adjacency: for each vertex, `(neighbor, edge index, sign)` where the
/// sign is the coefficient that traverses the edge from the vertex to the
/// neighbor.
fn adjacency<R: Real>(k: &SimplicialComplex<R>) -> Vec<Vec<(usize, usize, i64)>> {
    let mut adj = vec![Vec::new(); k.num_vertices()];
    for (e, s) in k.simplices(1).iter().enumerate() {
        let o = i64::from(k.orientation(1, e));
        let (a, b) = (s[0], s[1]);
        adj[a].push((b, e, o));
        adj[b].push((a, e, -o));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Shortest path between two vertices by Euclidean edge length, as a list of
/// `(edge index, traversal sign)`. Among equal-length predecessors the
/// smallest vertex index wins.
fn shortest_path<R: Real>(
    k: &SimplicialComplex<R>,
    adj: &[Vec<(usize, usize, i64)>],
    from: usize,
    to: usize,
) -> Result<Vec<(usize, i64)>, ChainError> {
    if from == to {
        return Ok(Vec::new());
    }
    let n = k.num_vertices();
    let lengths = k.volumes(1);
    let mut dist = vec![R::infinity(); n];
    let mut pred: Vec<Option<(usize, usize, i64)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[from] = R::zero();
    heap.push(HeapEntry { dist: R::zero(), vertex: from });
    while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == to {
            break;
        }
        for &(v, e, sign) in &adj[u] {
            if done[v] {
                continue;
            }
            let nd = d + lengths[e];
            let better = match nd.partial_cmp(&dist[v]) {
                Some(Ordering::Less) => true,
                Some(Ordering::Equal) => pred[v].is_some_and(|(pu, _, _)| u < pu),
                _ => false,
            };
            if better {
                dist[v] = nd;
                pred[v] = Some((u, e, sign));
                heap.push(HeapEntry { dist: nd, vertex: v });
            }
        }
    }
    if !done[to] {
        return Err(ChainError::Unreachable { from, to });
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let (u, e, sign) = pred[cur].expect("reached vertex has a predecessor");
        path.push((e, sign));
        cur = u;
    }
    path.reverse();
    Ok(path)
}

/// Snaps a polyline to the 1-skeleton: every point moves to its nearest
/// vertex, consecutive snapped vertices are joined by shortest edge paths, and
/// the traversed edges are summed with their traversal orientation.
pub fn snap_polyline<R: Real, P: AsRef<[R]>>(k: &SimplicialComplex<R>, points: &[P]) -> Result<Chain, ChainError> {
    if k.dimension() < 1 {
        return Err(ChainError::MissingDimension(1));
    }
    if points.len() < 2 {
        return Err(ChainError::TooFewPoints);
    }
    for (i, p) in points.iter().enumerate() {
        if p.as_ref().len() != k.ambient_dim() {
            return Err(ChainError::PointArity { index: i, expected: k.ambient_dim(), got: p.as_ref().len() });
        }
    }
    let snapped: Vec<usize> = points.iter().map(|p| nearest_vertex(k, p.as_ref())).collect();
    let adj = adjacency(k);
    let mut coeffs = vec![0i64; k.count(1)];
    for leg in snapped.windows(2) {
        for (e, sign) in shortest_path(k, &adj, leg[0], leg[1])? {
            coeffs[e] += sign;
        }
    }
    Ok(Chain::new(1, coeffs))
}
