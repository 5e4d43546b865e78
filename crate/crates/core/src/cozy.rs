//! Edge-colored regular multigraphs: cozy and comfortable graphs, spines and
//! ribs, edge connectivity and knitting.
//!
//! A graph is k-cozy when it is connected, k-regular and its edges carry a
//! proper coloring with colors `1..=k`. It is k-comfortable when every vertex
//! has a partner joined to it by k edge-disjoint paths.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CozyError;

/// Resampling budget of [`random_cozy`].
pub const RESAMPLE_CAP: usize = 1000;

/// Undirected multigraph with colored edges `(u, v, color)`, colors in `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoredGraph {
    pub n_vertices: usize,
    pub k: usize,
    pub edges: Vec<(usize, usize, usize)>,
}

impl EdgeColoredGraph {
    pub fn new(n_vertices: usize, k: usize, edges: Vec<(usize, usize, usize)>) -> Self {
        Self { n_vertices, k, edges }
    }

    /// Even cycle on `n` vertices with alternating colors 1 and 2.
    pub fn alternating_cycle(n: usize) -> Self {
        let edges = (0..n).map(|i| (i, (i + 1) % n, 1 + i % 2)).collect();
        Self::new(n, 2, edges)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b, _)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    fn check_vertex(&self, v: usize) -> Result<(), CozyError> {
        if v >= self.n_vertices {
            return Err(CozyError::VertexOutOfRange(v));
        }
        Ok(())
    }

    fn check_set(&self, u: &[usize]) -> Result<Vec<bool>, CozyError> {
        let mut inside = vec![false; self.n_vertices];
        for &v in u {
            self.check_vertex(v)?;
            inside[v] = true;
        }
        Ok(inside)
    }

    /// Subgraph induced by `u`, with vertices renumbered in ascending order.
    pub fn induced_subgraph(&self, u: &[usize]) -> Result<EdgeColoredGraph, CozyError> {
        let inside = self.check_set(u)?;
        let relabel = relabeling(&inside);
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b, _)| inside[a] && inside[b])
            .map(|&(a, b, c)| (relabel[a], relabel[b], c))
            .collect();
        Ok(Self::new(inside.iter().filter(|&&x| x).count(), self.k, edges))
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n_vertices];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n_vertices
    }

    /// Neighbors with the index of the joining edge; loops are skipped.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (e, &(a, b, _)) in self.edges.iter().enumerate() {
            if a != b && a < self.n_vertices && b < self.n_vertices {
                adj[a].push((b, e));
                adj[b].push((a, e));
            }
        }
        adj
    }
}

fn relabeling(inside: &[bool]) -> Vec<usize> {
    let mut next = 0;
    inside
        .iter()
        .map(|&x| {
            let id = next;
            next += usize::from(x);
            id
        })
        .collect()
}

/// First reason the graph fails to be cozy, if any.
pub fn cozy_defect(g: &EdgeColoredGraph) -> Option<String> {
    if g.n_vertices == 0 {
        return Some("graph has no vertices".into());
    }
    let mut seen = vec![vec![false; g.k + 1]; g.n_vertices];
    let mut degree = vec![0usize; g.n_vertices];
    for &(a, b, c) in &g.edges {
        if a >= g.n_vertices || b >= g.n_vertices {
            return Some(format!("edge ({a}, {b}) has an endpoint out of range"));
        }
        if a == b {
            return Some(format!("loop at vertex {a}"));
        }
        if c == 0 || c > g.k {
            return Some(format!("edge ({a}, {b}) has color {c} outside 1..={}", g.k));
        }
        for v in [a, b] {
            if std::mem::replace(&mut seen[v][c], true) {
                return Some(format!("vertex {v} meets color {c} twice"));
            }
            degree[v] += 1;
        }
    }
    if let Some(v) = degree.iter().position(|&d| d != g.k) {
        return Some(format!("vertex {v} has degree {}, expected {}", degree[v], g.k));
    }
    if !g.is_connected() {
        return Some("graph is disconnected".into());
    }
    None
}

pub fn is_cozy(g: &EdgeColoredGraph) -> bool {
    cozy_defect(g).is_none()
}

/// Unit-capacity flow network on an undirected multigraph: each edge is a
/// pair of opposite arcs that are each other's residual.
struct FlowNet {
    head: Vec<usize>,
    cap: Vec<i32>,
    out: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(g: &EdgeColoredGraph) -> Self {
        let mut net = FlowNet { head: Vec::new(), cap: Vec::new(), out: vec![Vec::new(); g.n_vertices] };
        for &(a, b, _) in &g.edges {
            if a == b {
                continue;
            }
            net.out[a].push(net.head.len());
            net.head.push(b);
            net.cap.push(1);
            net.out[b].push(net.head.len());
            net.head.push(a);
            net.cap.push(1);
        }
        net
    }

    /// Edmonds-Karp, stopping once `limit` units have been routed.
    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let n = self.out.len();
        let mut flow = 0;
        while flow < limit {
            let mut via = vec![usize::MAX; n];
            let mut queue = VecDeque::from([s]);
            let mut reached = false;
            'bfs: while let Some(v) = queue.pop_front() {
                for &arc in &self.out[v] {
                    let w = self.head[arc];
                    if self.cap[arc] > 0 && w != s && via[w] == usize::MAX {
                        via[w] = arc;
                        if w == t {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if !reached {
                break;
            }
            let mut v = t;
            while v != s {
                let arc = via[v];
                self.cap[arc] -= 1;
                self.cap[arc ^ 1] += 1;
                v = self.head[arc ^ 1];
            }
            flow += 1;
        }
        flow
    }

    /// Vertices reachable from `s` in the residual network.
    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &arc in &self.out[v] {
                let w = self.head[arc];
                if self.cap[arc] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Maximum number of pairwise edge-disjoint `u`-`v` paths (colors ignored).
pub fn max_edge_disjoint_paths(g: &EdgeColoredGraph, u: usize, v: usize) -> Result<usize, CozyError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return Err(CozyError::SameEndpoints);
    }
    Ok(FlowNet::new(g).max_flow(u, v, usize::MAX))
}

/// True iff every vertex has a partner joined to it by `k` edge-disjoint
/// paths. A single vertex is comfortable only for `k = 0`.
pub fn is_comfortable(g: &EdgeColoredGraph, k: usize) -> bool {
    if g.n_vertices < 2 {
        return k == 0;
    }
    (0..g.n_vertices).all(|v| {
        (0..g.n_vertices)
            .filter(|&w| w != v)
            .any(|w| FlowNet::new(g).max_flow(v, w, k) >= k)
    })
}

/// Indices of the spines (one endpoint in `u`) and ribs (both endpoints in
/// `u`) of the vertex set `u`.
pub fn spines_and_ribs(g: &EdgeColoredGraph, u: &[usize]) -> Result<(Vec<usize>, Vec<usize>), CozyError> {
    let inside = g.check_set(u)?;
    let mut spines = Vec::new();
    let mut ribs = Vec::new();
    for (e, &(a, b, _)) in g.edges.iter().enumerate() {
        match (inside[a], inside[b]) {
            (true, true) => ribs.push(e),
            (true, false) | (false, true) => spines.push(e),
            _ => {}
        }
    }
    Ok((spines, ribs))
}

/// A minimum edge cut: its size, the cut edge indices and the vertex side
/// containing vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCut {
    pub size: usize,
    pub edges: Vec<usize>,
    pub side: Vec<usize>,
}

/// Global minimum edge cut from `n - 1` max-flow computations out of vertex 0.
pub fn min_edge_cut(g: &EdgeColoredGraph) -> Result<EdgeCut, CozyError> {
    if g.n_vertices < 2 {
        return Err(CozyError::TooSmall);
    }
    if !g.is_connected() {
        return Err(CozyError::Disconnected);
    }
    let mut best: Option<(usize, Vec<bool>)> = None;
    for t in 1..g.n_vertices {
        let limit = best.as_ref().map_or(usize::MAX, |b| b.0);
        let mut net = FlowNet::new(g);
        let f = net.max_flow(0, t, limit);
        if f < limit {
            best = Some((f, net.source_side(0)));
        }
    }
    let (size, side) = best.expect("at least one sink");
    let edges = g
        .edges
        .iter()
        .enumerate()
        .filter(|&(_, &(a, b, _))| side[a] != side[b])
        .map(|(e, _)| e)
        .collect();
    let side = (0..g.n_vertices).filter(|&v| side[v]).collect();
    Ok(EdgeCut { size, edges, side })
}

/// Minimum number of edges whose removal disconnects the graph.
pub fn edge_connectivity(g: &EdgeColoredGraph) -> Result<usize, CozyError> {
    Ok(min_edge_cut(g)?.size)
}

/// Knitting of `G(U)`: the induced subgraph on `u` plus, for every color, new
/// edges of that color joining the endpoints in `u` of its spines, paired in
/// ascending vertex order. Vertices are renumbered in ascending order.
///
/// Requires fewer than `k` spines. The result is checked for coziness; it can
/// only fail when `G(U)` together with the new edges is disconnected.
pub fn knit(g: &EdgeColoredGraph, u: &[usize]) -> Result<EdgeColoredGraph, CozyError> {
    let inside = g.check_set(u)?;
    let (spines, _) = spines_and_ribs(g, u)?;
    if spines.len() >= g.k {
        return Err(CozyError::TooManySpines { spines: spines.len(), k: g.k });
    }
    let relabel = relabeling(&inside);
    let mut out = g.induced_subgraph(u)?;
    for color in 1..=g.k {
        let mut ends: Vec<usize> = spines
            .iter()
            .map(|&e| g.edges[e])
            .filter(|&(_, _, c)| c == color)
            .map(|(a, b, _)| if inside[a] { a } else { b })
            .collect();
        if ends.len() % 2 == 1 {
            return Err(CozyError::KnitNotCozy(format!("odd number of spines of color {color}")));
        }
        ends.sort_unstable();
        for pair in ends.chunks(2) {
            out.edges.push((relabel[pair[0]], relabel[pair[1]], color));
        }
    }
    match cozy_defect(&out) {
        None => Ok(out),
        Some(reason) => Err(CozyError::KnitNotCozy(reason)),
    }
}

/// Union of `k` random perfect matchings on `n_vertices`, colored by matching
/// and resampled until connected. Deterministic for a fixed seed.
pub fn random_cozy(k: usize, n_vertices: usize, seed: u64) -> Result<EdgeColoredGraph, CozyError> {
    let infeasible = || CozyError::Infeasible { k, n: n_vertices };
    match k {
        0 if n_vertices == 1 => return Ok(EdgeColoredGraph::new(1, 0, Vec::new())),
        0 => return Err(infeasible()),
        1 if n_vertices != 2 => return Err(infeasible()),
        _ if n_vertices == 0 || n_vertices % 2 == 1 => return Err(infeasible()),
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n_vertices).collect();
    for _ in 0..RESAMPLE_CAP {
        let mut edges = Vec::with_capacity(k * n_vertices / 2);
        for color in 1..=k {
            order.shuffle(&mut rng);
            edges.extend(order.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]), color)));
        }
        let g = EdgeColoredGraph::new(n_vertices, k, edges);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(CozyError::ResampleCap(RESAMPLE_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> EdgeColoredGraph {
        EdgeColoredGraph::new(4, 3, vec![(0, 1, 1), (2, 3, 1), (0, 2, 2), (1, 3, 2), (0, 3, 3), (1, 2, 3)])
    }

    #[test]
    fn cozy_examples() {
        assert!(is_cozy(&EdgeColoredGraph::alternating_cycle(6)));
        assert!(is_cozy(&k4()));
        let odd = EdgeColoredGraph::new(3, 2, vec![(0, 1, 1), (1, 2, 2), (2, 0, 1)]);
        assert!(cozy_defect(&odd).unwrap().contains("twice"));
        let two = EdgeColoredGraph::new(4, 1, vec![(0, 1, 1), (2, 3, 1)]);
        assert_eq!(cozy_defect(&two).as_deref(), Some("graph is disconnected"));
        assert!(!is_cozy(&EdgeColoredGraph::new(2, 1, vec![(0, 1, 2)])));
    }

    #[test]
    fn disjoint_paths() {
        let parallel = EdgeColoredGraph::new(2, 3, vec![(0, 1, 1), (0, 1, 2), (1, 0, 3)]);
        assert_eq!(max_edge_disjoint_paths(&parallel, 0, 1), Ok(3));
        let cycle = EdgeColoredGraph::alternating_cycle(8);
        for v in 1..8 {
            assert_eq!(max_edge_disjoint_paths(&cycle, 0, v), Ok(2));
        }
        assert_eq!(max_edge_disjoint_paths(&cycle, 2, 2), Err(CozyError::SameEndpoints));
        assert_eq!(max_edge_disjoint_paths(&cycle, 0, 8), Err(CozyError::VertexOutOfRange(8)));
    }

    #[test]
    fn comfortable_examples() {
        assert!(is_comfortable(&EdgeColoredGraph::alternating_cycle(10), 2));
        assert!(is_comfortable(&EdgeColoredGraph::new(2, 1, vec![(0, 1, 1)]), 1));
        assert!(is_comfortable(&k4(), 3));
        assert!(!is_comfortable(&EdgeColoredGraph::alternating_cycle(4), 3));
    }

    #[test]
    fn spines_ribs_and_connectivity() {
        let g = k4();
        let (s, r) = spines_and_ribs(&g, &[0, 1, 2, 3]).unwrap();
        assert!(s.is_empty() && r.len() == 6);
        let (s, r) = spines_and_ribs(&g, &[2]).unwrap();
        assert_eq!((s.len(), r.len()), (3, 0));
        assert_eq!(edge_connectivity(&g), Ok(3));
        assert_eq!(edge_connectivity(&EdgeColoredGraph::alternating_cycle(6)), Ok(2));
        let two = EdgeColoredGraph::new(4, 1, vec![(0, 1, 1), (2, 3, 1)]);
        assert_eq!(edge_connectivity(&two), Err(CozyError::Disconnected));
    }

    #[test]
    fn knitting() {
        let g = k4();
        let all = knit(&g, &[0, 1, 2, 3]).unwrap();
        assert_eq!(all, g);
        // two copies of K4 joined by swapping a pair of color-1 edges
        let mut edges: Vec<_> = k4().edges.into_iter().filter(|e| *e != (2, 3, 1)).collect();
        edges.extend(k4().edges.iter().filter(|e| **e != (2, 3, 1)).map(|&(a, b, c)| (a + 4, b + 4, c)));
        edges.extend([(2, 6, 1), (3, 7, 1)]);
        let g = EdgeColoredGraph::new(8, 3, edges);
        assert!(is_cozy(&g));
        let cut = min_edge_cut(&g).unwrap();
        assert_eq!(cut.size, 2);
        assert_eq!(cut.side, vec![0, 1, 2, 3]);
        let mut knitted = knit(&g, &cut.side).unwrap();
        knitted.edges.sort_unstable();
        let mut expected = k4().edges;
        expected.sort_unstable();
        assert_eq!(knitted.edges, expected);
        assert!(matches!(knit(&k4(), &[0]), Err(CozyError::TooManySpines { .. })));
    }

    #[test]
    fn sampler() {
        assert_eq!(random_cozy(1, 2, 0).unwrap().edges, vec![(0, 1, 1)]);
        for seed in 0..20 {
            let g = random_cozy(4, 12, seed).unwrap();
            assert!(is_cozy(&g), "{:?}", cozy_defect(&g));
            assert_eq!(g, random_cozy(4, 12, seed).unwrap());
        }
        assert_ne!(random_cozy(3, 10, 1).unwrap(), random_cozy(3, 10, 2).unwrap());
        assert_eq!(random_cozy(3, 7, 0), Err(CozyError::Infeasible { k: 3, n: 7 }));
        assert_eq!(random_cozy(1, 4, 0), Err(CozyError::Infeasible { k: 1, n: 4 }));
    }
}
