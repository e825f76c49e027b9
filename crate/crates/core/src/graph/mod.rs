//! Weighted locally finite graphs and their discrete calculus.
//!
//! A [`WeightedGraph`] is a finite graph (typically a ball truncation of an
//! infinite locally finite graph) with symmetric positive edge weights, a
//! positive vertex measure and per-vertex Dirichlet-boundary flags.
//! Functions on the vertex set are [`VertexFunction`]s, tagged with the
//! [`GraphId`] of the graph they live on.
//!
//! All per-vertex reductions sum over neighbours in ascending vertex id and
//! all integrals sum over vertices in ascending id, so every operator here is
//! bitwise deterministic.

mod ball;
pub mod families;
pub mod io;

use std::collections::hash_map::DefaultHasher;
use std::collections::VecDeque;
use std::fmt::Debug;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

pub use ball::{ball_truncate, Ball, LocallyFinite};
pub use families::{GraphFamilySpec, HalfLine, HalfLineMeasure, LatticeZ2};

/// Content fingerprint of a graph, used to reject mixing functions across graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphId(pub u64);

/// An undirected edge `x -- y` with weight `w`, stored once with `x < y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub x: usize,
    pub y: usize,
    pub w: f64,
}

/// Finite weighted graph with vertex measure and boundary flags.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    id: GraphId,
    measure: Vec<f64>,
    boundary: Vec<bool>,
    edges: Vec<Edge>,
    // CSR adjacency, neighbours sorted by id.
    offsets: Vec<usize>,
    adjacent: Vec<usize>,
    weights: Vec<f64>,
    mu_min: f64,
    mu_bound: Option<f64>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.measure.len() == other.measure.len()
            && self
                .measure
                .iter()
                .zip(&other.measure)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self.boundary == other.boundary
            && self.edges.len() == other.edges.len()
            && self.edges.iter().zip(&other.edges).all(|(a, b)| {
                a.x == b.x && a.y == b.y && a.w.to_bits() == b.w.to_bits()
            })
    }
}

impl WeightedGraph {
    /// Builds a graph from per-vertex measure, undirected edges and boundary flags.
    ///
    /// Each undirected edge must appear once (in either orientation). The
    /// measure must be positive, weights positive, no self-loops, and the
    /// interior vertices must induce a connected subgraph.
    pub fn new(measure: Vec<f64>, edges: Vec<Edge>, boundary: Vec<bool>) -> Result<Self> {
        let n = measure.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if boundary.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: boundary.len(),
            });
        }
        if let Some((x, m)) = measure
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(Error::InvalidGraph(format!(
                "measure at vertex {x} must be positive and finite, got {m}"
            )));
        }

        let mut normalized = Vec::with_capacity(edges.len());
        for e in &edges {
            if e.x >= n || e.y >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) references a vertex outside 0..{n}",
                    e.x, e.y
                )));
            }
            if e.x == e.y {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", e.x)));
            }
            if !(e.w.is_finite() && e.w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive weight {}",
                    e.x, e.y, e.w
                )));
            }
            let (x, y) = if e.x < e.y { (e.x, e.y) } else { (e.y, e.x) };
            normalized.push(Edge { x, y, w: e.w });
        }
        normalized.sort_by(|a, b| (a.x, a.y).cmp(&(b.x, b.y)));
        if let Some(pair) = normalized
            .windows(2)
            .find(|p| p[0].x == p[1].x && p[0].y == p[1].y)
        {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                pair[0].x, pair[0].y
            )));
        }

        let mut degree = vec![0usize; n];
        for e in &normalized {
            degree[e.x] += 1;
            degree[e.y] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacent = vec![0usize; offsets[n]];
        let mut weights = vec![0f64; offsets[n]];
        // Edges are sorted by (x, y); inserting both directions in this order
        // leaves every neighbour list sorted by id.
        let mut directed: Vec<(usize, usize, f64)> = normalized
            .iter()
            .flat_map(|e| [(e.x, e.y, e.w), (e.y, e.x, e.w)])
            .collect();
        directed.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for (x, y, w) in directed {
            adjacent[fill[x]] = y;
            weights[fill[x]] = w;
            fill[x] += 1;
        }

        let mu_min = measure.iter().copied().fold(f64::INFINITY, f64::min);
        let mut graph = Self {
            id: GraphId(0),
            measure,
            boundary,
            edges: normalized,
            offsets,
            adjacent,
            weights,
            mu_min,
            mu_bound: None,
        };
        graph.check_interior_connected()?;
        graph.id = graph.fingerprint();
        Ok(graph)
    }

    /// Graph with every vertex interior.
    pub fn interior(measure: Vec<f64>, edges: Vec<Edge>) -> Result<Self> {
        let n = measure.len();
        Self::new(measure, edges, vec![false; n])
    }

    /// Single isolated vertex with measure `mu`.
    pub fn single_vertex(mu: f64) -> Result<Self> {
        Self::interior(vec![mu], Vec::new())
    }

    /// Records a declared upper bound of the measure on the underlying
    /// (possibly infinite) graph. Families with unbounded measure keep `None`.
    pub fn with_measure_bound(mut self, bound: Option<f64>) -> Self {
        self.mu_bound = bound;
        self
    }

    fn check_interior_connected(&self) -> Result<()> {
        let n = self.len();
        let Some(start) = (0..n).find(|&x| !self.boundary[x]) else {
            return Ok(());
        };
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            for (y, _) in self.neighbors(x) {
                if !self.boundary[y] && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match (0..n).find(|&x| !self.boundary[x] && !seen[x]) {
            Some(x) => Err(Error::InvalidGraph(format!(
                "interior subgraph is disconnected: vertex {x} unreachable from {start}"
            ))),
            None => Ok(()),
        }
    }

    fn fingerprint(&self) -> GraphId {
        let mut h = DefaultHasher::new();
        self.measure.len().hash(&mut h);
        for m in &self.measure {
            m.to_bits().hash(&mut h);
        }
        self.boundary.hash(&mut h);
        for e in &self.edges {
            (e.x, e.y, e.w.to_bits()).hash(&mut h);
        }
        GraphId(h.finish())
    }

    pub fn id(&self) -> GraphId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn mu(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn mu_min(&self) -> f64 {
        self.mu_min
    }

    /// Declared measure upper bound on the underlying graph, when one exists.
    pub fn mu_bound(&self) -> Option<f64> {
        self.mu_bound
    }

    pub fn volume(&self) -> f64 {
        numeric::sum(self.measure.iter().copied())
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary(&self, x: usize) -> bool {
        self.boundary[x]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&x| !self.boundary[x])
    }

    pub fn interior_count(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// Weighted degree `sum_{y ~ x} w_xy`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        numeric::sum(self.weights[self.offsets[x]..self.offsets[x + 1]].iter().copied())
    }

    /// Neighbours of `x` with edge weights, in ascending id order.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[x]..self.offsets[x + 1];
        self.adjacent[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Hop-count distances from `source`; unreachable vertices get `None`.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for (y, _) in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Graph with the same vertices and edges and the given boundary flags.
    pub fn with_boundary(&self, boundary: Vec<bool>) -> Result<Self> {
        Self::new(self.measure.clone(), self.edges.clone(), boundary)
            .map(|g| g.with_measure_bound(self.mu_bound))
    }

    fn check(&self, f: &VertexFunction) -> Result<()> {
        if f.values.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found: f.values.len(),
            });
        }
        if f.graph != self.id {
            return Err(Error::GraphMismatch);
        }
        Ok(())
    }

    /// `sum_x mu(x) f(x)`.
    pub fn integrate(&self, f: &VertexFunction) -> Result<f64> {
        self.check(f)?;
        Ok(self.integrate_values(&f.values))
    }

    pub(crate) fn integrate_values(&self, values: &[f64]) -> f64 {
        numeric::sum(self.measure.iter().zip(values).map(|(m, v)| m * v))
    }

    /// Graph Laplacian `(1/mu(x)) sum_{y~x} w_xy (u(y) - u(x))`.
    pub fn laplacian(&self, u: &VertexFunction) -> Result<VertexFunction> {
        self.check(u)?;
        let values = self.laplacian_values(&u.values);
        Ok(VertexFunction {
            graph: self.id,
            values,
        })
    }

    pub(crate) fn laplacian_values(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|x| {
                let ux = u[x];
                numeric::sum(self.neighbors(x).map(|(y, w)| w * (u[y] - ux))) / self.measure[x]
            })
            .collect()
    }

    /// Combinatorial Laplacian `sum_{y~x} w_xy (u(x) - u(y))`, i.e. `-mu * Delta u`.
    pub(crate) fn stiffness_apply(&self, u: &[f64], out: &mut [f64]) {
        for x in 0..self.len() {
            let ux = u[x];
            out[x] = numeric::sum(self.neighbors(x).map(|(y, w)| w * (ux - u[y])));
        }
    }

    /// Gradient form `Gamma(u, v)(x) = (1/(2 mu(x))) sum_{y~x} w_xy (u(y)-u(x)) (v(y)-v(x))`.
    pub fn gradient_form(&self, u: &VertexFunction, v: &VertexFunction) -> Result<VertexFunction> {
        self.check(u)?;
        self.check(v)?;
        let values = (0..self.len())
            .map(|x| {
                let s = numeric::sum(
                    self.neighbors(x)
                        .map(|(y, w)| w * (u.values[y] - u.values[x]) * (v.values[y] - v.values[x])),
                );
                s / (2.0 * self.measure[x])
            })
            .collect();
        Ok(VertexFunction {
            graph: self.id,
            values,
        })
    }

    /// `int_V |grad u|^2 dmu`, evaluated as the sum over undirected edges of
    /// `w_xy (u(y) - u(x))^2` (equal to integrating `Gamma(u, u)`).
    pub fn dirichlet_energy(&self, u: &VertexFunction) -> Result<f64> {
        self.check(u)?;
        Ok(self.dirichlet_values(&u.values, &u.values))
    }

    /// Bilinear Dirichlet form `int_V Gamma(u, v) dmu` as an edge sum.
    pub(crate) fn dirichlet_values(&self, u: &[f64], v: &[f64]) -> f64 {
        numeric::sum(
            self.edges
                .iter()
                .map(|e| e.w * (u[e.y] - u[e.x]) * (v[e.y] - v[e.x])),
        )
    }
}

/// A real-valued function on the vertices of a particular graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexFunction {
    graph: GraphId,
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(graph: &WeightedGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.len() {
            return Err(Error::Dimension {
                expected: graph.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            graph: graph.id(),
            values,
        })
    }

    pub fn zeros(graph: &WeightedGraph) -> Self {
        Self::constant(graph, 0.0)
    }

    pub fn constant(graph: &WeightedGraph, c: f64) -> Self {
        Self {
            graph: graph.id(),
            values: vec![c; graph.len()],
        }
    }

    pub fn from_fn(graph: &WeightedGraph, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            graph: graph.id(),
            values: (0..graph.len()).map(f).collect(),
        }
    }

    /// Indicator function of a single vertex.
    pub fn indicator(graph: &WeightedGraph, x: usize) -> Self {
        Self::from_fn(graph, |y| if y == x { 1.0 } else { 0.0 })
    }

    pub fn graph_id(&self) -> GraphId {
        self.graph
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn belongs_to(&self, graph: &WeightedGraph) -> bool {
        self.graph == graph.id() && self.values.len() == graph.len()
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.map(|v| t * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            graph: self.graph,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        debug_assert_eq!(self.graph, other.graph);
        Self {
            graph: self.graph,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        }
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Same values, re-tagged to `graph` (which must have the same vertex count).
    pub fn rebind(&self, graph: &WeightedGraph) -> Result<Self> {
        Self::new(graph, self.values.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_path(n: usize) -> WeightedGraph {
        let edges = (0..n - 1).map(|x| Edge { x, y: x + 1, w: 1.0 }).collect();
        WeightedGraph::interior(vec![1.0; n], edges).unwrap()
    }

    #[test]
    fn integrate_matches_hand_sums() {
        let g = WeightedGraph::interior(
            vec![2.0; 3],
            vec![Edge { x: 0, y: 1, w: 1.0 }, Edge { x: 1, y: 2, w: 1.0 }],
        )
        .unwrap();
        assert_eq!(g.integrate(&VertexFunction::constant(&g, 1.0)).unwrap(), 6.0);
        assert_eq!(g.integrate(&VertexFunction::zeros(&g)).unwrap(), 0.0);

        let g = WeightedGraph::interior(
            vec![1.0, 2.0, 3.0],
            vec![Edge { x: 0, y: 1, w: 1.0 }, Edge { x: 1, y: 2, w: 1.0 }],
        )
        .unwrap();
        let f = VertexFunction::from_fn(&g, |x| x as f64);
        assert_eq!(g.integrate(&f).unwrap(), 8.0);
    }

    #[test]
    fn laplacian_small_cases() {
        let g = unit_path(2);
        let u = VertexFunction::new(&g, vec![0.0, 1.0]).unwrap();
        assert_eq!(g.laplacian(&u).unwrap().values(), &[1.0, -1.0]);

        let g = unit_path(3);
        let u = VertexFunction::new(&g, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(g.laplacian(&u).unwrap().values(), &[1.0, -2.0, 1.0]);

        let c = VertexFunction::constant(&g, 3.5);
        assert!(g.laplacian(&c).unwrap().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gradient_form_two_vertices() {
        let g = unit_path(2);
        let u = VertexFunction::new(&g, vec![0.0, 1.0]).unwrap();
        assert_eq!(g.gradient_form(&u, &u).unwrap().values(), &[0.5, 0.5]);
        assert_eq!(g.dirichlet_energy(&u).unwrap(), 1.0);
        let c = VertexFunction::constant(&g, 2.0);
        assert!(g.gradient_form(&c, &u).unwrap().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_invalid_structures() {
        assert!(WeightedGraph::interior(vec![1.0, 0.0], vec![Edge { x: 0, y: 1, w: 1.0 }]).is_err());
        assert!(WeightedGraph::interior(vec![1.0, 1.0], vec![Edge { x: 0, y: 0, w: 1.0 }]).is_err());
        assert!(WeightedGraph::interior(vec![1.0, 1.0], vec![Edge { x: 0, y: 1, w: -1.0 }]).is_err());
        assert!(WeightedGraph::interior(
            vec![1.0, 1.0],
            vec![Edge { x: 0, y: 1, w: 1.0 }, Edge { x: 1, y: 0, w: 2.0 }]
        )
        .is_err());
        // two interior components
        assert!(WeightedGraph::interior(vec![1.0; 3], vec![Edge { x: 0, y: 1, w: 1.0 }]).is_err());
        // separated only through a boundary vertex
        let edges = vec![Edge { x: 0, y: 1, w: 1.0 }, Edge { x: 1, y: 2, w: 1.0 }];
        assert!(WeightedGraph::new(vec![1.0; 3], edges, vec![false, true, false]).is_err());
    }

    #[test]
    fn function_graph_mismatch_is_reported() {
        let g2 = unit_path(2);
        let g3 = unit_path(3);
        let u = VertexFunction::zeros(&g3);
        assert!(matches!(g2.integrate(&u), Err(Error::Dimension { .. })));
        let g3b = WeightedGraph::interior(
            vec![1.0, 2.0, 1.0],
            vec![Edge { x: 0, y: 1, w: 1.0 }, Edge { x: 1, y: 2, w: 1.0 }],
        )
        .unwrap();
        assert!(matches!(g3b.laplacian(&u), Err(Error::GraphMismatch)));
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let g = WeightedGraph::interior(
            vec![1.0; 4],
            vec![
                Edge { x: 3, y: 0, w: 2.0 },
                Edge { x: 0, y: 1, w: 1.0 },
                Edge { x: 2, y: 1, w: 0.5 },
            ],
        )
        .unwrap();
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![(1, 1.0), (3, 2.0)]);
        assert_eq!(g.neighbors(1).collect::<Vec<_>>(), vec![(0, 1.0), (2, 0.5)]);
        for e in g.edges() {
            assert!(e.x < e.y);
            assert!(g.neighbors(e.y).any(|(y, w)| y == e.x && w == e.w));
        }
    }
}
