use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use super::{Edge, WeightedGraph};
use crate::error::{Error, Result};

/// A (possibly infinite) locally finite graph exposed through local queries.
///
/// Neighbour lists must be finite, free of duplicates and returned in a
/// deterministic order; the order fixes the vertex numbering of truncations.
pub trait LocallyFinite {
    type Vertex: Clone + Eq + Hash + Debug;

    fn contains(&self, v: &Self::Vertex) -> bool;
    fn neighbors(&self, v: &Self::Vertex) -> Vec<(Self::Vertex, f64)>;
    fn measure(&self, v: &Self::Vertex) -> f64;

    /// Whether `v` is already a Dirichlet vertex of the source graph.
    fn is_boundary(&self, _v: &Self::Vertex) -> bool {
        false
    }

    /// Upper bound of the measure over the whole graph, when one exists.
    fn measure_bound(&self) -> Option<f64> {
        None
    }
}

impl LocallyFinite for WeightedGraph {
    type Vertex = usize;

    fn contains(&self, v: &usize) -> bool {
        *v < self.len()
    }

    fn neighbors(&self, v: &usize) -> Vec<(usize, f64)> {
        WeightedGraph::neighbors(self, *v).collect()
    }

    fn measure(&self, v: &usize) -> f64 {
        self.mu(*v)
    }

    fn is_boundary(&self, v: &usize) -> bool {
        WeightedGraph::is_boundary(self, *v)
    }

    fn measure_bound(&self) -> Option<f64> {
        self.mu_bound()
    }
}

/// Closed ball `{x : d(x, center) <= radius}` as a finite graph.
///
/// Vertices are numbered in breadth-first order from the center, so the
/// ball of radius `R` is a prefix of the ball of radius `R' > R`.
#[derive(Debug, Clone)]
pub struct Ball<V> {
    pub graph: WeightedGraph,
    /// Source-graph vertex for each ball vertex.
    pub labels: Vec<V>,
    /// Hop distance from the center for each ball vertex.
    pub depth: Vec<usize>,
    pub radius: usize,
}

/// Breadth-first ball truncation with Dirichlet flags on the outer sphere.
///
/// A vertex at distance exactly `radius` is flagged as Dirichlet boundary
/// when it has a neighbour outside the ball; if the ball already exhausts
/// the graph no vertex is flagged. Edges are those of the induced subgraph.
pub fn ball_truncate<G: LocallyFinite>(
    graph: &G,
    center: &G::Vertex,
    radius: usize,
) -> Result<Ball<G::Vertex>> {
    if !graph.contains(center) {
        return Err(Error::UnknownVertex(format!("{center:?}")));
    }
    if radius < 1 {
        return Err(Error::InvalidArgument("ball radius must be at least 1".into()));
    }

    let mut index: HashMap<G::Vertex, usize> = HashMap::new();
    let mut labels = vec![center.clone()];
    let mut depth = vec![0usize];
    let mut adjacency: Vec<Vec<(G::Vertex, f64)>> = Vec::new();
    index.insert(center.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let here = labels[i].clone();
        let nbrs = graph.neighbors(&here);
        if adjacency.len() <= i {
            adjacency.resize_with(i + 1, Vec::new);
        }
        if depth[i] < radius {
            for (y, _) in &nbrs {
                if !index.contains_key(y) {
                    let j = labels.len();
                    index.insert(y.clone(), j);
                    labels.push(y.clone());
                    depth.push(depth[i] + 1);
                    queue.push_back(j);
                }
            }
        }
        adjacency[i] = nbrs;
    }

    let n = labels.len();
    // radius >= 1, so a one-vertex ball means the center has no neighbours
    if n == 1 {
        return Err(Error::DisconnectedCenter(format!("{center:?}")));
    }

    let mut edges = Vec::new();
    let mut boundary = vec![false; n];
    for i in 0..n {
        let mut leaves_ball = false;
        for (y, w) in &adjacency[i] {
            match index.get(y) {
                Some(&j) if i < j => edges.push(Edge { x: i, y: j, w: *w }),
                Some(_) => {}
                None => leaves_ball = true,
            }
        }
        boundary[i] = graph.is_boundary(&labels[i]) || (depth[i] == radius && leaves_ball);
    }
    let measure = labels.iter().map(|v| graph.measure(v)).collect();
    let graph_out =
        WeightedGraph::new(measure, edges, boundary)?.with_measure_bound(graph.measure_bound());
    Ok(Ball {
        graph: graph_out,
        labels,
        depth,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::{HalfLine, LatticeZ2};

    #[test]
    fn half_line_ball_flags_outer_vertex() {
        let ball = ball_truncate(&HalfLine::unit(), &0, 5).unwrap();
        assert_eq!(ball.labels, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(
            ball.graph.boundary(),
            &[false, false, false, false, false, true]
        );
        assert_eq!(ball.graph.edges().len(), 5);
    }

    #[test]
    fn z2_ball_of_radius_two_has_thirteen_vertices() {
        let ball = ball_truncate(&LatticeZ2::unit(), &(0, 0), 2).unwrap();
        let oracle = (-2i64..=2)
            .flat_map(|i| (-2i64..=2).map(move |j| (i, j)))
            .filter(|(i, j)| i.abs() + j.abs() <= 2)
            .count();
        assert_eq!(oracle, 13);
        assert_eq!(ball.graph.len(), 13);
        assert_eq!(ball.graph.boundary().iter().filter(|b| **b).count(), 8);
    }

    #[test]
    fn ball_covering_finite_graph_has_no_boundary() {
        let g = crate::graph::GraphFamilySpec::path(4).generate().unwrap();
        let ball = ball_truncate(&g, &0, 10).unwrap();
        assert_eq!(ball.graph.len(), 4);
        assert!(ball.graph.boundary().iter().all(|b| !b));
        assert_eq!(ball.graph, g);
    }

    #[test]
    fn ball_errors() {
        let g = crate::graph::GraphFamilySpec::path(4).generate().unwrap();
        assert!(matches!(ball_truncate(&g, &9, 1), Err(Error::UnknownVertex(_))));
        assert!(matches!(ball_truncate(&g, &0, 0), Err(Error::InvalidArgument(_))));
        let lone = WeightedGraph::single_vertex(1.0).unwrap();
        assert!(matches!(ball_truncate(&lone, &0, 1), Err(Error::DisconnectedCenter(_))));
    }

    #[test]
    fn balls_are_nested_prefixes() {
        let small = ball_truncate(&LatticeZ2::unit(), &(0, 0), 3).unwrap();
        let large = ball_truncate(&LatticeZ2::unit(), &(0, 0), 5).unwrap();
        assert_eq!(&large.labels[..small.labels.len()], &small.labels[..]);
    }
}
