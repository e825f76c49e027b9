//! Graph interchange: JSON documents and DOT export.
//!
//! The JSON layout is
//! `{"vertices": [{"id", "mu", "boundary", "a"?, "u"?}], "edges": [{"x", "y", "w"}]}`
//! where the optional per-vertex `a` carries a potential and `u` a solution.
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! written graph reloads bit-for-bit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Edge, VertexFunction, WeightedGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: usize,
    mu: f64,
    #[serde(default)]
    boundary: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    x: usize,
    y: usize,
    w: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDocument {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
}

/// A graph together with the optional per-vertex fields of the document.
#[derive(Debug, Clone)]
pub struct GraphData {
    pub graph: WeightedGraph,
    pub potential: Option<Vec<f64>>,
    pub solution: Option<Vec<f64>>,
}

/// Serializes a graph with optional potential values `a` and solution `u`.
pub fn to_json(
    graph: &WeightedGraph,
    potential: Option<&[f64]>,
    solution: Option<&VertexFunction>,
) -> Result<String> {
    if let Some(a) = potential {
        if a.len() != graph.len() {
            return Err(Error::Dimension {
                expected: graph.len(),
                found: a.len(),
            });
        }
    }
    if let Some(u) = solution {
        if !u.belongs_to(graph) {
            return Err(Error::GraphMismatch);
        }
    }
    let doc = GraphDocument {
        vertices: (0..graph.len())
            .map(|x| VertexRecord {
                id: x,
                mu: graph.mu(x),
                boundary: graph.is_boundary(x),
                a: potential.map(|a| a[x]),
                u: solution.map(|u| u.get(x)),
            })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeRecord { x: e.x, y: e.y, w: e.w })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Interchange(e.to_string()))
}

/// Parses a graph document. Vertex ids must be exactly `0..n` (in any order);
/// `a` and `u` must be present on all vertices or none.
pub fn from_json(text: &str) -> Result<GraphData> {
    let mut doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| Error::Interchange(e.to_string()))?;
    doc.vertices.sort_by_key(|v| v.id);
    if let Some((i, v)) = doc.vertices.iter().enumerate().find(|(i, v)| v.id != *i) {
        return Err(Error::Interchange(format!(
            "vertex ids must be dense 0..n; position {i} holds id {}",
            v.id
        )));
    }
    let collect = |pick: fn(&VertexRecord) -> Option<f64>, name: &str| -> Result<Option<Vec<f64>>> {
        let present = doc.vertices.iter().filter(|v| pick(v).is_some()).count();
        match present {
            0 => Ok(None),
            n if n == doc.vertices.len() => Ok(Some(doc.vertices.iter().map(|v| pick(v).unwrap()).collect())),
            _ => Err(Error::Interchange(format!(
                "field '{name}' must be given on every vertex or none"
            ))),
        }
    };
    let potential = collect(|v| v.a, "a")?;
    let solution = collect(|v| v.u, "u")?;
    let graph = WeightedGraph::new(
        doc.vertices.iter().map(|v| v.mu).collect(),
        doc.edges
            .iter()
            .map(|e| Edge { x: e.x, y: e.y, w: e.w })
            .collect(),
        doc.vertices.iter().map(|v| v.boundary).collect(),
    )?;
    Ok(GraphData {
        graph,
        potential,
        solution,
    })
}

/// DOT rendering; vertex labels show `u` when a function is attached.
/// Dirichlet vertices are drawn as boxes.
pub fn to_dot(graph: &WeightedGraph, solution: Option<&VertexFunction>) -> Result<String> {
    if let Some(u) = solution {
        if !u.belongs_to(graph) {
            return Err(Error::GraphMismatch);
        }
    }
    let mut out = String::from("graph G {\n");
    for x in 0..graph.len() {
        let label = match solution {
            Some(u) => format!("{:.6e}", u.get(x)),
            None => x.to_string(),
        };
        let shape = if graph.is_boundary(x) { "box" } else { "ellipse" };
        let _ = writeln!(
            out,
            "  {x} [label=\"{label}\", shape={shape}, mu=\"{}\"];",
            graph.mu(x)
        );
    }
    for e in graph.edges() {
        let _ = writeln!(out, "  {} -- {} [weight=\"{}\"];", e.x, e.y, e.w);
    }
    out.push_str("}\n");
    Ok(out)
}
