//! Ground states of the logarithmic Schrödinger equation
//! `-Δu + a(x) u = u log u²` on weighted locally finite graphs.
//!
//! The crate provides the graph layer (finite weighted graphs, ball
//! truncations of infinite families, interchange formats), the energy space
//! and its embeddings, the variational functional with its Nehari machinery,
//! two ground-state solvers (Nehari descent and a mountain-pass path method),
//! and checkers for the summability examples that separate the energy space
//! from the domain of the functional.

pub mod error;
pub mod graph;
pub mod numeric;
pub mod sampling;
pub mod spaces;
pub mod solvers;
pub mod variational;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{GraphFamilySpec, GraphId, VertexFunction, WeightedGraph};
pub use spaces::{Potential, PotentialClass, PotentialFamilySpec};
