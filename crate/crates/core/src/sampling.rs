//! Seeded generators for admissible instances and trial functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::families::ValueSpec;
use crate::graph::{GraphFamilySpec, VertexFunction, WeightedGraph};
use crate::spaces::{Potential, PotentialClass};

/// A random graph with a potential satisfying (A1).
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub graph: WeightedGraph,
    pub potential: Potential,
}

fn random_values(rng: &mut ChaCha8Rng) -> ValueSpec {
    if rng.random_bool(0.5) {
        ValueSpec::Constant(1.0)
    } else {
        let lo = rng.random_range(0.2..1.0);
        ValueSpec::Uniform {
            lo,
            hi: lo + rng.random_range(0.0..3.0),
        }
    }
}

/// Draws a finite family (occasionally a ball truncation with Dirichlet
/// vertices) and a potential with `a0 ∈ (-0.95, 0.5)`.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let seed = rng.random::<u64>();
    let graph = match rng.random_range(0..6) {
        0 => GraphFamilySpec::path(rng.random_range(2..30)),
        1 => GraphFamilySpec::cycle(rng.random_range(3..30)),
        2 => GraphFamilySpec::star(rng.random_range(2..16)),
        3 => GraphFamilySpec::lattice2d(rng.random_range(2..6)),
        4 => GraphFamilySpec::random_tree(rng.random_range(2..40), seed),
        _ => {
            let spec: GraphFamilySpec = "half_line".parse()?;
            let ball = spec.truncate(rng.random_range(2..25))?;
            let g = ball.graph;
            let potential = random_potential(rng, &g)?;
            return Ok(Instance {
                label: format!("{spec} ball"),
                graph: g,
                potential,
            });
        }
    }
    .with_weights(random_values(rng))
    .with_measure(random_values(rng))
    .with_seed(seed);
    let g = graph.generate()?;
    let potential = random_potential(rng, &g)?;
    Ok(Instance {
        label: graph.to_string(),
        graph: g,
        potential,
    })
}

pub fn random_potential(rng: &mut ChaCha8Rng, graph: &WeightedGraph) -> Result<Potential> {
    let a0 = rng.random_range(-0.95..0.5);
    let values = if rng.random_bool(0.3) {
        vec![a0; graph.len()]
    } else {
        (0..graph.len())
            .map(|_| a0 + rng.random_range(0.0..3.0))
            .collect()
    };
    Potential::new(graph, values, a0, PotentialClass::A2, None)
}

/// Random function, zero on Dirichlet vertices. `positive` draws values in
/// `(0, scale]`, otherwise signed values in `[-scale, scale]`.
pub fn random_function(
    rng: &mut ChaCha8Rng,
    graph: &WeightedGraph,
    scale: f64,
    positive: bool,
) -> VertexFunction {
    VertexFunction::from_fn(graph, |x| {
        if graph.is_boundary(x) {
            0.0
        } else if positive {
            scale * (1.0 - rng.random::<f64>())
        } else {
            scale * rng.random_range(-1.0..=1.0)
        }
    })
}

/// Trial pool for the Nehari certificate: a mix of positive and signed
/// random functions, vertex indicators and sparse random supports.
/// Trials that vanish on the interior are skipped.
pub fn trial_pool(graph: &WeightedGraph, size: usize, seed: u64) -> Vec<VertexFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior: Vec<usize> = graph.interior_vertices().collect();
    let mut pool = Vec::with_capacity(size);
    if interior.is_empty() {
        return pool;
    }
    while pool.len() < size {
        let scale = 10f64.powf(rng.random_range(-2.0..1.0));
        let v = match pool.len() % 4 {
            0 => random_function(&mut rng, graph, scale, true),
            1 => random_function(&mut rng, graph, scale, false),
            2 => {
                let x = interior[rng.random_range(0..interior.len())];
                VertexFunction::indicator(graph, x).scaled(scale)
            }
            _ => {
                let keep = rng.random_range(0.05..0.5);
                let mut v = random_function(&mut rng, graph, scale, true);
                for value in v.values_mut() {
                    if rng.random::<f64>() > keep {
                        *value = 0.0;
                    }
                }
                v
            }
        };
        if !v.is_zero() {
            pool.push(v);
        }
    }
    pool
}
