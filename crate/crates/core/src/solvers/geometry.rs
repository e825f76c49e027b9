use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::spaces::{h_norm_sq_values, Potential};
use crate::variational::energy_value;

/// Random directions sampled on each sphere.
pub const SPHERE_DIRECTIONS: usize = 64;

/// Halvings of the trial radius before giving up.
pub const RADIUS_HALVINGS: usize = 60;

/// Doublings of the endpoint scale before giving up.
pub const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    /// Sphere radius in the energy norm.
    pub rho: f64,
    /// Smallest sampled value of `J` on the sphere.
    pub delta: f64,
    /// Endpoint `e = t1 * probe` with `J(e) < 0` and `||e||_H > rho`.
    pub e: VertexFunction,
    pub t1: f64,
    pub doublings: usize,
}

/// Detects the mountain-pass geometry around `probe`: a sphere on which the
/// sampled energy stays positive and a point beyond it with negative energy.
pub fn geometry_check(
    graph: &WeightedGraph,
    a: &Potential,
    probe: &VertexFunction,
    seed: u64,
) -> Result<GeometryReport> {
    if !probe.belongs_to(graph) || !a.belongs_to(graph) {
        return Err(Error::GraphMismatch);
    }
    let av = a.values();
    let interior: Vec<usize> = graph.interior_vertices().collect();
    let unit = |v: &[f64]| -> Option<Vec<f64>> {
        let n = h_norm_sq_values(graph, av, v).sqrt();
        (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
    };
    let mut probe_values = probe.values().to_vec();
    for x in 0..graph.len() {
        if graph.is_boundary(x) {
            probe_values[x] = 0.0;
        }
    }
    let probe_unit = unit(&probe_values).ok_or(Error::ZeroFunction("the geometry probe"))?;
    let probe_norm = h_norm_sq_values(graph, av, &probe_values).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = vec![probe_unit];
    let mut raw = vec![0.0; graph.len()];
    while directions.len() <= SPHERE_DIRECTIONS {
        for &x in &interior {
            raw[x] = StandardNormal.sample(&mut rng);
        }
        if let Some(d) = unit(&raw) {
            directions.push(d);
        }
    }

    let sphere_min = |rho: f64| -> f64 {
        directions
            .iter()
            .map(|d| {
                let v: Vec<f64> = d.iter().map(|x| rho * x).collect();
                energy_value(graph, av, &v)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut rho = 1.0;
    let mut delta = sphere_min(rho);
    let mut halvings = 0;
    while !(delta > 0.0) {
        if halvings == RADIUS_HALVINGS {
            return Err(Error::GeometryNotDetected(format!(
                "no sphere with positive sampled energy down to radius {rho:e}"
            )));
        }
        rho *= 0.5;
        delta = sphere_min(rho);
        halvings += 1;
    }

    let mut t1 = 1.0;
    for doublings in 0..=MAX_DOUBLINGS {
        let e: Vec<f64> = probe_values.iter().map(|x| t1 * x).collect();
        if t1 * probe_norm > rho && energy_value(graph, av, &e) < 0.0 {
            return Ok(GeometryReport {
                rho,
                delta,
                e: VertexFunction::new(graph, e)?,
                t1,
                doublings,
            });
        }
        t1 *= 2.0;
    }
    Err(Error::GeometryNotDetected(format!(
        "J(t probe) stayed non-negative for t up to 2^{MAX_DOUBLINGS}"
    )))
}
