use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::nehari::nehari_descent_from;
use super::trace::Termination;
use crate::error::{Error, Result};
use crate::graph::{GraphFamilySpec, VertexFunction};
use crate::numeric;
use crate::spaces::{potential_generate, PotentialFamilySpec};
use crate::variational::energy;

/// Result of one truncation in an exhaustion study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionRecord {
    pub radius: usize,
    pub vertices: usize,
    /// `J` at the returned state; NaN when the solve failed.
    pub d_hat: f64,
    pub iters: usize,
    pub terminated: Option<Termination>,
    pub residual_linf: f64,
    /// `int u^2 dmu`.
    pub mass: f64,
    /// `int_{d(x) > R/2} u^2 dmu`.
    pub tail_mass: f64,
    /// Mean hop distance from the center weighted by `u^2 mu`.
    pub center_of_mass: f64,
    /// Solver error, if the solve at this radius failed.
    pub error: Option<String>,
}

/// Solves on the balls `B_R` of `generator` for each `R` in
/// `cfg.radius_schedule`, warm-starting each radius from the previous
/// solution extended by zero. The first radius starts from `cfg.init`.
/// Uses Nehari descent regardless of `cfg.method`.
pub fn exhaustion_study(
    generator: &GraphFamilySpec,
    a_spec: &PotentialFamilySpec,
    cfg: &SolverConfig,
) -> Result<Vec<ExhaustionRecord>> {
    cfg.validate()?;
    if cfg.radius_schedule.is_empty() {
        return Err(Error::InvalidConfig("radius_schedule is empty".into()));
    }
    let mut records = Vec::with_capacity(cfg.radius_schedule.len());
    let mut previous: Option<Vec<f64>> = None;
    for &radius in &cfg.radius_schedule {
        let ball = generator.truncate(radius)?;
        let g = &ball.graph;
        let a = potential_generate(a_spec, g)?;
        let start = match &previous {
            // breadth-first numbering makes the smaller ball a prefix
            Some(prev) => {
                let mut values = vec![0.0; g.len()];
                let n = prev.len().min(g.len());
                values[..n].copy_from_slice(&prev[..n]);
                VertexFunction::new(g, values)?
            }
            None => cfg.init.realize(g, cfg.seed)?,
        };
        let mut record = ExhaustionRecord {
            radius,
            vertices: g.len(),
            d_hat: f64::NAN,
            iters: 0,
            terminated: None,
            residual_linf: f64::NAN,
            mass: f64::NAN,
            tail_mass: f64::NAN,
            center_of_mass: f64::NAN,
            error: None,
        };
        match nehari_descent_from(g, &a, cfg, &start) {
            Ok((u, trace)) => {
                let rep = energy(g, &a, &u)?;
                let weights: Vec<f64> = (0..g.len()).map(|x| g.mu(x) * u.get(x).powi(2)).collect();
                let mass = numeric::sum(weights.iter().copied());
                record.d_hat = rep.j;
                record.iters = trace.iterations();
                record.terminated = Some(trace.termination);
                record.residual_linf = rep.residual_linf;
                record.mass = mass;
                record.tail_mass = numeric::sum(
                    (0..g.len())
                        .filter(|&x| 2 * ball.depth[x] > radius)
                        .map(|x| weights[x]),
                );
                record.center_of_mass =
                    numeric::sum((0..g.len()).map(|x| weights[x] * ball.depth[x] as f64)) / mass;
                previous = Some(u.into_values());
            }
            Err(e) => record.error = Some(e.to_string()),
        }
        records.push(record);
    }
    Ok(records)
}
