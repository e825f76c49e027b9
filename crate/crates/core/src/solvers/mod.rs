//! Ground-state solvers: Nehari-constrained descent, a mountain-pass path
//! method, the mountain-pass geometry check and a domain-exhaustion driver.
//!
//! Both solvers move along the energy-space gradient `G`, the Riesz
//! representative of `J'(u)` defined by `<G, v>_H = J'(u).v`, obtained from a
//! conjugate-gradient solve with the operator `-Δ + (a + 1)`.

mod cg;
mod config;
mod exhaustion;
mod geometry;
mod mountain_pass;
mod nehari;
mod trace;

pub use config::{Init, Method, SolverConfig, StepControl};
pub use exhaustion::{exhaustion_study, ExhaustionRecord};
pub use geometry::{geometry_check, GeometryReport};
pub use mountain_pass::{mountain_pass, MountainPassOutcome};
pub use nehari::{nehari_descent, nehari_descent_from};
pub use trace::{IterRecord, SolveSummary, SolveTrace, Termination};

use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::numeric::{self, log_sq};
use crate::spaces::Potential;
use crate::variational::{residual_l2_values, residual_values};

use cg::HOperator;

/// Values below this magnitude are replaced by zero in solver iterates.
pub(crate) const FLUSH: f64 = 1e-300;

/// Relative tolerance of the inner solve behind reported Cerami products.
pub(crate) const TIGHT_CG: f64 = 1e-10;

pub(crate) fn flush(u: &mut [f64]) {
    for v in u {
        if v.abs() < FLUSH {
            *v = 0.0;
        }
    }
}

pub(crate) struct Gradient {
    pub g: Vec<f64>,
    /// `J'(u).G = ||G||_H^2 = ||J'(u)||^2` in the dual norm.
    pub dual_sq: f64,
    pub residual_l2: f64,
    pub residual_linf: f64,
}

impl Gradient {
    pub fn dual_norm(&self) -> f64 {
        self.dual_sq.sqrt()
    }
}

/// Shared state of a solve on one truncation.
pub(crate) struct Problem<'a> {
    pub graph: &'a WeightedGraph,
    pub a: &'a [f64],
    op: HOperator<'a>,
}

impl<'a> Problem<'a> {
    pub fn new(graph: &'a WeightedGraph, a: &'a Potential) -> Result<Self> {
        if !a.belongs_to(graph) {
            return Err(Error::GraphMismatch);
        }
        Ok(Self {
            graph,
            a: a.values(),
            op: HOperator::new(graph, a.values()),
        })
    }

    /// Energy-space gradient at `u`; `guess` warm-starts the inner solve.
    pub fn gradient(&self, u: &[f64], guess: &mut Vec<f64>, cg_tol: f64) -> Gradient {
        let r = residual_values(self.graph, self.a, u);
        let b: Vec<f64> = r
            .iter()
            .enumerate()
            .map(|(x, r)| self.graph.mu(x) * r)
            .collect();
        self.op.solve(&b, guess, cg_tol);
        let dual_sq = numeric::dot(guess, &b).max(0.0);
        Gradient {
            g: guess.clone(),
            dual_sq,
            residual_l2: residual_l2_values(self.graph, &r),
            residual_linf: r.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        }
    }

    /// `(1 + ||u||_H) ||J'(u)||` from a tight inner solve.
    pub fn cerami(&self, u: &[f64]) -> f64 {
        let mut guess = Vec::new();
        let grad = self.gradient(u, &mut guess, TIGHT_CG);
        let h = crate::spaces::h_norm_sq_values(self.graph, self.a, u);
        (1.0 + h.sqrt()) * grad.dual_norm()
    }

    /// `J(c) - J(u)` evaluated from vertex and edge differences, which keeps
    /// the result accurate when the two energies agree to many digits.
    pub fn energy_difference(&self, u: &[f64], c: &[f64]) -> f64 {
        let g = self.graph;
        let delta: Vec<f64> = c.iter().zip(u).map(|(c, u)| c - u).collect();
        let sum: Vec<f64> = c.iter().zip(u).map(|(c, u)| c + u).collect();
        let dirichlet = numeric::sum(
            g.edges()
                .iter()
                .map(|e| e.w * (delta[e.y] - delta[e.x]) * (sum[e.y] - sum[e.x])),
        );
        let mut local = numeric::Accumulator::new();
        for x in 0..g.len() {
            let (cx, ux) = (c[x], u[x]);
            let log_part = if cx == 0.0 || ux == 0.0 {
                numeric::s2_log_s2(cx) - numeric::s2_log_s2(ux)
            } else {
                let ratio = (cx.abs() - ux.abs()) / ux.abs();
                delta[x] * sum[x] * log_sq(cx) + ux * ux * 2.0 * ratio.ln_1p()
            };
            local.add(g.mu(x) * ((self.a[x] + 1.0) * delta[x] * sum[x] - log_part));
        }
        0.5 * (dirichlet + local.value())
    }
}

pub(crate) fn finish(graph: &WeightedGraph, u: Vec<f64>) -> Result<VertexFunction> {
    VertexFunction::new(graph, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphFamilySpec;
    use crate::variational::energy_value;

    #[test]
    fn energy_difference_matches_direct_subtraction() {
        let g = "random_tree:20,5,w=0.5..2,mu=0.5..2"
            .parse::<GraphFamilySpec>()
            .unwrap()
            .generate()
            .unwrap();
        let a = Potential::from_values(&g, (0..20).map(|x| 0.05 * x as f64 - 0.4).collect()).unwrap();
        let p = Problem::new(&g, &a).unwrap();
        let u: Vec<f64> = (0..20).map(|x| 0.2 + (x as f64 * 0.7).sin().abs()).collect();
        let mut c = u.clone();
        c[3] = 0.0;
        c[4] = -0.4;
        c[7] *= 1.3;
        let direct = energy_value(&g, a.values(), &c) - energy_value(&g, a.values(), &u);
        assert!((p.energy_difference(&u, &c) - direct).abs() < 1e-13);
    }

    #[test]
    fn gradient_represents_the_derivative() {
        let g = GraphFamilySpec::path(8).generate().unwrap();
        let a = Potential::constant(&g, -0.3).unwrap();
        let p = Problem::new(&g, &a).unwrap();
        let u: Vec<f64> = (0..8).map(|x| 0.5 + 0.1 * x as f64).collect();
        let mut guess = Vec::new();
        let grad = p.gradient(&u, &mut guess, 1e-13);
        for y in 0..8 {
            let mut v = vec![0.0; 8];
            v[y] = 1.0;
            let lhs = crate::spaces::h_inner_values(&g, a.values(), &grad.g, &v);
            let rhs = crate::variational::derivative_values(&g, a.values(), &u, &v);
            assert!((lhs - rhs).abs() < 1e-11);
        }
    }
}
