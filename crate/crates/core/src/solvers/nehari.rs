use super::config::{Method, SolverConfig};
use super::trace::{IterRecord, SolveTrace, Termination};
use super::{finish, flush, Problem};
use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::spaces::Potential;
use crate::variational::{energy_value, nehari_scale_values, pieces, report_values};

/// Minimizes `J` over the Nehari set by projected energy-space gradient
/// descent from `cfg.init`.
///
/// Each iteration sets `u <- t (u - s G)` with `t` the closed-form Nehari
/// scale, backtracking on `s` until `J` drops by at least `armijo * s * ||G||^2`.
/// Stops when `residual_l2 <= grad_tol` and `residual_linf <= grad_tol (1 + ||u||_inf)`.
pub fn nehari_descent(
    graph: &WeightedGraph,
    a: &Potential,
    cfg: &SolverConfig,
) -> Result<(VertexFunction, SolveTrace)> {
    cfg.validate()?;
    let init = cfg.init.realize(graph, cfg.seed)?;
    nehari_descent_from(graph, a, cfg, &init)
}

/// [`nehari_descent`] from an explicit starting state. A start already on the
/// Nehari set is used as is.
pub fn nehari_descent_from(
    graph: &WeightedGraph,
    a: &Potential,
    cfg: &SolverConfig,
    init: &VertexFunction,
) -> Result<(VertexFunction, SolveTrace)> {
    cfg.validate()?;
    if !init.belongs_to(graph) {
        return Err(Error::GraphMismatch);
    }
    let problem = Problem::new(graph, a)?;
    let mut u = init.values().to_vec();
    for x in 0..graph.len() {
        if graph.is_boundary(x) {
            u[x] = 0.0;
        }
    }
    flush(&mut u);
    if u.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroFunction("the initial state"));
    }
    if !report_values(graph, a.values(), &u).on_nehari() {
        let t = nehari_scale_values(graph, a.values(), &u)?;
        u.iter_mut().for_each(|v| *v *= t);
        flush(&mut u);
    }
    let (u, trace) = descend(&problem, cfg, u, Method::NehariDescent)?;
    Ok((finish(graph, u)?, trace))
}

pub(crate) fn descend(
    problem: &Problem<'_>,
    cfg: &SolverConfig,
    mut u: Vec<f64>,
    method: Method,
) -> Result<(Vec<f64>, SolveTrace)> {
    let graph = problem.graph;
    let sc = cfg.step_control;
    let mut j = energy_value(graph, problem.a, &u);
    if !j.is_finite() {
        return Err(Error::NonFinite {
            iteration: 0,
            detail: format!("initial energy is {j}"),
        });
    }
    let mut records = Vec::new();
    let mut guess = Vec::new();
    let mut step = cfg.step;
    let mut iter = 0;
    let termination = loop {
        let grad = problem.gradient(&u, &mut guess, cfg.cg_tol);
        let (h, l2, log) = pieces(graph, problem.a, &u);
        records.push(IterRecord {
            iter,
            j,
            dual_norm: grad.dual_norm(),
            nehari_defect: h - l2 - log,
            residual_l2: grad.residual_l2,
            step: 0.0,
            cerami: (1.0 + h.sqrt()) * grad.dual_norm(),
        });
        let linf = u.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if grad.residual_l2 <= cfg.grad_tol && grad.residual_linf <= cfg.grad_tol * (1.0 + linf) {
            break Termination::Converged;
        }
        if iter == cfg.max_iters {
            break Termination::MaxIters;
        }
        let accepted = loop {
            if step < sc.min_step {
                break None;
            }
            let mut w: Vec<f64> = u.iter().zip(&grad.g).map(|(u, g)| u - step * g).collect();
            flush(&mut w);
            if let Ok(t) = nehari_scale_values(graph, problem.a, &w) {
                w.iter_mut().for_each(|v| *v *= t);
                flush(&mut w);
                let dj = problem.energy_difference(&u, &w);
                if dj.is_finite() && dj <= -sc.armijo * step * grad.dual_sq {
                    break Some((w, dj));
                }
            }
            step *= sc.shrink;
        };
        let Some((w, dj)) = accepted else {
            break Termination::Stalled;
        };
        records.last_mut().expect("record pushed above").step = step;
        u = w;
        j += dj;
        if !j.is_finite() {
            return Err(Error::NonFinite {
                iteration: iter + 1,
                detail: format!("energy became {j}"),
            });
        }
        step = (step * sc.grow).min(sc.max_step);
        iter += 1;
    };
    let final_cerami = problem.cerami(&u);
    Ok((
        u,
        SolveTrace {
            method,
            records,
            termination,
            final_cerami,
        },
    ))
}
