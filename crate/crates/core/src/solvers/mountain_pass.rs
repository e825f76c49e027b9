use serde::{Deserialize, Serialize};

use super::config::{Method, SolverConfig};
use super::geometry::{geometry_check, GeometryReport};
use super::nehari::descend;
use super::trace::{IterRecord, SolveTrace, Termination};
use super::{finish, flush, Problem};
use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::spaces::Potential;
use crate::variational::{energy_value, nehari_scale_values, report_values};

/// Golden-section iterations used to refine the path maximum on a segment.
const GOLDEN_ITERS: usize = 80;

/// Endpoint re-seeds allowed when the path maximum sits at the endpoint.
const MAX_RESEEDS: usize = 60;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MountainPassOutcome {
    /// Final path maximizer after polishing by Nehari descent.
    pub u: VertexFunction,
    /// One record per sweep, taken at the refined path maximizer.
    pub trace: SolveTrace,
    /// Path maximum at the last sweep.
    pub c_hat: f64,
    pub geometry: GeometryReport,
    pub polish: SolveTrace,
    pub reseeds: usize,
}

/// Mountain-pass solver deforming a discrete path from `0` to a point of
/// negative energy.
///
/// The path `0 = p_0, ..., p_k = e` (`k + 1 = path_points` nodes) starts as the
/// straight segment to the endpoint found by [`geometry_check`]. Each sweep
/// locates the highest node (lowest index on ties), refines the path maximum
/// by golden-section search on its two adjacent segments, takes a
/// backtracking energy-space gradient step at the maximizer and re-lays the
/// path as the segment from `0` through the moved point to an endpoint with
/// negative energy. `c_hat` is the refined path maximum of the last sweep.
pub fn mountain_pass(
    graph: &WeightedGraph,
    a: &Potential,
    cfg: &SolverConfig,
) -> Result<MountainPassOutcome> {
    cfg.validate()?;
    let problem = Problem::new(graph, a)?;
    let av = a.values();
    let probe = cfg.init.realize(graph, cfg.seed)?;
    let geometry = geometry_check(graph, a, &probe, cfg.seed)?;
    let k = cfg.path_points - 1;
    let mut path = segment(geometry.e.values(), k);

    let sc = cfg.step_control;
    let mut step = cfg.step;
    let mut records = Vec::new();
    let mut guess = Vec::new();
    let mut reseeds = 0;
    let mut sweep = 0;
    let mut c_hat;
    let mut top;
    let termination = loop {
        let values: Vec<f64> = path.iter().map(|p| energy_value(graph, av, p)).collect();
        let mut i_max = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[i_max] {
                i_max = i;
            }
        }
        if i_max == k {
            if reseeds == MAX_RESEEDS {
                return Err(Error::GeometryNotDetected(
                    "path maximum stays at the endpoint after re-seeding".into(),
                ));
            }
            let far: Vec<f64> = path[k].iter().map(|x| 2.0 * x).collect();
            path = segment(&far, k);
            reseeds += 1;
            continue;
        }
        if !(values[i_max] > 0.0) {
            return Err(Error::GeometryNotDetected("path maximum is not positive".into()));
        }
        let (m, cm) = refine(graph, av, &path, i_max);
        c_hat = cm;
        if !c_hat.is_finite() {
            return Err(Error::NonFinite {
                iteration: sweep,
                detail: format!("path maximum is {c_hat}"),
            });
        }
        let grad = problem.gradient(&m, &mut guess, cfg.cg_tol);
        let rep = report_values(graph, av, &m);
        records.push(IterRecord {
            iter: sweep,
            j: c_hat,
            dual_norm: grad.dual_norm(),
            nehari_defect: rep.nehari_defect,
            residual_l2: grad.residual_l2,
            step: 0.0,
            cerami: (1.0 + rep.h_norm_sq.sqrt()) * grad.dual_norm(),
        });
        top = m;
        if grad.residual_l2 <= cfg.path_tol {
            break Termination::Converged;
        }
        if sweep == cfg.max_iters {
            break Termination::MaxIters;
        }
        let accepted = loop {
            if step < sc.min_step {
                break None;
            }
            let mut w: Vec<f64> = top.iter().zip(&grad.g).map(|(u, g)| u - step * g).collect();
            flush(&mut w);
            let dj = problem.energy_difference(&top, &w);
            if dj.is_finite() && dj <= -sc.armijo * step * grad.dual_sq && w.iter().any(|v| *v != 0.0) {
                break Some(w);
            }
            step *= sc.shrink;
        };
        let Some(w) = accepted else {
            break Termination::Stalled;
        };
        records.last_mut().expect("record pushed above").step = step;
        path = segment(&through(graph, av, &w, k)?, k);
        step = (step * sc.grow).min(sc.max_step);
        sweep += 1;
    };

    let mut start = top;
    if !report_values(graph, av, &start).on_nehari() {
        let t = nehari_scale_values(graph, av, &start)?;
        start.iter_mut().for_each(|v| *v *= t);
        flush(&mut start);
    }
    let (u, polish) = descend(&problem, cfg, start, Method::NehariDescent)?;
    let trace = SolveTrace {
        method: Method::MountainPass,
        records,
        termination,
        final_cerami: polish.final_cerami,
    };
    Ok(MountainPassOutcome {
        u: finish(graph, u)?,
        trace,
        c_hat,
        geometry,
        polish,
        reseeds,
    })
}

/// `k + 1` equally spaced nodes on the segment from `0` to `end`.
fn segment(end: &[f64], k: usize) -> Vec<Vec<f64>> {
    (0..=k)
        .map(|i| end.iter().map(|x| x * i as f64 / k as f64).collect())
        .collect()
}

/// Endpoint `T w` with `J(T w) < 0`, taking `T = k / j` for the largest
/// `j <= k / 2` that works so `w` is a path node, and doubling beyond `T = k`.
fn through(graph: &WeightedGraph, a: &[f64], w: &[f64], k: usize) -> Result<Vec<f64>> {
    let scaled = |t: f64| -> Vec<f64> { w.iter().map(|x| t * x).collect() };
    for j in (1..=k / 2).rev() {
        let e = scaled(k as f64 / j as f64);
        if energy_value(graph, a, &e) < 0.0 {
            return Ok(e);
        }
    }
    let mut t = 2.0 * k as f64;
    for _ in 0..MAX_RESEEDS {
        let e = scaled(t);
        if energy_value(graph, a, &e) < 0.0 {
            return Ok(e);
        }
        t *= 2.0;
    }
    Err(Error::GeometryNotDetected(
        "no endpoint with negative energy along the moved maximizer".into(),
    ))
}

fn lerp(p: &[f64], q: &[f64], tau: f64) -> Vec<f64> {
    p.iter().zip(q).map(|(p, q)| p + tau * (q - p)).collect()
}

/// Maximum of `J` over the segments adjacent to node `i` (`0 < i < k`).
fn refine(graph: &WeightedGraph, a: &[f64], path: &[Vec<f64>], i: usize) -> (Vec<f64>, f64) {
    let mut best = (path[i].clone(), energy_value(graph, a, &path[i]));
    for (p, q) in [(&path[i - 1], &path[i]), (&path[i], &path[i + 1])] {
        let f = |tau: f64| energy_value(graph, a, &lerp(p, q, tau));
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..GOLDEN_ITERS {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = f(x2);
            }
        }
        let (tau, val) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
        if val > best.1 {
            best = (lerp(p, q, tau), val);
        }
    }
    best
}
