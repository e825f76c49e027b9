//! The energy functional and its Nehari machinery.
//!
//! ```text
//! J(u)      = 1/2 int (|grad u|^2 + (a + 1) u^2) dmu - 1/2 int u^2 log u^2 dmu
//! J'(u).v   = int (Gamma(u, v) + a u v) dmu - int u v log u^2 dmu
//! R(u)(x)   = -Δu(x) + a(x) u(x) - u(x) log u(x)^2
//! ```
//!
//! Along the fiber `t -> J(t u)` one has
//! `j'(t)/t = ||u||_H^2 - ||u||_2^2 - int u^2 log u^2 - log t^2 ||u||_2^2`,
//! which is strictly decreasing and vanishes at
//! `t_u = exp[(||u||_H^2 - ||u||_2^2 - int u^2 log u^2) / (2 ||u||_2^2)]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::numeric::{self, log_sq};
use crate::spaces::{h_norm_sq_values, log_energy_values, Potential};

/// Relative tolerance for membership in the Nehari set:
/// `|J'(u).u| <= NEHARI_TOL * ||u||_H^2`.
pub const NEHARI_TOL: f64 = 1e-10;

/// Number of grid points in the fiber audit.
pub const FIBER_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    #[serde(rename = "J")]
    pub j: f64,
    pub h_norm_sq: f64,
    pub l2_sq: f64,
    /// `int u^2 log u^2 dmu` (positive minus negative part).
    pub log_energy: f64,
    /// `J'(u).u`.
    pub nehari_defect: f64,
    pub residual_linf: f64,
    /// `(sum over interior x of mu(x) R(x)^2)^{1/2}`.
    pub residual_l2: f64,
}

impl EnergyReport {
    /// `|J - nehari_defect/2 - l2_sq/2|`, which vanishes identically.
    pub fn identity_gap(&self) -> f64 {
        (self.j - 0.5 * self.nehari_defect - 0.5 * self.l2_sq).abs()
    }

    pub fn on_nehari(&self) -> bool {
        self.nehari_defect.abs() <= NEHARI_TOL * self.h_norm_sq
    }
}

fn check(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<()> {
    if u.len() != graph.len() {
        return Err(Error::Dimension {
            expected: graph.len(),
            found: u.len(),
        });
    }
    if !u.belongs_to(graph) || !a.belongs_to(graph) {
        return Err(Error::GraphMismatch);
    }
    Ok(())
}

/// Energy pieces `(h_norm_sq, l2_sq, log_energy)`.
pub(crate) fn pieces(graph: &WeightedGraph, a: &[f64], u: &[f64]) -> (f64, f64, f64) {
    let h = h_norm_sq_values(graph, a, u);
    let l2 = numeric::sum(graph.measure().iter().zip(u).map(|(m, v)| m * v * v));
    let (pos, neg) = log_energy_values(graph, u);
    (h, l2, pos - neg)
}

pub(crate) fn energy_value(graph: &WeightedGraph, a: &[f64], u: &[f64]) -> f64 {
    let (h, _, log) = pieces(graph, a, u);
    0.5 * h - 0.5 * log
}

/// Pointwise residual `R(u)`, zero at boundary vertices.
pub(crate) fn residual_values(graph: &WeightedGraph, a: &[f64], u: &[f64]) -> Vec<f64> {
    let lap = graph.laplacian_values(u);
    (0..graph.len())
        .map(|x| {
            if graph.is_boundary(x) {
                0.0
            } else {
                -lap[x] + a[x] * u[x] - u[x] * log_sq(u[x])
            }
        })
        .collect()
}

pub(crate) fn residual_l2_values(graph: &WeightedGraph, r: &[f64]) -> f64 {
    numeric::sum(graph.measure().iter().zip(r).map(|(m, r)| m * r * r)).sqrt()
}

pub(crate) fn report_values(graph: &WeightedGraph, a: &[f64], u: &[f64]) -> EnergyReport {
    let (h, l2, log) = pieces(graph, a, u);
    let r = residual_values(graph, a, u);
    let report = EnergyReport {
        j: 0.5 * h - 0.5 * log,
        h_norm_sq: h,
        l2_sq: l2,
        log_energy: log,
        nehari_defect: h - l2 - log,
        residual_linf: r.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        residual_l2: residual_l2_values(graph, &r),
    };
    debug_assert!(report.identity_gap() <= 1e-10 * (h + log.abs() + l2).max(f64::MIN_POSITIVE));
    report
}

/// Full energy report for `u`.
pub fn energy(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<EnergyReport> {
    check(graph, a, u)?;
    Ok(report_values(graph, a.values(), u.values()))
}

/// `J(u)` alone.
pub fn functional(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<f64> {
    check(graph, a, u)?;
    Ok(energy_value(graph, a.values(), u.values()))
}

pub(crate) fn derivative_values(graph: &WeightedGraph, a: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let local = numeric::sum(
        graph
            .measure()
            .iter()
            .zip(a)
            .zip(u.iter().zip(v))
            .map(|((m, a), (u, v))| m * (a * u * v - u * v * log_sq(*u))),
    );
    graph.dirichlet_values(u, v) + local
}

/// `J'(u).v`.
pub fn derivative(
    graph: &WeightedGraph,
    a: &Potential,
    u: &VertexFunction,
    v: &VertexFunction,
) -> Result<f64> {
    check(graph, a, u)?;
    check(graph, a, v)?;
    Ok(derivative_values(graph, a.values(), u.values(), v.values()))
}

/// Pointwise residual of the equation; zero at boundary vertices.
pub fn residual(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<VertexFunction> {
    check(graph, a, u)?;
    VertexFunction::new(graph, residual_values(graph, a.values(), u.values()))
}

/// Closed-form Nehari scale `t_u` from the energy pieces.
pub(crate) fn nehari_scale_values(graph: &WeightedGraph, a: &[f64], u: &[f64]) -> Result<f64> {
    let (h, l2, log) = pieces(graph, a, u);
    if l2 == 0.0 {
        return Err(Error::ZeroFunction("the Nehari projection"));
    }
    let t = ((h - l2 - log) / (2.0 * l2)).exp();
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::NonFinite {
            iteration: 0,
            detail: format!("Nehari scale overflows (h = {h:e}, l2 = {l2:e}, log = {log:e})"),
        });
    }
    Ok(t)
}

/// `t_u` without the fiber audit.
pub fn nehari_scale(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<f64> {
    check(graph, a, u)?;
    nehari_scale_values(graph, a.values(), u.values())
}

/// `j(t) = J(t u)` from the pieces of `u`.
pub fn fiber_value(h: f64, l2: f64, log: f64, t: f64) -> f64 {
    let t2 = t * t;
    0.5 * t2 * (h - log - t2.ln() * l2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberReport {
    pub t_u: f64,
    /// `J(t_u u)`.
    pub j_at_t: f64,
    /// `(t, j'(t)/t)` on a log grid over `[t_u/100, 100 t_u]`, with `j'(t) = J'(t u).u`.
    pub slope_samples: Vec<(f64, f64)>,
    /// `(t, J(t u))` on the same grid.
    pub energy_samples: Vec<(f64, f64)>,
}

impl FiberReport {
    pub fn slopes_decreasing(&self) -> bool {
        self.slope_samples.windows(2).all(|w| w[1].1 < w[0].1)
    }

    /// Whether `J(t_u u)` dominates every sampled fiber value, allowing
    /// `slack` relative to `|J(t_u u)|`.
    pub fn is_fiber_max(&self, slack: f64) -> bool {
        let tol = slack * self.j_at_t.abs();
        self.energy_samples.iter().all(|(_, j)| *j <= self.j_at_t + tol)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,slope,J\n");
        for ((t, s), (_, j)) in self.slope_samples.iter().zip(&self.energy_samples) {
            out.push_str(&format!("{t:e},{s:e},{j:e}\n"));
        }
        out
    }
}

/// Projects `u` onto the Nehari set along its fiber and audits the fiber.
pub fn nehari_project(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<FiberReport> {
    check(graph, a, u)?;
    let t_u = nehari_scale_values(graph, a.values(), u.values())?;
    let values = u.values();
    let scaled = |t: f64| -> Vec<f64> { values.iter().map(|v| t * v).collect() };
    let j_at_t = energy_value(graph, a.values(), &scaled(t_u));
    let mut slope_samples = Vec::with_capacity(FIBER_SAMPLES);
    let mut energy_samples = Vec::with_capacity(FIBER_SAMPLES);
    for k in 0..FIBER_SAMPLES {
        let t = t_u * 10f64.powf(-2.0 + 4.0 * k as f64 / (FIBER_SAMPLES - 1) as f64);
        let tu = scaled(t);
        slope_samples.push((t, derivative_values(graph, a.values(), &tu, values) / t));
        energy_samples.push((t, energy_value(graph, a.values(), &tu)));
    }
    Ok(FiberReport {
        t_u,
        j_at_t,
        slope_samples,
        energy_samples,
    })
}

/// `t_u u`.
pub fn project(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<VertexFunction> {
    Ok(u.scaled(nehari_scale(graph, a, u)?))
}

/// Certifies `d_hat = J(u_star)` against a pool of trial functions: each
/// nonzero trial is projected to the Nehari set and `d_hat <= J(t_v v) + tol`
/// is required. Zero trials are skipped.
pub fn nehari_level_certificate(
    graph: &WeightedGraph,
    a: &Potential,
    u_star: &VertexFunction,
    trial_pool: &[VertexFunction],
    tol: f64,
) -> Result<f64> {
    let report = energy(graph, a, u_star)?;
    if !report.on_nehari() {
        return Err(Error::NotOnNehari {
            defect: report.nehari_defect.abs(),
            tolerance: NEHARI_TOL * report.h_norm_sq,
        });
    }
    for v in trial_pool {
        check(graph, a, v)?;
    }
    let d_hat = report.j;
    let worst = trial_pool
        .par_iter()
        .filter(|v| v.values().iter().any(|x| *x != 0.0))
        .map(|v| -> Result<f64> {
            let t = nehari_scale_values(graph, a.values(), v.values())?;
            let tv: Vec<f64> = v.values().iter().map(|x| t * x).collect();
            Ok(energy_value(graph, a.values(), &tv))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if d_hat > worst + tol {
        return Err(Error::CertificateFailed {
            level: d_hat,
            trial: worst,
            tolerance: tol,
        });
    }
    Ok(d_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphFamilySpec;

    #[test]
    fn zero_function_has_zero_energy() {
        let g = GraphFamilySpec::path(4).generate().unwrap();
        let a = Potential::constant(&g, -0.5).unwrap();
        let r = energy(&g, &a, &VertexFunction::zeros(&g)).unwrap();
        assert_eq!(r.j, 0.0);
        assert_eq!(r.residual_linf, 0.0);
        assert_eq!(r.residual_l2, 0.0);
        assert!(matches!(
            nehari_project(&g, &a, &VertexFunction::zeros(&g)),
            Err(Error::ZeroFunction(_))
        ));
    }

    #[test]
    fn single_vertex_closed_form() {
        for (m, alpha) in [(1.0, -0.5), (2.5, 0.3), (0.4, -0.9)] {
            let g = WeightedGraph::single_vertex(m).unwrap();
            let a = Potential::constant(&g, alpha).unwrap();
            let u = VertexFunction::constant(&g, (alpha / 2.0f64).exp());
            let r = energy(&g, &a, &u).unwrap();
            assert!(r.residual_linf < 1e-15);
            let d = m * alpha.exp() / 2.0;
            assert!((r.j - d).abs() < 1e-15 * d.max(1.0));
            for c in [0.01, 0.7, 3.0, 40.0] {
                let f = nehari_project(&g, &a, &VertexFunction::constant(&g, c)).unwrap();
                assert!((f.t_u * c - (alpha / 2.0f64).exp()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn derivative_at_indicator_is_weighted_residual() {
        let g = "random_tree:12,3,w=0.5..2,mu=0.5..2"
            .parse::<GraphFamilySpec>()
            .unwrap()
            .generate()
            .unwrap();
        let a = Potential::from_values(&g, (0..12).map(|x| 0.1 * x as f64 - 0.5).collect()).unwrap();
        let u = VertexFunction::from_fn(&g, |x| 0.3 + 0.1 * (x as f64).sin());
        let r = residual(&g, &a, &u).unwrap();
        for x in 0..g.len() {
            let d = derivative(&g, &a, &u, &VertexFunction::indicator(&g, x)).unwrap();
            assert!((d - g.mu(x) * r.get(x)).abs() <= 1e-13 * (1.0 + d.abs()));
        }
        let self_dir = derivative(&g, &a, &u, &u).unwrap();
        let rep = energy(&g, &a, &u).unwrap();
        assert!((self_dir - (rep.h_norm_sq - rep.l2_sq - rep.log_energy)).abs() < 1e-13);
    }

    #[test]
    fn projection_lands_on_nehari_and_is_fiber_max() {
        let g = GraphFamilySpec::cycle(7).generate().unwrap();
        let a = Potential::constant(&g, -0.3).unwrap();
        let u = VertexFunction::from_fn(&g, |x| 1.0 + (x as f64 * 0.9).cos());
        let f = nehari_project(&g, &a, &u).unwrap();
        assert!(f.slopes_decreasing());
        assert!(f.is_fiber_max(1e-12));
        let p = u.scaled(f.t_u);
        let r = energy(&g, &a, &p).unwrap();
        assert!(r.on_nehari());
        assert!((r.j - 0.5 * r.l2_sq).abs() <= 1e-12 * r.j);
        assert!((nehari_scale(&g, &a, &p).unwrap() - 1.0).abs() < 1e-12);
        // homogeneity t_{s u} = t_u / s
        let s = 3.7;
        let ts = nehari_scale(&g, &a, &u.scaled(s)).unwrap();
        assert!((ts - f.t_u / s).abs() < 1e-12 * f.t_u);
        assert!(f.to_csv().lines().count() == FIBER_SAMPLES + 1);
    }

    #[test]
    fn fiber_expansion_matches_direct_evaluation() {
        let g = GraphFamilySpec::path(5).generate().unwrap();
        let a = Potential::constant(&g, 0.2).unwrap();
        let u = VertexFunction::new(&g, vec![0.2, 0.9, 1.4, 0.4, 0.0]).unwrap();
        let r = energy(&g, &a, &u).unwrap();
        for t in [0.1, 0.5, 2.0, 9.0] {
            let direct = functional(&g, &a, &u.scaled(t)).unwrap();
            let expanded = fiber_value(r.h_norm_sq, r.l2_sq, r.log_energy, t);
            assert!((direct - expanded).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn certificate_refuses_off_manifold_points() {
        let g = WeightedGraph::single_vertex(1.0).unwrap();
        let a = Potential::constant(&g, -0.5).unwrap();
        let off = VertexFunction::constant(&g, 2.0);
        assert!(matches!(
            nehari_level_certificate(&g, &a, &off, &[], 1e-12),
            Err(Error::NotOnNehari { .. })
        ));
        let on = VertexFunction::constant(&g, (-0.25f64).exp());
        let pool: Vec<_> = [0.1, 1.0, 5.0].iter().map(|c| VertexFunction::constant(&g, *c)).collect();
        let d = nehari_level_certificate(&g, &a, &on, &pool, 1e-12).unwrap();
        assert!((d - (-0.5f64).exp() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn certificate_rejects_non_minimal_state() {
        // the constant state on a cycle is a saddle; a localized trial beats it
        let g = GraphFamilySpec::cycle(8).generate().unwrap();
        let a = Potential::constant(&g, -0.5).unwrap();
        let c = VertexFunction::constant(&g, (-0.25f64).exp());
        let bump = VertexFunction::indicator(&g, 0);
        assert!(matches!(
            nehari_level_certificate(&g, &a, &c, &[bump], 1e-12),
            Err(Error::CertificateFailed { .. })
        ));
    }
}
