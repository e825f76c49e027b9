//! Potentials, norms and embedding inequalities on finite truncations.
//!
//! The energy space carries the inner product
//! `<u, v>_H = int (Gamma(u, v) + (a + 1) u v) dmu`. A [`Potential`] records
//! its declared lower bound `a0 > -1` and class (`A2`: every sublevel set
//! `{a <= M}` has finite volume; `A2prime`: `{a <= M0}` has finite volume and
//! `1/a` is integrable off it). The declaration is verified against the
//! values on the truncation at construction.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphId, VertexFunction, WeightedGraph};
use crate::numeric::{self, s2_log_s2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialClass {
    A2,
    A2Prime,
}

/// Potential `a(x)` with its declared class metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    graph: GraphId,
    values: Vec<f64>,
    a0: f64,
    class: PotentialClass,
    m0: Option<f64>,
}

impl Potential {
    /// Validates the lower-bound hypothesis (A1): `a0 > -1` and `a(x) >= a0`
    /// for every vertex. Class `A2Prime` additionally requires `m0 > 0`.
    pub fn new(
        graph: &WeightedGraph,
        values: Vec<f64>,
        a0: f64,
        class: PotentialClass,
        m0: Option<f64>,
    ) -> Result<Self> {
        if values.len() != graph.len() {
            return Err(Error::Dimension {
                expected: graph.len(),
                found: values.len(),
            });
        }
        if !(a0.is_finite() && a0 > -1.0) {
            return Err(Error::PotentialClass(format!(
                "lower-bound hypothesis (A1) violated: declared a0 = {a0} must exceed -1"
            )));
        }
        if let Some((x, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= a0))
        {
            return Err(Error::PotentialClass(format!(
                "lower-bound hypothesis (A1) violated: a({x}) = {v} is below declared a0 = {a0}"
            )));
        }
        if class == PotentialClass::A2Prime && !matches!(m0, Some(m) if m > 0.0) {
            return Err(Error::PotentialClass(
                "class A2prime needs a threshold M0 > 0".into(),
            ));
        }
        Ok(Self {
            graph: graph.id(),
            values,
            a0,
            class,
            m0,
        })
    }

    /// Constant potential `a = c`, declared with `a0 = min(c, 0)`, class `A2`.
    pub fn constant(graph: &WeightedGraph, c: f64) -> Result<Self> {
        Self::new(graph, vec![c; graph.len()], c.min(0.0), PotentialClass::A2, None)
    }

    /// Potential with `a0 = min(inf a, 0)` and class `A2`.
    pub fn from_values(graph: &WeightedGraph, values: Vec<f64>) -> Result<Self> {
        let a0 = values.iter().copied().fold(0.0, f64::min);
        Self::new(graph, values, a0, PotentialClass::A2, None)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn class(&self) -> PotentialClass {
        self.class
    }

    pub fn m0(&self) -> Option<f64> {
        self.m0
    }

    pub fn graph_id(&self) -> GraphId {
        self.graph
    }

    pub fn belongs_to(&self, graph: &WeightedGraph) -> bool {
        self.graph == graph.id() && self.values.len() == graph.len()
    }

    /// `Vol(D_M) = sum_{a(x) <= M} mu(x)` on the truncation.
    pub fn sublevel_volume(&self, graph: &WeightedGraph, level: f64) -> f64 {
        numeric::sum(
            self.values
                .iter()
                .zip(graph.measure())
                .filter(|(a, _)| **a <= level)
                .map(|(_, m)| *m),
        )
    }

    /// Partial sum of `mu(x)/a(x)` over `{a > M0}` on the truncation.
    pub fn reciprocal_partial_sum(&self, graph: &WeightedGraph) -> Option<f64> {
        let m0 = self.m0?;
        Some(numeric::sum(
            self.values
                .iter()
                .zip(graph.measure())
                .filter(|(a, _)| **a > m0)
                .map(|(a, m)| m / a),
        ))
    }

    /// Same values re-tagged for a graph with the same vertex count.
    pub fn rebind(&self, graph: &WeightedGraph) -> Result<Self> {
        Self::new(graph, self.values.clone(), self.a0, self.class, self.m0)
    }
}

fn check_pair(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<()> {
    if !u.belongs_to(graph) {
        return Err(if u.len() != graph.len() {
            Error::Dimension {
                expected: graph.len(),
                found: u.len(),
            }
        } else {
            Error::GraphMismatch
        });
    }
    if !a.belongs_to(graph) {
        return Err(Error::GraphMismatch);
    }
    Ok(())
}

/// `||u||_2^2 = int u^2 dmu`.
pub fn l2_sq(graph: &WeightedGraph, u: &VertexFunction) -> Result<f64> {
    graph.integrate(&u.map(|v| v * v))
}

/// `||u||_p` for `p >= 1`.
pub fn lp_norm(graph: &WeightedGraph, u: &VertexFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("L^p norm needs p >= 1, got {p}")));
    }
    Ok(graph.integrate(&u.map(|v| v.abs().powf(p)))?.powf(1.0 / p))
}

pub(crate) fn h_norm_sq_values(graph: &WeightedGraph, a: &[f64], u: &[f64]) -> f64 {
    let mass = numeric::sum(
        graph
            .measure()
            .iter()
            .zip(a)
            .zip(u)
            .map(|((m, a), u)| m * (a + 1.0) * u * u),
    );
    graph.dirichlet_values(u, u) + mass
}

pub(crate) fn h_inner_values(graph: &WeightedGraph, a: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let mass = numeric::sum(
        graph
            .measure()
            .iter()
            .zip(a)
            .zip(u.iter().zip(v))
            .map(|((m, a), (u, v))| m * (a + 1.0) * u * v),
    );
    graph.dirichlet_values(u, v) + mass
}

/// `||u||_H^2 = int (|grad u|^2 + (a + 1) u^2) dmu`.
pub fn h_norm_sq(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<f64> {
    check_pair(graph, a, u)?;
    Ok(h_norm_sq_values(graph, a.values(), u.values()))
}

/// `<u, v>_H`.
pub fn h_inner(
    graph: &WeightedGraph,
    a: &Potential,
    u: &VertexFunction,
    v: &VertexFunction,
) -> Result<f64> {
    check_pair(graph, a, u)?;
    check_pair(graph, a, v)?;
    Ok(h_inner_values(graph, a.values(), u.values(), v.values()))
}

pub(crate) fn log_energy_values(graph: &WeightedGraph, u: &[f64]) -> (f64, f64) {
    let mut pos = numeric::Accumulator::new();
    let mut neg = numeric::Accumulator::new();
    for (m, &v) in graph.measure().iter().zip(u) {
        let t = m * s2_log_s2(v);
        if t > 0.0 {
            pos.add(t);
        } else {
            neg.add(-t);
        }
    }
    (pos.value(), neg.value())
}

/// Sign-split `(int (u^2 log u^2)^+ dmu, int (u^2 log u^2)^- dmu)`, with `0 log 0 = 0`.
pub fn log_energy(graph: &WeightedGraph, u: &VertexFunction) -> Result<(f64, f64)> {
    if !u.belongs_to(graph) {
        return Err(Error::GraphMismatch);
    }
    Ok(log_energy_values(graph, u.values()))
}

/// Norms of a function on a truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2_sq: f64,
    pub h_norm_sq: f64,
    /// `(p, ||u||_p)` for each requested exponent.
    pub lp: Vec<(f64, f64)>,
    pub linf: f64,
    pub log_energy_pos: f64,
    pub log_energy_neg: f64,
}

impl NormReport {
    pub fn log_energy(&self) -> f64 {
        self.log_energy_pos - self.log_energy_neg
    }
}

pub fn norm_report(
    graph: &WeightedGraph,
    a: &Potential,
    u: &VertexFunction,
    exponents: &[f64],
) -> Result<NormReport> {
    check_pair(graph, a, u)?;
    let (pos, neg) = log_energy_values(graph, u.values());
    Ok(NormReport {
        l2_sq: l2_sq(graph, u)?,
        h_norm_sq: h_norm_sq_values(graph, a.values(), u.values()),
        lp: exponents
            .iter()
            .map(|&p| lp_norm(graph, u, p).map(|n| (p, n)))
            .collect::<Result<_>>()?,
        linf: u.linf(),
        log_energy_pos: pos,
        log_energy_neg: neg,
    })
}

/// Whether `||u||_inf^2 (1 + a0) mu_min <= ||u||_H^2` holds for `u`.
pub fn linf_embedding_check(graph: &WeightedGraph, a: &Potential, u: &VertexFunction) -> Result<bool> {
    check_pair(graph, a, u)?;
    if u.is_zero() {
        return Err(Error::ZeroFunction("the embedding ratio"));
    }
    let lhs = u.linf().powi(2) * (1.0 + a.a0()) * graph.mu_min();
    // relative slack absorbs rounding in the equality case
    Ok(lhs <= h_norm_sq_values(graph, a.values(), u.values()) * (1.0 + 1e-12))
}

/// Constant `C_q` with `int (u^2 log u^2)^+ dmu <= C_q ||u||_H^q` for every `u`, `q > 2`.
///
/// Uses `(s^2 log s^2)^+ <= 2/(e (q-2)) |s|^q`, `||u||_inf^2 <= ||u||_H^2 / ((1+a0) mu_min)`
/// and `||u||_2^2 <= ||u||_H^2 / (1+a0)`.
pub fn log_growth_constant(q: f64, a0: f64, mu_min: f64) -> f64 {
    assert!(q > 2.0, "log growth constant needs q > 2");
    let pointwise = 2.0 / (std::f64::consts::E * (q - 2.0));
    pointwise / ((1.0 + a0).powf(q / 2.0) * mu_min.powf((q - 2.0) / 2.0))
}

/// Largest observed `int (u^2 log u^2)^+ / ||u||_H^q` over random directions at
/// random scales. A diagnostic that must stay below [`log_growth_constant`].
///
/// Directions cycle through full Gaussian vectors, vertex indicators and
/// sparse Gaussian supports, since the ratio is largest on localized functions.
pub fn calibrate_log_growth(
    graph: &WeightedGraph,
    a: &Potential,
    q: f64,
    samples: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior: Vec<usize> = graph.interior_vertices().collect();
    if interior.is_empty() {
        return 0.0;
    }
    let mut best: f64 = 0.0;
    let mut u = vec![0.0; graph.len()];
    for k in 0..samples {
        u.iter_mut().for_each(|v| *v = 0.0);
        match k % 3 {
            0 => {
                for &x in &interior {
                    u[x] = StandardNormal.sample(&mut rng);
                }
            }
            1 => u[interior[rng.random_range(0..interior.len())]] = 1.0,
            _ => {
                for _ in 0..rng.random_range(1..=4) {
                    u[interior[rng.random_range(0..interior.len())]] = StandardNormal.sample(&mut rng);
                }
            }
        }
        // spread scales over [1e-2, 1e3] where the positive part is active
        let scale = 10f64.powf(-2.0 + 5.0 * rng.random::<f64>());
        let n = h_norm_sq_values(graph, a.values(), &u).sqrt();
        if n == 0.0 {
            continue;
        }
        let w: Vec<f64> = u.iter().map(|v| v * scale / n).collect();
        let (pos, _) = log_energy_values(graph, &w);
        best = best.max(pos / scale.powf(q));
    }
    best
}

/// Potential families instantiated on a truncation.
///
/// String forms: `constant:c`, `coercive:exponent,shift[,center]`,
/// `sign_changing:exponent,shift,amplitude[,center]`,
/// `reciprocal_summable[:center][,min_exponent=k][,m0=M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PotentialFamilySpec {
    Constant(f64),
    /// `a(x) = d(x, center)^exponent + shift`.
    Coercive { exponent: f64, shift: f64, center: usize },
    /// `a(x) = d^exponent + shift + amplitude (-1)^d`; changes sign near the center.
    SignChanging {
        exponent: f64,
        shift: f64,
        amplitude: f64,
        center: usize,
    },
    /// `a(x) = d^p` with `a(center) = 0`, the smallest integer `p >= min_exponent`
    /// whose shell sums of `mu/a` pass the summable-tail test.
    ReciprocalSummable {
        center: usize,
        min_exponent: u32,
        m0: f64,
    },
}

/// Largest exponent tried by the reciprocal-summable generator.
pub const MAX_RECIPROCAL_EXPONENT: u32 = 8;

/// Outcome of the summable-tail test for `sum mu/a` off `D_{M0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReciprocalTail {
    pub exponent: u32,
    pub partial_sum: f64,
    /// Fitted log-log slope of the per-shell sums.
    pub shell_slope: f64,
    /// Power-law tail bound `C R^{1+slope} / (-1 - slope)` beyond the truncation.
    pub tail_bound: f64,
    pub d_m0_volume: f64,
}

/// Shell slopes must be at most this to count as summable.
pub const SUMMABLE_SLOPE: f64 = -1.2;

fn distances(graph: &WeightedGraph, center: usize) -> Result<Vec<usize>> {
    if center >= graph.len() {
        return Err(Error::UnknownVertex(center.to_string()));
    }
    graph
        .distances_from(center)
        .into_iter()
        .enumerate()
        .map(|(x, d)| {
            d.ok_or_else(|| {
                Error::InvalidPotential(format!("vertex {x} is unreachable from center {center}"))
            })
        })
        .collect()
}

/// Least-squares slope of `ln s_r` against `ln r` over the outer half of the shells.
pub(crate) fn shell_tail(shells: &[f64]) -> Option<(f64, f64)> {
    let radius = shells.len().checked_sub(1)?;
    let points: Vec<(f64, f64)> = (radius.div_ceil(2).max(1)..=radius)
        .filter(|&r| shells[r] > 0.0)
        .map(|r| ((r as f64).ln(), shells[r].ln()))
        .collect();
    if points.len() < 4 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    // envelope constant: s_r <= c r^slope on the fitted shells
    let c = points
        .iter()
        .map(|(lr, ls)| (ls - slope * lr).exp())
        .fold(0.0, f64::max);
    let r = radius as f64;
    let tail = if slope < -1.0 {
        c * r.powf(1.0 + slope) / (-1.0 - slope)
    } else {
        f64::INFINITY
    };
    Some((slope, tail))
}

/// Runs the summable-tail test for `a(x) = d^p` (with `a(center) = 0`).
pub fn reciprocal_tail(
    graph: &WeightedGraph,
    center: usize,
    exponent: u32,
    m0: f64,
) -> Result<ReciprocalTail> {
    let dist = distances(graph, center)?;
    let radius = dist.iter().copied().max().unwrap_or(0);
    let a: Vec<f64> = dist.iter().map(|&d| (d as f64).powi(exponent as i32)).collect();
    let mut shells = vec![0.0; radius + 1];
    let mut d_m0 = 0.0;
    for x in 0..graph.len() {
        if a[x] > m0 {
            shells[dist[x]] += graph.mu(x) / a[x];
        } else {
            d_m0 += graph.mu(x);
        }
    }
    let partial_sum = numeric::sum(shells.iter().copied());
    let (slope, tail_bound) = shell_tail(&shells).ok_or_else(|| {
        Error::InvalidPotential(format!(
            "truncation of radius {radius} is too small to test the reciprocal tail"
        ))
    })?;
    Ok(ReciprocalTail {
        exponent,
        partial_sum,
        shell_slope: slope,
        tail_bound,
        d_m0_volume: d_m0,
    })
}

/// Instantiates a potential family on `graph` and verifies its class invariants.
pub fn potential_generate(spec: &PotentialFamilySpec, graph: &WeightedGraph) -> Result<Potential> {
    match *spec {
        PotentialFamilySpec::Constant(c) => {
            if !(c > -1.0) {
                return Err(Error::PotentialClass(format!(
                    "lower-bound hypothesis (A1) violated: constant potential {c} must exceed -1"
                )));
            }
            Potential::constant(graph, c)
        }
        PotentialFamilySpec::Coercive {
            exponent,
            shift,
            center,
        } => {
            let dist = distances(graph, center)?;
            let values = dist
                .iter()
                .map(|&d| (d as f64).powf(exponent) + shift)
                .collect();
            from_values_checked(graph, values)
        }
        PotentialFamilySpec::SignChanging {
            exponent,
            shift,
            amplitude,
            center,
        } => {
            let dist = distances(graph, center)?;
            let values = dist
                .iter()
                .map(|&d| {
                    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
                    (d as f64).powf(exponent) + shift + amplitude * sign
                })
                .collect();
            from_values_checked(graph, values)
        }
        PotentialFamilySpec::ReciprocalSummable {
            center,
            min_exponent,
            m0,
        } => {
            if !(m0 > 0.0) {
                return Err(Error::InvalidPotential(format!("M0 must be positive, got {m0}")));
            }
            for p in min_exponent.max(1)..=MAX_RECIPROCAL_EXPONENT {
                let tail = reciprocal_tail(graph, center, p, m0)?;
                if tail.shell_slope <= SUMMABLE_SLOPE {
                    let dist = distances(graph, center)?;
                    let values = dist.iter().map(|&d| (d as f64).powi(p as i32)).collect();
                    return Potential::new(graph, values, 0.0, PotentialClass::A2Prime, Some(m0));
                }
            }
            Err(Error::InvalidPotential(format!(
                "no exponent up to {MAX_RECIPROCAL_EXPONENT} makes sum mu/a summable on this graph"
            )))
        }
    }
}

fn from_values_checked(graph: &WeightedGraph, values: Vec<f64>) -> Result<Potential> {
    if let Some((x, v)) = values.iter().enumerate().find(|(_, v)| !(**v > -1.0)) {
        return Err(Error::PotentialClass(format!(
            "lower-bound hypothesis (A1) violated: a({x}) = {v} is not above -1"
        )));
    }
    Potential::from_values(graph, values)
}

impl PotentialFamilySpec {
    /// The exponent the reciprocal-summable generator settles on for `graph`.
    pub fn reciprocal_report(&self, graph: &WeightedGraph) -> Option<Result<ReciprocalTail>> {
        match *self {
            PotentialFamilySpec::ReciprocalSummable {
                center,
                min_exponent,
                m0,
            } => Some((|| {
                for p in min_exponent.max(1)..=MAX_RECIPROCAL_EXPONENT {
                    let tail = reciprocal_tail(graph, center, p, m0)?;
                    if tail.shell_slope <= SUMMABLE_SLOPE {
                        return Ok(tail);
                    }
                }
                Err(Error::InvalidPotential("no summable exponent".into()))
            })()),
            _ => None,
        }
    }
}

impl fmt::Display for PotentialFamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialFamilySpec::Constant(c) => write!(f, "constant:{c}"),
            PotentialFamilySpec::Coercive {
                exponent,
                shift,
                center,
            } => write!(f, "coercive:{exponent},{shift},{center}"),
            PotentialFamilySpec::SignChanging {
                exponent,
                shift,
                amplitude,
                center,
            } => write!(f, "sign_changing:{exponent},{shift},{amplitude},{center}"),
            PotentialFamilySpec::ReciprocalSummable {
                center,
                min_exponent,
                m0,
            } => write!(
                f,
                "reciprocal_summable:{center},min_exponent={min_exponent},m0={m0}"
            ),
        }
    }
}

impl FromStr for PotentialFamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut positional = Vec::new();
        let mut options = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.split_once('=') {
                Some((k, v)) => options.push((k.trim(), v.trim())),
                None => positional.push(item),
            }
        }
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidPotential(format!("'{s}': cannot parse '{t}'")))
        };
        let index = |t: &str| -> Result<usize> {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidPotential(format!("'{s}': '{t}' is not a vertex")))
        };
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if (lo..=hi).contains(&positional.len()) {
                Ok(())
            } else {
                Err(Error::InvalidPotential(format!(
                    "'{s}': expected {lo}..={hi} arguments, found {}",
                    positional.len()
                )))
            }
        };
        let spec = match name {
            "constant" => {
                arity(1, 1)?;
                PotentialFamilySpec::Constant(num(positional[0])?)
            }
            "coercive" => {
                arity(2, 3)?;
                PotentialFamilySpec::Coercive {
                    exponent: num(positional[0])?,
                    shift: num(positional[1])?,
                    center: positional.get(2).map(|t| index(t)).transpose()?.unwrap_or(0),
                }
            }
            "sign_changing" => {
                arity(3, 4)?;
                PotentialFamilySpec::SignChanging {
                    exponent: num(positional[0])?,
                    shift: num(positional[1])?,
                    amplitude: num(positional[2])?,
                    center: positional.get(3).map(|t| index(t)).transpose()?.unwrap_or(0),
                }
            }
            "reciprocal_summable" => {
                arity(0, 1)?;
                let mut min_exponent = 1;
                let mut m0 = 1.0;
                for (k, v) in &options {
                    match *k {
                        "min_exponent" => {
                            min_exponent = v.parse().map_err(|_| {
                                Error::InvalidPotential(format!("bad min_exponent '{v}'"))
                            })?
                        }
                        "m0" => m0 = num(v)?,
                        other => {
                            return Err(Error::InvalidPotential(format!(
                                "unknown potential option '{other}'"
                            )))
                        }
                    }
                }
                PotentialFamilySpec::ReciprocalSummable {
                    center: positional.first().map(|t| index(t)).transpose()?.unwrap_or(0),
                    min_exponent,
                    m0,
                }
            }
            other => {
                return Err(Error::InvalidPotential(format!(
                    "unknown potential family '{other}'"
                )))
            }
        };
        if name != "reciprocal_summable" && !options.is_empty() {
            return Err(Error::InvalidPotential(format!(
                "'{s}': unexpected option '{}'",
                options[0].0
            )));
        }
        Ok(spec)
    }
}

impl TryFrom<String> for PotentialFamilySpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PotentialFamilySpec> for String {
    fn from(spec: PotentialFamilySpec) -> String {
        spec.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, GraphFamilySpec};

    fn two_vertex() -> WeightedGraph {
        WeightedGraph::interior(vec![1.0, 1.0], vec![Edge { x: 0, y: 1, w: 1.0 }]).unwrap()
    }

    #[test]
    fn h_norm_small_cases() {
        let g = two_vertex();
        let a = Potential::constant(&g, 0.0).unwrap();
        let u = VertexFunction::new(&g, vec![0.0, 1.0]).unwrap();
        assert_eq!(h_norm_sq(&g, &a, &u).unwrap(), 2.0);
        assert_eq!(h_norm_sq(&g, &a, &VertexFunction::zeros(&g)).unwrap(), 0.0);

        let g1 = WeightedGraph::single_vertex(1.0).unwrap();
        let a1 = Potential::constant(&g1, -0.3).unwrap();
        let c = VertexFunction::constant(&g1, 2.0);
        assert!((h_norm_sq(&g1, &a1, &c).unwrap() - 0.7 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn log_energy_cases() {
        let g1 = WeightedGraph::single_vertex(1.0).unwrap();
        let one = VertexFunction::constant(&g1, 1.0);
        assert_eq!(log_energy(&g1, &one).unwrap(), (0.0, 0.0));
        let e = VertexFunction::constant(&g1, 0.5f64.exp());
        let (pos, neg) = log_energy(&g1, &e).unwrap();
        assert!((pos - std::f64::consts::E).abs() < 1e-14);
        assert_eq!(neg, 0.0);

        let g = two_vertex();
        let u = VertexFunction::new(&g, vec![0.0, 0.5]).unwrap();
        let (pos, neg) = log_energy(&g, &u).unwrap();
        assert_eq!(pos, 0.0);
        assert!((neg - 0.25 * 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn a1_violations_are_rejected() {
        let g = two_vertex();
        assert!(matches!(
            potential_generate(&PotentialFamilySpec::Constant(-1.5), &g),
            Err(Error::PotentialClass(msg)) if msg.contains("(A1)")
        ));
        assert!(Potential::new(&g, vec![-0.4, 0.0], -0.3, PotentialClass::A2, None).is_err());
        assert!(Potential::new(&g, vec![0.0, 0.0], -1.0, PotentialClass::A2, None).is_err());
        assert!(Potential::new(&g, vec![0.0, 0.0], 0.0, PotentialClass::A2Prime, None).is_err());
        // a0 >= 0 is accepted and recorded
        let p = Potential::new(&g, vec![0.5, 0.7], 0.5, PotentialClass::A2, None).unwrap();
        assert_eq!(p.a0(), 0.5);
    }

    #[test]
    fn embedding_check_is_tight_on_min_measure_indicator() {
        let g = WeightedGraph::single_vertex(0.7).unwrap();
        let a = Potential::constant(&g, -0.5).unwrap();
        let u = VertexFunction::constant(&g, 1.3);
        assert!(linf_embedding_check(&g, &a, &u).unwrap());
        let lhs = 1.3f64.powi(2) * 0.5 * 0.7;
        assert!((h_norm_sq(&g, &a, &u).unwrap() - lhs).abs() < 1e-15);

        let path = GraphFamilySpec::path(4)
            .with_measure("0.5..2".parse().unwrap())
            .with_seed(4)
            .generate()
            .unwrap();
        let a = Potential::constant(&path, -0.5).unwrap();
        let argmin = (0..path.len())
            .min_by(|&x, &y| path.mu(x).total_cmp(&path.mu(y)))
            .unwrap();
        let e = VertexFunction::indicator(&path, argmin);
        let h = h_norm_sq(&path, &a, &e).unwrap();
        let gap = h - 0.5 * path.mu_min();
        assert!((gap - path.dirichlet_energy(&e).unwrap()).abs() < 1e-14);
        assert!(matches!(
            linf_embedding_check(&path, &a, &VertexFunction::zeros(&path)),
            Err(Error::ZeroFunction(_))
        ));
    }

    #[test]
    fn constant_potential_class() {
        let g = GraphFamilySpec::path(5).generate().unwrap();
        let a = potential_generate(&"constant:-0.5".parse().unwrap(), &g).unwrap();
        assert_eq!(a.a0(), -0.5);
        assert_eq!(a.class(), PotentialClass::A2);
        assert_eq!(a.sublevel_volume(&g, -0.5), g.volume());
    }

    #[test]
    fn coercive_on_half_line_has_finite_sublevel_sets() {
        let ball = "half_line".parse::<GraphFamilySpec>().unwrap().truncate(20).unwrap();
        let a = potential_generate(&"coercive:1,-0.5,0".parse().unwrap(), &ball.graph).unwrap();
        for x in 0..ball.graph.len() {
            assert_eq!(a.get(x), ball.depth[x] as f64 - 0.5);
        }
        // threshold count oracle: #{d : d - 0.5 <= M} = floor(M + 0.5) + 1
        for m in [0.0, 3.2, 7.5] {
            let count = (0..=20).filter(|&d| d as f64 - 0.5 <= m).count();
            assert_eq!(count, (m + 0.5f64).floor() as usize + 1);
            assert_eq!(a.sublevel_volume(&ball.graph, m), count as f64);
        }
    }

    #[test]
    fn sign_changing_potential() {
        let g = GraphFamilySpec::path(10).generate().unwrap();
        let a = potential_generate(&"sign_changing:1,-0.5,0.4,0".parse().unwrap(), &g).unwrap();
        assert!(a.values().iter().any(|v| *v < 0.0));
        assert!(a.values().iter().any(|v| *v > 0.0));
        assert!(a.a0() > -1.0);
        assert!(potential_generate(&"sign_changing:1,-0.5,2,0".parse().unwrap(), &g).is_err());
    }

    #[test]
    fn reciprocal_summable_picks_cubic_on_example1_measure() {
        let g = GraphFamilySpec::half_line_example1(200).generate().unwrap();
        // oracle: with mu(x) = x, shell sums are x^{1-p}
        let quad = reciprocal_tail(&g, 0, 2, 1.0).unwrap();
        assert!((quad.shell_slope + 1.0).abs() < 1e-9);
        let cubic = reciprocal_tail(&g, 0, 3, 1.0).unwrap();
        assert!((cubic.shell_slope + 2.0).abs() < 1e-9);
        // integral comparison: sum_{x > 200} 1/x^2 <= 1/200
        assert!(cubic.tail_bound >= 1.0 / 201.0 && cubic.tail_bound <= 1.01 / 200.0);

        let spec: PotentialFamilySpec = "reciprocal_summable:0".parse().unwrap();
        let a = potential_generate(&spec, &g).unwrap();
        assert_eq!(a.class(), PotentialClass::A2Prime);
        assert_eq!(a.get(5), 125.0);
        assert_eq!(spec.reciprocal_report(&g).unwrap().unwrap().exponent, 3);
        let partial = a.reciprocal_partial_sum(&g).unwrap();
        let oracle: f64 = (2..=200).map(|x| 1.0 / (x as f64 * x as f64)).sum();
        assert!((partial - oracle).abs() < 1e-12);
    }

    #[test]
    fn analytic_log_constant_dominates_calibration() {
        let g = GraphFamilySpec::path(6)
            .with_measure("0.5..1.5".parse().unwrap())
            .generate()
            .unwrap();
        let a = Potential::constant(&g, -0.6).unwrap();
        let analytic = log_growth_constant(3.0, a.a0(), g.mu_min());
        let observed = calibrate_log_growth(&g, &a, 3.0, 400, 1);
        assert!(observed > 0.0 && observed <= analytic, "{observed} vs {analytic}");
    }

    #[test]
    fn spec_strings_parse() {
        for s in [
            "constant:-0.5",
            "coercive:1,-0.5,0",
            "sign_changing:1,0,0.5,2",
            "reciprocal_summable:0,min_exponent=2,m0=1",
        ] {
            let spec: PotentialFamilySpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("constant".parse::<PotentialFamilySpec>().is_err());
        assert!("wavy:1".parse::<PotentialFamilySpec>().is_err());
        assert!("constant:1,m0=2".parse::<PotentialFamilySpec>().is_err());
    }
}
