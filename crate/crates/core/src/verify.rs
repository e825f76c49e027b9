//! Summability checks for radial functions that lie in the energy space
//! while `∫ u² log u² dμ = -∞`, and the scalar bound
//! `|s² log s²| ≤ C_ε (s^{2-ε} + s^{2+ε})`.
//!
//! A radial profile `u(r) = (r^{q/2} log r)^{-1}` for `r ≥ 3` (zero inside)
//! is evaluated shell by shell around a root vertex. Convergence verdicts
//! rest on integral-test tail bounds for explicit majorants, divergence
//! verdicts on crossing tables for an explicit minorant.

use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphFamilySpec, VertexFunction, WeightedGraph};
use crate::numeric::Accumulator;

/// First radius where the profiles are nonzero.
pub const FIRST_SHELL: u64 = 3;
/// Crossing thresholds for the first example.
pub const EXAMPLE1_BOUNDS: [f64; 3] = [5.0, 10.0, 20.0];
/// Crossing thresholds for the second example.
pub const EXAMPLE2_BOUNDS: [f64; 3] = [2.0, 5.0, 10.0];
/// Default partial-sum schedule.
pub const DEFAULT_SCHEDULE: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

const TERM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergentWithTailBound,
    DivergentBeyondAllBounds,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ConvergentWithTailBound => "convergent_with_tail_bound",
            Verdict::DivergentBeyondAllBounds => "divergent_beyond_all_bounds",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One row of a crossing table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub bound: f64,
    /// Smallest scanned `N` with `S_N > bound`.
    pub n_series: Option<u64>,
    /// Smallest scanned `N` with the minorant series above `bound`.
    pub n_minorant_series: Option<u64>,
    /// `ln(N + 1)` past which the closed-form minorant exceeds `bound`.
    pub log_n_certified: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub series: String,
    pub partial_sums: Vec<(u64, f64)>,
    pub verdict: Verdict,
    /// Integral-test bound on `S_∞ - S_N`, for convergent series.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tail_bounds: Vec<(u64, f64)>,
    /// Closed-form lower bound on `S_N`, for divergent series.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub minorant: Vec<(u64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub crossings: Vec<Crossing>,
    pub detail: String,
}

impl SeriesReport {
    pub fn is_monotone(&self) -> bool {
        self.partial_sums.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    pub fn to_csv(&self) -> String {
        let divergent = !self.minorant.is_empty();
        let mut out = String::from(if divergent { "N,S_N,minorant\n" } else { "N,S_N,tail_bound\n" });
        let bounds = if divergent { &self.minorant } else { &self.tail_bounds };
        for (i, (n, s)) in self.partial_sums.iter().enumerate() {
            let b = bounds.get(i).map(|p| p.1.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{n},{s},{b}");
        }
        out
    }
}

impl fmt::Display for SeriesReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.series, self.verdict)?;
        for (i, (n, s)) in self.partial_sums.iter().enumerate() {
            write!(f, "  N = {n:>10}  S_N = {s:.12e}")?;
            if let Some((_, t)) = self.tail_bounds.get(i) {
                write!(f, "  tail <= {t:.6e}")?;
            }
            if let Some((_, m)) = self.minorant.get(i) {
                write!(f, "  minorant = {m:.6}")?;
            }
            writeln!(f)?;
        }
        for c in &self.crossings {
            let show = |n: Option<u64>| n.map_or("-".to_string(), |n| n.to_string());
            writeln!(
                f,
                "  M = {:>5}  N(S) = {:>10}  N(minorant series) = {:>10}  ln(N+1) <= {:.6e}",
                c.bound,
                show(c.n_series),
                show(c.n_minorant_series),
                c.log_n_certified
            )?;
        }
        write!(f, "  {}", self.detail)
    }
}

/// The three series attached to a radial profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub example: String,
    pub l2: SeriesReport,
    pub grad: SeriesReport,
    pub logneg: SeriesReport,
}

impl ExampleReport {
    pub fn verdicts(&self) -> [Verdict; 3] {
        [self.l2.verdict, self.grad.verdict, self.logneg.verdict]
    }

    /// `u` has finite energy while its logarithmic energy diverges.
    pub fn confirms_counterexample(&self) -> bool {
        self.verdicts()
            == [
                Verdict::ConvergentWithTailBound,
                Verdict::ConvergentWithTailBound,
                Verdict::DivergentBeyondAllBounds,
            ]
    }

    pub fn is_inconclusive(&self) -> bool {
        self.verdicts().contains(&Verdict::Inconclusive)
    }
}

impl fmt::Display for ExampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.example)?;
        writeln!(f, "{}", self.l2)?;
        writeln!(f, "{}", self.grad)?;
        write!(f, "{}", self.logneg)
    }
}

/// Shell growth assumed beyond the computed radius: for `r ≥ 3`,
/// `mass_lower r^p ≤ mass_r ≤ mass_upper r^p` and `cross_r ≤ cross_upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellGrowth {
    pub exponent: u32,
    pub mass_lower: f64,
    pub mass_upper: f64,
    pub cross_upper: f64,
}

/// Per-distance shell data of a rooted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellProfile {
    /// `mass[r]` is the measure of the sphere of radius `r`.
    pub mass: Vec<f64>,
    /// `cross[r]` is the total weight between spheres `r` and `r + 1`.
    pub cross: Vec<f64>,
    pub growth: ShellGrowth,
}

impl ShellProfile {
    pub fn from_graph(graph: &WeightedGraph, root: usize, growth: ShellGrowth) -> Result<Self> {
        if root >= graph.len() {
            return Err(Error::UnknownVertex(root.to_string()));
        }
        let dist = graph.distances_from(root);
        let dist: Vec<usize> = dist
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| Error::DisconnectedCenter(root.to_string()))?;
        let radius = dist.iter().copied().max().unwrap_or(0);
        let mut mass = vec![0.0; radius + 1];
        let mut cross = vec![0.0; radius];
        for (x, &r) in dist.iter().enumerate() {
            mass[r] += graph.mu(x);
        }
        for e in graph.edges() {
            let (rx, ry) = (dist[e.x], dist[e.y]);
            if rx != ry {
                cross[rx.min(ry)] += e.w;
            }
        }
        Ok(Self { mass, cross, growth })
    }

    /// Half-line `0 - 1 - ... - n` with constant measure and weight.
    pub fn half_line(n: usize, mu: f64, w: f64) -> Self {
        Self {
            mass: vec![mu; n + 1],
            cross: vec![w; n],
            growth: ShellGrowth {
                exponent: 0,
                mass_lower: mu,
                mass_upper: mu,
                cross_upper: w,
            },
        }
    }

    pub fn radius(&self) -> u64 {
        (self.mass.len() - 1) as u64
    }
}

/// `u(r) = (r^{q/2} log r)^{-1}` for `r ≥ 3`, zero for `r ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadialProfile {
    pub q: u32,
}

impl RadialProfile {
    pub const EXAMPLE1: Self = Self { q: 2 };
    pub const EXAMPLE2: Self = Self { q: 1 };

    pub fn value(&self, r: u64) -> f64 {
        if r < FIRST_SHELL {
            0.0
        } else {
            let r = r as f64;
            1.0 / (r.powf(self.q as f64 / 2.0) * r.ln())
        }
    }

    /// `u(r)²`, computed directly to avoid the rounding of a squared root.
    fn square(&self, r: u64) -> f64 {
        let rf = r as f64;
        1.0 / (rf.powi(self.q as i32) * rf.ln().powi(2))
    }

    /// `-u² log u² = u² (q log r + 2 log log r)`.
    fn neg_log_term(&self, r: u64) -> f64 {
        let rf = r as f64;
        self.square(r) * (self.q as f64 * rf.ln() + 2.0 * rf.ln().ln())
    }
}

/// Closed-form `Σ_{r>N} r^{-e} (log r)^{-2}` majorant, if the series converges.
fn tail_integral(e: i64, n: f64) -> Option<f64> {
    match e {
        1 => Some(1.0 / n.ln()),
        e if e >= 2 => Some(1.0 / (n.powi(e as i32 - 1) * n.ln().powi(2))),
        _ => None,
    }
}

fn check_schedule(schedule: &[u64], radius: u64) -> Result<()> {
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "schedule must be strictly increasing".into(),
        ));
    }
    if let Some(&n) = schedule.first() {
        if n < FIRST_SHELL {
            return Err(Error::InvalidArgument(format!(
                "schedule entries must be at least {FIRST_SHELL}, found {n}"
            )));
        }
    }
    if let Some(&n) = schedule.last() {
        if n >= radius {
            return Err(Error::InvalidArgument(format!(
                "schedule reaches N = {n} but the shell profile only has radius {radius}"
            )));
        }
    }
    Ok(())
}

/// Scans the three series of `profile` on `shells` up to the last schedule entry.
pub fn radial_verify(
    name: &str,
    shells: &ShellProfile,
    profile: RadialProfile,
    schedule: &[u64],
    bounds: &[f64],
) -> Result<ExampleReport> {
    check_schedule(schedule, shells.radius())?;
    let growth = shells.growth;
    let p = growth.exponent as i64;
    let q = profile.q as i64;
    let e = q - p;

    let mut l2 = Accumulator::new();
    let mut grad = Accumulator::new();
    let mut logneg = Accumulator::new();
    let mut minor = Accumulator::new();
    // The edge into the first nonzero shell.
    grad.add(shells.cross[(FIRST_SHELL - 1) as usize] * profile.square(FIRST_SHELL));

    let k = growth.mass_lower * profile.q as f64;
    let mut growth_ok = true;
    let mut grad_ok = true;
    let mut minorant_ok = true;
    let mut rows = Vec::with_capacity(schedule.len());
    let mut n_series = vec![None; bounds.len()];
    let mut n_minor = vec![None; bounds.len()];
    let mut next = 0;
    let last = schedule.last().copied().unwrap_or(0);

    for r in FIRST_SHELL..=last {
        let ri = r as usize;
        let rf = r as f64;
        let scale = rf.powi(p as i32);
        let m = shells.mass[ri];
        if m < growth.mass_lower * scale * (1.0 - TERM_SLACK)
            || m > growth.mass_upper * scale * (1.0 + TERM_SLACK)
        {
            growth_ok = false;
        }
        if shells.cross[ri] > growth.cross_upper * (1.0 + TERM_SLACK) {
            growth_ok = false;
        }
        let u2 = profile.square(r);
        l2.add(m * u2);

        let du = profile.value(r + 1) - profile.value(r);
        let g = shells.cross[ri] * du * du;
        if g > 2.0 * growth.cross_upper * u2 * (1.0 + TERM_SLACK) {
            grad_ok = false;
        }
        grad.add(g);

        let term = m * profile.neg_log_term(r);
        let lower = k / (rf * rf.ln());
        if e <= 1 && term < lower * (1.0 - TERM_SLACK) {
            minorant_ok = false;
        }
        logneg.add(term);
        minor.add(lower);

        for (i, &b) in bounds.iter().enumerate() {
            if n_series[i].is_none() && logneg.value() > b {
                n_series[i] = Some(r);
            }
            if n_minor[i].is_none() && minor.value() > b {
                n_minor[i] = Some(r);
            }
        }
        if next < schedule.len() && schedule[next] == r {
            rows.push((r, l2.value(), grad.value(), logneg.value()));
            next += 1;
        }
    }

    let enough = schedule.len() >= 2;
    let weight = |f: f64| f * growth.mass_upper;

    let l2_report = {
        let partial: Vec<_> = rows.iter().map(|r| (r.0, r.1)).collect();
        let tails: Vec<_> = rows
            .iter()
            .filter_map(|r| tail_integral(e, r.0 as f64).map(|t| (r.0, weight(t))))
            .collect();
        convergent_report("l2", partial, tails, enough, growth_ok, "mass_r u(r)^2 <= mass_upper r^p u(r)^2")
    };

    let grad_report = {
        let partial: Vec<_> = rows.iter().map(|r| (r.0, r.2)).collect();
        let tails: Vec<_> = rows
            .iter()
            .filter_map(|r| tail_integral(q, r.0 as f64).map(|t| (r.0, 2.0 * growth.cross_upper * t)))
            .collect();
        convergent_report(
            "grad",
            partial,
            tails,
            enough,
            growth_ok && grad_ok,
            "w (u(r+1) - u(r))^2 <= 2 cross_upper u(r)^2",
        )
    };

    let logneg_report = {
        let partial: Vec<(u64, f64)> = rows.iter().map(|r| (r.0, r.3)).collect();
        let minorant_at = |n: u64| k * (((n + 1) as f64).ln().ln() - (FIRST_SHELL as f64).ln().ln());
        let minorant: Vec<_> = rows.iter().map(|r| (r.0, minorant_at(r.0))).collect();
        let crossings: Vec<_> = bounds
            .iter()
            .enumerate()
            .map(|(i, &b)| Crossing {
                bound: b,
                n_series: n_series[i],
                n_minorant_series: n_minor[i],
                log_n_certified: (b / k + (FIRST_SHELL as f64).ln().ln()).exp(),
            })
            .collect();
        let dominated = partial
            .iter()
            .zip(&minorant)
            .all(|(s, m)| s.1 >= m.1 * (1.0 - TERM_SLACK));
        let consistent = crossings.iter().all(|c| {
            c.n_series
                .is_none_or(|n| (n as f64).ln() <= c.log_n_certified * (1.0 + TERM_SLACK))
        });
        let (verdict, detail) = if e > 1 {
            (
                Verdict::Inconclusive,
                "no divergent minorant: mass_r u(r)^2 decays faster than 1/(r log r)".to_string(),
            )
        } else if !enough {
            (Verdict::Inconclusive, "schedule too short; supply at least two N".to_string())
        } else if !growth_ok || !minorant_ok || !dominated || !consistent {
            (
                Verdict::Inconclusive,
                "minorant comparison failed on the scanned range".to_string(),
            )
        } else {
            (
                Verdict::DivergentBeyondAllBounds,
                format!(
                    "S_N >= {k} (log log (N+1) - log log 3), unbounded; terms >= {k} / (r log r)"
                ),
            )
        };
        SeriesReport {
            series: "logneg".into(),
            partial_sums: partial,
            verdict,
            tail_bounds: Vec::new(),
            minorant,
            crossings,
            detail,
        }
    };

    Ok(ExampleReport {
        example: name.to_string(),
        l2: l2_report,
        grad: grad_report,
        logneg: logneg_report,
    })
}

fn convergent_report(
    series: &str,
    partial: Vec<(u64, f64)>,
    tails: Vec<(u64, f64)>,
    enough: bool,
    terms_ok: bool,
    comparison: &str,
) -> SeriesReport {
    // Later partial sums must stay inside every earlier bracket [S_N, S_N + tail].
    let nested = partial.iter().enumerate().all(|(i, &(_, s))| {
        partial[i..]
            .iter()
            .all(|&(_, later)| tails.get(i).is_some_and(|t| later <= s + t.1 * (1.0 + TERM_SLACK)))
    });
    let (verdict, detail) = if tails.len() < partial.len() || partial.is_empty() {
        (Verdict::Inconclusive, "majorant is not summable".to_string())
    } else if !enough {
        (Verdict::Inconclusive, "schedule too short; supply at least two N".to_string())
    } else if !terms_ok || !nested {
        (
            Verdict::Inconclusive,
            "majorant comparison failed on the scanned range".to_string(),
        )
    } else {
        (
            Verdict::ConvergentWithTailBound,
            format!("{comparison}; tail by the integral test"),
        )
    };
    SeriesReport {
        series: series.into(),
        partial_sums: partial,
        verdict,
        tail_bounds: tails,
        minorant: Vec::new(),
        crossings: Vec::new(),
        detail,
    }
}

/// Half-line `0 - ... - n` with `μ(0) = 1`, `μ(x) = x`, unit weights, and
/// `u(x) = (x log x)^{-1}` for `x ≥ 3`.
pub fn example1_build(n: usize) -> Result<(WeightedGraph, VertexFunction)> {
    if n < 10 {
        return Err(Error::InvalidArgument(format!("example1 needs n >= 10, found {n}")));
    }
    let g = GraphFamilySpec::half_line_example1(n).generate()?;
    let u = VertexFunction::from_fn(&g, |x| RadialProfile::EXAMPLE1.value(x as u64));
    Ok((g, u))
}

pub fn example1_verify(schedule: &[u64]) -> Result<ExampleReport> {
    let last = schedule.last().copied().unwrap_or(FIRST_SHELL).max(9) as usize;
    let (g, _) = example1_build(last + 1)?;
    let growth = ShellGrowth {
        exponent: 1,
        mass_lower: 1.0,
        mass_upper: 1.0,
        cross_upper: 1.0,
    };
    let shells = ShellProfile::from_graph(&g, 0, growth)?;
    radial_verify(
        "example1: mu(x) = x, u = 1/(x log x)",
        &shells,
        RadialProfile::EXAMPLE1,
        schedule,
        &EXAMPLE1_BOUNDS,
    )
}

/// Default bounded-measure instance: the half-line with `μ ≡ 1` and unit weights.
pub fn example2_default_shells(schedule: &[u64]) -> ShellProfile {
    let last = schedule.last().copied().unwrap_or(FIRST_SHELL) as usize;
    ShellProfile::half_line(last + 1, 1.0, 1.0)
}

pub fn example2_verify(shells: &ShellProfile, schedule: &[u64]) -> Result<ExampleReport> {
    radial_verify(
        "example2: bounded measure, u = 1/(sqrt(x) log x)",
        shells,
        RadialProfile::EXAMPLE2,
        schedule,
        &EXAMPLE2_BOUNDS,
    )
}

/// Grid estimate of the best constant in `|s² log s²| ≤ C (s^{2-ε} + s^{2+ε})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CEpsilon {
    pub eps: f64,
    /// Inflated estimate `1.05 · grid max`.
    pub value: f64,
    pub grid_max: f64,
    pub argmax: f64,
    pub samples: usize,
    pub violations: usize,
}

pub const C_EPS_GRID: usize = 1_000_000;
pub const C_EPS_SAMPLES: usize = 100_000;
const C_EPS_INFLATION: f64 = 1.05;

pub fn c_epsilon_ratio(eps: f64, s: f64) -> f64 {
    (s * s * (s * s).ln()).abs() / (s.powf(2.0 - eps) + s.powf(2.0 + eps))
}

pub fn c_epsilon_estimate(eps: f64, seed: u64) -> Result<CEpsilon> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), found {eps}")));
    }
    let (lo, hi) = (-12.0_f64, 12.0_f64);
    let (mut grid_max, mut argmax) = (0.0_f64, 1.0);
    for i in 0..C_EPS_GRID {
        let s = 10f64.powf(lo + (hi - lo) * i as f64 / (C_EPS_GRID - 1) as f64);
        let r = c_epsilon_ratio(eps, s);
        if r > grid_max {
            grid_max = r;
            argmax = s;
        }
    }
    let value = C_EPS_INFLATION * grid_max;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let violations = (0..C_EPS_SAMPLES)
        .filter(|_| {
            let s = 1e3 * (1.0 - rng.random::<f64>());
            (s * s * (s * s).ln()).abs() > value * (s.powf(2.0 - eps) + s.powf(2.0 + eps))
        })
        .count();
    Ok(CEpsilon {
        eps,
        value,
        grid_max,
        argmax,
        samples: C_EPS_SAMPLES,
        violations,
    })
}
