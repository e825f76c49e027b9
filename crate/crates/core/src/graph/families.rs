//! Graph family generators.
//!
//! Finite families build a [`WeightedGraph`] directly. Infinite families
//! (`half_line`, `half_line_mu_x`, `lattice_z2`) are lazy [`LocallyFinite`]
//! graphs and are only materialized through ball truncation.
//!
//! Families are written as `name[:arg,...][,w=..][,mu=..][,seed=..]`, e.g.
//! `path:30`, `random_tree:50,7`, `cycle:8,w=2`, `lattice2d:4,mu=0.5..2,seed=3`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ball::{ball_truncate, Ball, LocallyFinite};
use super::{Edge, WeightedGraph};
use crate::error::{Error, Result};

/// Per-edge weight or per-vertex measure assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueSpec {
    Constant(f64),
    /// Uniform on `[lo, hi)`, drawn in vertex (or edge) order.
    Uniform { lo: f64, hi: f64 },
}

impl ValueSpec {
    fn validate(&self, what: &str) -> Result<()> {
        let ok = match *self {
            ValueSpec::Constant(c) => c.is_finite() && c > 0.0,
            ValueSpec::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFamily(format!("{what} must be positive, got {self}")))
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            ValueSpec::Constant(c) => c,
            ValueSpec::Uniform { lo, hi } if lo == hi => lo,
            ValueSpec::Uniform { lo, hi } => rng.random_range(lo..hi),
        }
    }

    fn upper(&self) -> f64 {
        match *self {
            ValueSpec::Constant(c) => c,
            ValueSpec::Uniform { hi, .. } => hi,
        }
    }
}

impl fmt::Display for ValueSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSpec::Constant(c) => write!(f, "{c}"),
            ValueSpec::Uniform { lo, hi } => write!(f, "{lo}..{hi}"),
        }
    }
}

impl FromStr for ValueSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidFamily(format!("cannot parse number '{t}'")))
        };
        match s.split_once("..") {
            Some((lo, hi)) => Ok(ValueSpec::Uniform {
                lo: parse(lo)?,
                hi: parse(hi)?,
            }),
            None => Ok(ValueSpec::Constant(parse(s)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Path(usize),
    Cycle(usize),
    Star(usize),
    Lattice2d(usize),
    HalfLineExample1(usize),
    RandomTree { n: usize, seed: u64 },
    /// Infinite half-line `0 - 1 - 2 - ...`.
    HalfLine,
    /// Infinite half-line with `mu(0) = 1`, `mu(x) = x` for `x >= 1`.
    HalfLineMuX,
    /// Infinite square lattice `Z^2`.
    LatticeZ2,
}

/// A named graph family with weight and measure options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GraphFamilySpec {
    pub kind: FamilyKind,
    pub weights: ValueSpec,
    pub measure: ValueSpec,
    /// Seed for random weights and measures.
    pub seed: u64,
}

impl GraphFamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        Self {
            kind,
            weights: ValueSpec::Constant(1.0),
            measure: ValueSpec::Constant(1.0),
            seed: 0,
        }
    }

    pub fn path(n: usize) -> Self {
        Self::new(FamilyKind::Path(n))
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(FamilyKind::Cycle(n))
    }

    pub fn star(n: usize) -> Self {
        Self::new(FamilyKind::Star(n))
    }

    pub fn lattice2d(n: usize) -> Self {
        Self::new(FamilyKind::Lattice2d(n))
    }

    pub fn half_line_example1(n: usize) -> Self {
        Self::new(FamilyKind::HalfLineExample1(n))
    }

    pub fn random_tree(n: usize, seed: u64) -> Self {
        Self::new(FamilyKind::RandomTree { n, seed })
    }

    pub fn with_weights(mut self, weights: ValueSpec) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_measure(mut self, measure: ValueSpec) -> Self {
        self.measure = measure;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_infinite(&self) -> bool {
        matches!(
            self.kind,
            FamilyKind::HalfLine | FamilyKind::HalfLineMuX | FamilyKind::LatticeZ2
        )
    }

    /// Builds a finite family. Infinite families must go through [`Self::truncate`].
    pub fn generate(&self) -> Result<WeightedGraph> {
        self.weights.validate("edge weight")?;
        self.measure.validate("vertex measure")?;
        let (n, edges) = match self.kind {
            FamilyKind::Path(n) => {
                check_size(n, 2)?;
                (n, (0..n - 1).map(|x| (x, x + 1)).collect::<Vec<_>>())
            }
            FamilyKind::Cycle(n) => {
                check_size(n, 3)?;
                let mut e: Vec<_> = (0..n - 1).map(|x| (x, x + 1)).collect();
                e.push((0, n - 1));
                (n, e)
            }
            FamilyKind::Star(n) => {
                check_size(n, 2)?;
                (n, (1..n).map(|x| (0, x)).collect())
            }
            FamilyKind::Lattice2d(k) => {
                check_size(k, 2)?;
                let mut e = Vec::new();
                for i in 0..k {
                    for j in 0..k {
                        let v = i * k + j;
                        if j + 1 < k {
                            e.push((v, v + 1));
                        }
                        if i + 1 < k {
                            e.push((v, v + k));
                        }
                    }
                }
                (k * k, e)
            }
            FamilyKind::HalfLineExample1(n) => {
                check_size(n, 2)?;
                let edges = (0..n)
                    .map(|x| Edge { x, y: x + 1, w: 1.0 })
                    .collect();
                let measure = (0..=n).map(example1_measure).collect();
                return Ok(WeightedGraph::interior(measure, edges)?.with_measure_bound(None));
            }
            FamilyKind::RandomTree { n, seed } => {
                check_size(n, 2)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (n, (1..n).map(|x| (rng.random_range(0..x), x)).collect())
            }
            FamilyKind::HalfLine | FamilyKind::HalfLineMuX | FamilyKind::LatticeZ2 => {
                return Err(Error::InvalidFamily(format!(
                    "{self} is infinite; truncate it to a ball first"
                )))
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_0f_ed9e5);
        let measure = (0..n).map(|_| self.measure.draw(&mut rng)).collect();
        let edges = edges
            .into_iter()
            .map(|(x, y)| Edge {
                x,
                y,
                w: self.weights.draw(&mut rng),
            })
            .collect();
        Ok(WeightedGraph::interior(measure, edges)?.with_measure_bound(Some(self.measure.upper())))
    }

    fn constant_values(&self) -> Result<(f64, f64)> {
        match (self.weights, self.measure) {
            (ValueSpec::Constant(w), ValueSpec::Constant(m)) => Ok((w, m)),
            _ => Err(Error::InvalidFamily(format!(
                "{self}: infinite families support constant weights and measure only"
            ))),
        }
    }

    /// Ball of `radius` around the family's origin (vertex 0, or `(0, 0)` on `Z^2`).
    pub fn truncate(&self, radius: usize) -> Result<Ball<usize>> {
        self.weights.validate("edge weight")?;
        self.measure.validate("vertex measure")?;
        match self.kind {
            FamilyKind::HalfLine => {
                let (w, m) = self.constant_values()?;
                ball_truncate(&HalfLine::new(w, HalfLineMeasure::Constant(m)), &0, radius)
            }
            FamilyKind::HalfLineMuX => {
                let (w, _) = self.constant_values()?;
                ball_truncate(&HalfLine::new(w, HalfLineMeasure::Example1), &0, radius)
            }
            FamilyKind::LatticeZ2 => {
                let (w, m) = self.constant_values()?;
                let ball = ball_truncate(&LatticeZ2::new(w, m), &(0, 0), radius)?;
                Ok(Ball {
                    labels: (0..ball.graph.len()).collect(),
                    graph: ball.graph,
                    depth: ball.depth,
                    radius,
                })
            }
            _ => ball_truncate(&self.generate()?, &0, radius),
        }
    }
}

fn check_size(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidFamily(format!(
            "family size {n} is below the minimum {min}"
        )))
    } else {
        Ok(())
    }
}

fn example1_measure(x: usize) -> f64 {
    if x == 0 {
        1.0
    } else {
        x as f64
    }
}

impl fmt::Display for GraphFamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Path(n) => write!(f, "path:{n}")?,
            FamilyKind::Cycle(n) => write!(f, "cycle:{n}")?,
            FamilyKind::Star(n) => write!(f, "star:{n}")?,
            FamilyKind::Lattice2d(n) => write!(f, "lattice2d:{n}")?,
            FamilyKind::HalfLineExample1(n) => write!(f, "half_line_example1:{n}")?,
            FamilyKind::RandomTree { n, seed } => write!(f, "random_tree:{n},{seed}")?,
            FamilyKind::HalfLine => write!(f, "half_line")?,
            FamilyKind::HalfLineMuX => write!(f, "half_line_mu_x")?,
            FamilyKind::LatticeZ2 => write!(f, "lattice_z2")?,
        }
        let mut options = Vec::new();
        if self.weights != ValueSpec::Constant(1.0) {
            options.push(format!("w={}", self.weights));
        }
        if self.measure != ValueSpec::Constant(1.0) {
            options.push(format!("mu={}", self.measure));
        }
        if self.seed != 0 {
            options.push(format!("seed={}", self.seed));
        }
        if !options.is_empty() {
            let sep = if matches!(
                self.kind,
                FamilyKind::HalfLine | FamilyKind::HalfLineMuX | FamilyKind::LatticeZ2
            ) {
                ":"
            } else {
                ","
            };
            write!(f, "{sep}{}", options.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for GraphFamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut positional = Vec::new();
        let mut spec_opts = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.split_once('=') {
                Some((k, v)) => spec_opts.push((k.trim(), v.trim())),
                None => positional.push(item),
            }
        }
        let int = |i: usize| -> Result<u64> {
            let t = positional
                .get(i)
                .ok_or_else(|| Error::InvalidFamily(format!("'{s}': missing argument {}", i + 1)))?;
            t.parse::<f64>()
                .ok()
                .filter(|v| v.fract() == 0.0 && *v >= 0.0)
                .map(|v| v as u64)
                .ok_or_else(|| Error::InvalidFamily(format!("'{s}': '{t}' is not a size")))
        };
        let arity = |k: usize| -> Result<()> {
            if positional.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidFamily(format!(
                    "'{s}': expected {k} argument(s), found {}",
                    positional.len()
                )))
            }
        };
        let expected_args = match name {
            "random_tree" => 2,
            "half_line" | "half_line_mu_x" | "lattice_z2" => 0,
            _ => 1,
        };
        let kind = match name {
            "path" | "cycle" | "star" | "lattice2d" | "half_line_example1" | "random_tree"
            | "half_line" | "half_line_mu_x" | "lattice_z2" => {
                arity(expected_args)?;
                match name {
                    "path" => FamilyKind::Path(int(0)? as usize),
                    "cycle" => FamilyKind::Cycle(int(0)? as usize),
                    "star" => FamilyKind::Star(int(0)? as usize),
                    "lattice2d" => FamilyKind::Lattice2d(int(0)? as usize),
                    "half_line_example1" => FamilyKind::HalfLineExample1(int(0)? as usize),
                    "random_tree" => FamilyKind::RandomTree {
                        n: int(0)? as usize,
                        seed: int(1)?,
                    },
                    "half_line" => FamilyKind::HalfLine,
                    "half_line_mu_x" => FamilyKind::HalfLineMuX,
                    _ => FamilyKind::LatticeZ2,
                }
            }
            other => return Err(Error::InvalidFamily(format!("unknown graph family '{other}'"))),
        };
        let mut spec = GraphFamilySpec::new(kind);
        for (k, v) in spec_opts {
            match k {
                "w" => spec.weights = v.parse()?,
                "mu" => spec.measure = v.parse()?,
                "seed" => {
                    spec.seed = v
                        .parse()
                        .map_err(|_| Error::InvalidFamily(format!("bad seed '{v}'")))?
                }
                other => {
                    return Err(Error::InvalidFamily(format!(
                        "unknown graph option '{other}' in '{s}'"
                    )))
                }
            }
        }
        Ok(spec)
    }
}

impl TryFrom<String> for GraphFamilySpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GraphFamilySpec> for String {
    fn from(spec: GraphFamilySpec) -> String {
        spec.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfLineMeasure {
    Constant(f64),
    /// `mu(0) = 1`, `mu(x) = x` for `x >= 1` (unbounded).
    Example1,
}

/// The infinite half-line `0 - 1 - 2 - ...` with constant edge weight.
#[derive(Debug, Clone, Copy)]
pub struct HalfLine {
    pub weight: f64,
    pub measure: HalfLineMeasure,
}

impl HalfLine {
    pub fn new(weight: f64, measure: HalfLineMeasure) -> Self {
        Self { weight, measure }
    }

    pub fn unit() -> Self {
        Self::new(1.0, HalfLineMeasure::Constant(1.0))
    }
}

impl LocallyFinite for HalfLine {
    type Vertex = usize;

    fn contains(&self, _v: &usize) -> bool {
        true
    }

    fn neighbors(&self, v: &usize) -> Vec<(usize, f64)> {
        if *v == 0 {
            vec![(1, self.weight)]
        } else {
            vec![(v - 1, self.weight), (v + 1, self.weight)]
        }
    }

    fn measure(&self, v: &usize) -> f64 {
        match self.measure {
            HalfLineMeasure::Constant(m) => m,
            HalfLineMeasure::Example1 => example1_measure(*v),
        }
    }

    fn measure_bound(&self) -> Option<f64> {
        match self.measure {
            HalfLineMeasure::Constant(m) => Some(m),
            HalfLineMeasure::Example1 => None,
        }
    }
}

/// The infinite square lattice `Z^2` with constant weight and measure.
#[derive(Debug, Clone, Copy)]
pub struct LatticeZ2 {
    pub weight: f64,
    pub mu: f64,
}

impl LatticeZ2 {
    pub fn new(weight: f64, mu: f64) -> Self {
        Self { weight, mu }
    }

    pub fn unit() -> Self {
        Self::new(1.0, 1.0)
    }
}

impl LocallyFinite for LatticeZ2 {
    type Vertex = (i64, i64);

    fn contains(&self, _v: &(i64, i64)) -> bool {
        true
    }

    fn neighbors(&self, &(i, j): &(i64, i64)) -> Vec<((i64, i64), f64)> {
        [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)]
            .into_iter()
            .map(|v| (v, self.weight))
            .collect()
    }

    fn measure(&self, _v: &(i64, i64)) -> f64 {
        self.mu
    }

    fn measure_bound(&self) -> Option<f64> {
        Some(self.mu)
    }
}
