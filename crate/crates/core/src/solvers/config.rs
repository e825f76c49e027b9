use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NehariDescent,
    MountainPass,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::NehariDescent => "nehari_descent",
            Method::MountainPass => "mountain_pass",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nehari" | "nehari_descent" => Ok(Method::NehariDescent),
            "mountain_pass" | "mp" => Ok(Method::MountainPass),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

/// Initial state of a solve. Boundary vertices are always set to zero.
///
/// String forms: `bump:vertex,height[,width]`, `constant:c`, `random:scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Init {
    /// `height * exp(-d(x, vertex)^2 / (2 width^2))`.
    PositiveBump { vertex: usize, height: f64, width: f64 },
    Constant(f64),
    /// Independent uniform values in `(0, scale]`.
    Random(f64),
}

impl Init {
    pub fn bump(vertex: usize, height: f64) -> Self {
        Init::PositiveBump {
            vertex,
            height,
            width: 1.0,
        }
    }

    pub fn realize(&self, graph: &WeightedGraph, seed: u64) -> Result<VertexFunction> {
        let mut values = match *self {
            Init::PositiveBump {
                vertex,
                height,
                width,
            } => {
                if vertex >= graph.len() {
                    return Err(Error::UnknownVertex(vertex.to_string()));
                }
                graph
                    .distances_from(vertex)
                    .into_iter()
                    .map(|d| match d {
                        Some(d) => height * (-((d * d) as f64) / (2.0 * width * width)).exp(),
                        None => 0.0,
                    })
                    .collect()
            }
            Init::Constant(c) => vec![c; graph.len()],
            Init::Random(scale) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..graph.len())
                    .map(|_| scale * (1.0 - rng.random::<f64>()))
                    .collect::<Vec<_>>()
            }
        };
        for x in 0..graph.len() {
            if graph.is_boundary(x) {
                values[x] = 0.0;
            }
        }
        let u = VertexFunction::new(graph, values)?;
        if u.is_zero() {
            return Err(Error::ZeroFunction("the initial state"));
        }
        Ok(u)
    }
}

impl fmt::Display for Init {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Init::PositiveBump {
                vertex,
                height,
                width,
            } => write!(f, "bump:{vertex},{height},{width}"),
            Init::Constant(c) => write!(f, "constant:{c}"),
            Init::Random(s) => write!(f, "random:{s}"),
        }
    }
}

impl FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("cannot parse init '{s}'"));
        let (name, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let args: Vec<&str> = rest.split(',').map(str::trim).collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        match (name, args.len()) {
            ("bump", 2 | 3) => Ok(Init::PositiveBump {
                vertex: args[0].parse().map_err(|_| bad())?,
                height: num(args[1])?,
                width: args.get(2).map(|t| num(t)).transpose()?.unwrap_or(1.0),
            }),
            ("constant", 1) => Ok(Init::Constant(num(args[0])?)),
            ("random", 1) => Ok(Init::Random(num(args[0])?)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Init {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Init> for String {
    fn from(init: Init) -> String {
        init.to_string()
    }
}

/// Backtracking line-search parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepControl {
    pub shrink: f64,
    pub armijo: f64,
    /// Factor applied to the step after an accepted iteration.
    pub grow: f64,
    pub min_step: f64,
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            shrink: 0.5,
            armijo: 1e-4,
            grow: 1.5,
            min_step: 1e-14,
            max_step: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iters: usize,
    /// Target for the weighted residual norm `residual_l2`.
    pub grad_tol: f64,
    pub step: f64,
    pub step_control: StepControl,
    pub seed: u64,
    pub init: Init,
    /// Number of path nodes, endpoints included (mountain pass only).
    pub path_points: usize,
    /// Residual target at the path maximizer before polishing (mountain pass only).
    pub path_tol: f64,
    /// Relative tolerance of the inner conjugate-gradient solve.
    pub cg_tol: f64,
    pub radius_schedule: Vec<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::NehariDescent,
            max_iters: 20_000,
            grad_tol: 1e-9,
            step: 1.0,
            step_control: StepControl::default(),
            seed: 0,
            init: Init::bump(0, 1.0),
            path_points: 9,
            path_tol: 1e-5,
            cg_tol: 1e-2,
            radius_schedule: Vec::new(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_tol", self.grad_tol),
            ("step", self.step),
            ("path_tol", self.path_tol),
            ("cg_tol", self.cg_tol),
            ("step_control.armijo", self.step_control.armijo),
            ("step_control.min_step", self.step_control.min_step),
            ("step_control.max_step", self.step_control.max_step),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let sc = &self.step_control;
        if !(sc.shrink > 0.0 && sc.shrink < 1.0) {
            return Err(Error::InvalidConfig("step_control.shrink must lie in (0, 1)".into()));
        }
        if !(sc.armijo < 1.0) {
            return Err(Error::InvalidConfig("step_control.armijo must be below 1".into()));
        }
        if !(sc.grow >= 1.0) {
            return Err(Error::InvalidConfig("step_control.grow must be at least 1".into()));
        }
        if self.path_points < 3 {
            return Err(Error::InvalidConfig("path_points must be at least 3".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if self.radius_schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("radius_schedule must be strictly increasing".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphFamilySpec;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = SolverConfig::default();
        cfg.validate().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: SolverConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let partial: SolverConfig = serde_json::from_str(r#"{"method":"mountain_pass","init":"constant:0.5"}"#).unwrap();
        assert_eq!(partial.method, Method::MountainPass);
        assert_eq!(partial.init, Init::Constant(0.5));
        assert!(serde_json::from_str::<SolverConfig>(r#"{"tolerance":1}"#).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            SolverConfig { grad_tol: 0.0, ..Default::default() },
            SolverConfig { path_points: 2, ..Default::default() },
            SolverConfig { radius_schedule: vec![10, 10], ..Default::default() },
            SolverConfig {
                step_control: StepControl { shrink: 1.0, ..Default::default() },
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
    }

    #[test]
    fn init_forms() {
        let g = GraphFamilySpec::path(5).generate().unwrap();
        let bump = Init::bump(2, 2.0).realize(&g, 0).unwrap();
        assert_eq!(bump.get(2), 2.0);
        assert!((bump.get(0) - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        let r1 = Init::Random(0.5).realize(&g, 9).unwrap();
        let r2 = Init::Random(0.5).realize(&g, 9).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.values().iter().all(|v| *v > 0.0 && *v <= 0.5));
        assert!(Init::Constant(0.0).realize(&g, 0).is_err());
        for s in ["bump:3,1.5,2", "constant:0.25", "random:1"] {
            assert_eq!(s.parse::<Init>().unwrap().to_string(), s);
        }
        assert!("bump:1".parse::<Init>().is_err());
    }
}
