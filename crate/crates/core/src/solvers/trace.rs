use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIters,
    /// The line search shrank the step below `min_step`.
    Stalled,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::Stalled => "stalled",
        })
    }
}

/// One iteration (descent) or sweep (mountain pass).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    #[serde(rename = "J")]
    pub j: f64,
    /// `||J'(u)||` in the dual of the energy space.
    pub dual_norm: f64,
    pub nehari_defect: f64,
    pub residual_l2: f64,
    /// Step accepted at this iteration; zero on the final record.
    pub step: f64,
    /// `(1 + ||u||_H) ||J'(u)||`.
    pub cerami: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub method: Method,
    pub records: Vec<IterRecord>,
    pub termination: Termination,
    /// Cerami product at the returned state, from a tight inner solve.
    pub final_cerami: f64,
}

impl SolveTrace {
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    pub fn cerami_products(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.cerami)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,J,dual_norm,nehari_defect,residual_l2,step,cerami\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                r.iter, r.j, r.dual_norm, r.nehari_defect, r.residual_l2, r.step, r.cerami
            ));
        }
        out
    }
}

/// Summary written after a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_hat: Option<f64>,
    pub residual_linf: f64,
    pub iters: usize,
    pub terminated: Termination,
}

impl SolveSummary {
    /// The reported level, `d_hat` or `c_hat`.
    pub fn level(&self) -> f64 {
        self.d_hat.or(self.c_hat).unwrap_or(f64::NAN)
    }
}
