//! Incentive-compatibility and participation checks on a grid.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::uniform_grid;
use crate::mechanism::SingleAgentMechanism;

/// Slack tolerance used by the acceptance checks.
pub const SLACK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub grid: usize,
    /// `min_{ν, ν̂} ν(x(ν) − x(ν̂)) + ν̂ − p(ν)`.
    pub min_ic_slack: f64,
    /// `(ν, ν̂)` attaining the IC minimum.
    pub ic_argmin: (f64, f64),
    /// `min_ν ν·x(ν) − p(ν)`.
    pub min_ir_slack: f64,
    pub ir_argmin: f64,
    pub min_allocation: f64,
    pub max_allocation: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.min_ic_slack >= -tol
            && self.min_ir_slack >= -tol
            && self.min_allocation >= -tol
            && self.max_allocation <= 1.0 + tol
    }
}

/// Checks IC and IR of `mech` at every pair of a `g`-point grid.
pub fn check_feasibility(mech: &SingleAgentMechanism, g: usize) -> Result<FeasibilityReport> {
    let nu = uniform_grid(g)?;
    let x = mech.allocation.sample(&nu);
    let p = mech.payment.sample(&nu);
    Ok(check_samples(&nu, &x, &p))
}

/// Same check for sampled allocation and payment values.
pub fn check_samples(nu: &[f64], x: &[f64], p: &[f64]) -> FeasibilityReport {
    let mut rep = FeasibilityReport {
        grid: nu.len(),
        min_ic_slack: f64::INFINITY,
        ic_argmin: (0.0, 0.0),
        min_ir_slack: f64::INFINITY,
        ir_argmin: 0.0,
        min_allocation: x.iter().copied().fold(f64::INFINITY, f64::min),
        max_allocation: x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    for (k, &v) in nu.iter().enumerate() {
        let ir = v * x[k] - p[k];
        if ir < rep.min_ir_slack {
            rep.min_ir_slack = ir;
            rep.ir_argmin = v;
        }
        // min over ν̂ of ν̂ − ν·x(ν̂); the ν̂ = ν term reproduces IR.
        let (mut best, mut arg) = (f64::INFINITY, 0);
        for (h, &vh) in nu.iter().enumerate() {
            let t = vh - v * x[h];
            if t < best {
                best = t;
                arg = h;
            }
        }
        let ic = v * x[k] + best - p[k];
        if ic < rep.min_ic_slack {
            rep.min_ic_slack = ic;
            rep.ic_argmin = (v, nu[arg]);
        }
    }
    rep
}
