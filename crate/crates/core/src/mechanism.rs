use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::uniform_grid;
use crate::piecewise::PiecewiseFn;

/// Which closed-form construction produced a mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Rule {
    Linear,
    Clipped,
    /// `weight·linear + (1 − weight)·clipped`.
    Blended { weight: f64 },
    Maximal,
    ThreePoint,
    ThreePointMaximal,
}

impl Rule {
    /// True for the rules built on the two-point worst case.
    pub fn two_point_family(&self) -> bool {
        !matches!(self, Rule::ThreePoint | Rule::ThreePointMaximal)
    }
}

/// Parameter block of a closed-form mechanism. `tau` is set for the
/// three-point family, `nu_prime`/`nu_dprime` for its maximal variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismParams {
    pub mu: f64,
    pub z_star: f64,
    pub lambda1: f64,
    pub lambda0: f64,
    pub nu_low: f64,
    pub nu_circ: f64,
    pub nu_star: f64,
    pub nu_bar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_dprime: Option<f64>,
}

impl MechanismParams {
    /// `0 ≤ ν̲ ≤ ν° ≤ ν* ≤ ν̄ ≤ 1`.
    pub fn breakpoints_ordered(&self) -> bool {
        let b = [0.0, self.nu_low, self.nu_circ, self.nu_star, self.nu_bar, 1.0];
        b.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Allocation `x` and net payment `p` of a single-agent mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleAgentMechanism {
    pub rule: Rule,
    pub params: MechanismParams,
    pub allocation: PiecewiseFn,
    pub payment: PiecewiseFn,
}

/// Points used to check allocation bounds.
pub const CHECK_GRID: usize = 2001;

impl SingleAgentMechanism {
    /// Wraps the parts after checking `0 ≤ x ≤ 1` on the check grid.
    /// Incentive constraints are the verifier's business, not the constructor's.
    pub fn new(rule: Rule, params: MechanismParams, allocation: PiecewiseFn, payment: PiecewiseFn) -> Result<Self> {
        for v in uniform_grid(CHECK_GRID)? {
            let x = allocation.at(v);
            if !(-1e-9..=1.0 + 1e-9).contains(&x) {
                return Err(Error::invariant(format!("allocation {x} at ν = {v} leaves [0, 1]")));
            }
        }
        Ok(Self { rule, params, allocation, payment })
    }
}
