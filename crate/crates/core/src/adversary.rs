//! The adversary's side: worst-case distributions and worst-case values.

use dri_lp::{LinearProgram, Relation, Sense};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::GridDistribution;
use crate::error::{Error, Result};
use crate::golden::{maximize, minimize};
use crate::moments::MomentSet;

/// Largest mean for which the three-point support stays inside `[0, 1]`.
pub fn three_point_mu_max() -> f64 {
    (15.0 - 3.0 * 5f64.sqrt()) / 10.0
}

/// `{μ/(2−μ)` w.p. `1 − μ/2`, `1` w.p. `μ/2}`.
pub fn two_point_worst_case(mu: f64) -> Result<GridDistribution> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain(format!("two-point worst case needs μ in (0, 1), got {mu}")));
    }
    GridDistribution::univariate(&[mu / (2.0 - mu), 1.0], &[1.0 - mu / 2.0, mu / 2.0])
}

/// Support `{δ(√δ+1), √δ(√δ+1), 1}` with weights `{μ/(3ν̲), μ/(3ν̄), μ/3}`.
pub fn three_point_worst_case(mu: f64) -> Result<GridDistribution> {
    let top = three_point_mu_max();
    if !(mu > 0.0 && mu <= top) {
        return Err(Error::domain(format!(
            "three-point worst case needs μ in (0, {top:.6}], got {mu}"
        )));
    }
    let d = mu / (3.0 - mu);
    let sd = d.sqrt();
    let lo = d * (sd + 1.0);
    let mid = sd * (sd + 1.0);
    let w = [mu / (3.0 * lo), mu / (3.0 * mid), mu / 3.0];
    GridDistribution::univariate(&[lo, mid, 1.0], &w)
}

/// Minimises `E[p(ν)]` over distributions on the grid `nu` matching the
/// moments; returns the value and a minimising distribution.
pub fn worst_case_value(nu: &[f64], p: &[f64], k: &MomentSet) -> Result<(f64, GridDistribution)> {
    if nu.len() != p.len() || nu.is_empty() {
        return Err(Error::domain("payment samples and grid differ in length"));
    }
    if let Some(i) = p.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(format!("payment at ν = {} is not finite", nu[i])));
    }
    if k.agents() != 1 {
        return Err(Error::domain("worst_case_value is single-agent"));
    }
    let g = nu.len();
    let mut lp = LinearProgram::new(g, Sense::Minimize);
    for (i, &v) in p.iter().enumerate() {
        lp.set_objective(i, v);
    }
    let ones: Vec<(usize, f64)> = (0..g).map(|i| (i, 1.0)).collect();
    lp.add_row(&ones, Relation::Eq, 1.0);
    for (order, &m) in k.moments().iter().enumerate() {
        let terms: Vec<(usize, f64)> = nu.iter().enumerate().map(|(i, v)| (i, v.powi(order as i32 + 1))).collect();
        lp.add_row(&terms, Relation::Eq, m);
    }
    let sol = dri_lp::solve(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::domain(format!(
            "moments {:?} are not attainable on the {g}-point grid",
            k.moments()
        )));
    }
    let atoms: Vec<(f64, f64)> = nu
        .iter()
        .zip(&sol.primal)
        .filter(|(_, &q)| q > 1e-12)
        .map(|(&v, &q)| (v, q))
        .collect();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let points: Vec<f64> = atoms.iter().map(|a| a.0).collect();
    let weights: Vec<f64> = atoms.iter().map(|a| a.1 / total).collect();
    Ok((sol.objective, GridDistribution::univariate(&points, &weights)?))
}

/// Lower convex hull of `(nu, p)` (sorted by `nu`), as vertex indices.
pub fn lower_hull(nu: &[f64], p: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..nu.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b if it lies on or above the chord a–i.
            let cross = (nu[b] - nu[a]) * (p[i] - p[a]) - (p[b] - p[a]) * (nu[i] - nu[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Value at `mu` of the greatest convex minorant of the sampled payment;
/// equals the mean-only worst case over distributions on the grid.
pub fn convex_envelope_value(nu: &[f64], p: &[f64], mu: f64) -> Result<f64> {
    if nu.len() != p.len() || nu.is_empty() {
        return Err(Error::domain("payment samples and grid differ in length"));
    }
    if !(nu[0] <= mu && mu <= nu[nu.len() - 1]) {
        return Err(Error::domain(format!("μ = {mu} is outside the grid range")));
    }
    let hull = lower_hull(nu, p);
    let k = hull.partition_point(|&i| nu[i] <= mu);
    if k == hull.len() {
        return Ok(p[hull[k - 1]]);
    }
    let (a, b) = (hull[k - 1], hull[k]);
    let t = (mu - nu[a]) / (nu[b] - nu[a]);
    Ok(p[a] + t * (p[b] - p[a]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoAgentWorstCase {
    pub mu: f64,
    pub r: f64,
    pub nu_star: f64,
    pub beta: f64,
    pub f_mu: f64,
    pub distribution: GridDistribution,
}

/// Positive root `ν*(r)` of `rν² + (2r + 3 − 2μ)ν − μ(r + 1/r + 2) = 0`.
pub fn two_agent_root(mu: f64, r: f64) -> f64 {
    let b = 2.0 * r + 3.0 - 2.0 * mu;
    let c = -mu * (r + 1.0 / r + 2.0);
    // c < 0 < b: the cancellation-free form of the positive root.
    -2.0 * c / (b + (b * b - 4.0 * r * c).sqrt())
}

/// `2βν*(r² + 3r/2 + ν* + 1)` with `β = 1/(2ν* + r + 1/r + 2)`; `None` when
/// `ν*(r)` leaves `[0, 1]`.
pub fn two_agent_objective(mu: f64, r: f64) -> Option<(f64, f64, f64)> {
    let v = two_agent_root(mu, r);
    if !(0.0..=1.0).contains(&v) {
        return None;
    }
    let beta = 1.0 / (2.0 * v + r + 1.0 / r + 2.0);
    Some((2.0 * beta * v * (r * r + 1.5 * r + v + 1.0), v, beta))
}

const R_SCAN: usize = 4000;

pub fn two_agent_worst_case(mu: f64) -> Result<TwoAgentWorstCase> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain(format!("two-agent worst case needs μ in (0, 1), got {mu}")));
    }
    let obj = |r: f64| two_agent_objective(mu, r).map_or(f64::INFINITY, |t| t.0);
    let h = 1.0 / R_SCAN as f64;
    let (mut best_k, mut best) = (0, f64::INFINITY);
    for k in 1..=R_SCAN {
        let v = obj(k as f64 * h);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    if !best.is_finite() {
        return Err(Error::Numeric(format!("no r in (0, 1] gives ν* in [0, 1] at μ = {mu}")));
    }
    let lo = ((best_k - 1) as f64 * h).max(h * 1e-3);
    let hi = ((best_k + 1) as f64 * h).min(1.0);
    let (mut r, v) = minimize(obj, lo, hi, 1e-9);
    if v > best {
        r = best_k as f64 * h;
    }
    let (f_mu, v, beta) = two_agent_objective(mu, r).expect("refined r stays feasible");
    let (a, b) = (r * v, v);
    let support = vec![
        vec![a, a],
        vec![b, a],
        vec![a, b],
        vec![b, b],
        vec![1.0, a],
        vec![a, 1.0],
    ];
    let weights = vec![beta / r, beta, beta, beta * r, beta * v, beta * v];
    let distribution = GridDistribution::new(2, support, weights)?;
    Ok(TwoAgentWorstCase { mu, r, nu_star: v, beta, f_mu, distribution })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub mu: f64,
    pub f: f64,
    /// `min{f(μ), μ}`.
    pub g: f64,
    /// Greatest convex minorant of `g` anchored at `(1, 1)`.
    pub hull: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoAgentBound {
    pub curve: Vec<BoundPoint>,
    pub mu_dprime: f64,
    pub f_dprime: f64,
    /// Slope of the tangent through `(1, 1)`.
    pub slope: f64,
}

/// Convexified two-agent upper bound along an ascending `mu_grid`.
pub fn two_agent_upper_bound(mu_grid: &[f64]) -> Result<TwoAgentBound> {
    if mu_grid.is_empty() || mu_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("μ grid must be nonempty and strictly ascending"));
    }
    if mu_grid.iter().any(|&m| !(m > 0.0 && m < 1.0)) {
        return Err(Error::domain("μ grid must lie inside (0, 1)"));
    }
    let fs: Vec<f64> = mu_grid
        .par_iter()
        .map(|&m| two_agent_worst_case(m).map(|w| w.f_mu))
        .collect::<Result<_>>()?;
    let gs: Vec<f64> = mu_grid.iter().zip(&fs).map(|(&m, &f)| f.min(m)).collect();

    // Tangent from (1, 1): the steepest slope (1 − g)/(1 − μ) over the grid,
    // then refined between the neighbouring grid points.
    let slope_at = |m: f64| {
        let f = two_agent_worst_case(m).map_or(m, |w| w.f_mu);
        (1.0 - f.min(m)) / (1.0 - m)
    };
    let k = (0..mu_grid.len())
        .max_by(|&a, &b| {
            let sa = (1.0 - gs[a]) / (1.0 - mu_grid[a]);
            let sb = (1.0 - gs[b]) / (1.0 - mu_grid[b]);
            sa.total_cmp(&sb)
        })
        .expect("nonempty grid");
    let lo = if k > 0 { mu_grid[k - 1] } else { mu_grid[0] };
    let hi = mu_grid.get(k + 1).copied().unwrap_or(mu_grid[k]);
    let (mut mu_dprime, mut slope) = maximize(slope_at, lo, hi, 1e-10);
    let grid_slope = (1.0 - gs[k]) / (1.0 - mu_grid[k]);
    if grid_slope > slope {
        mu_dprime = mu_grid[k];
        slope = grid_slope;
    }
    let f_dprime = 1.0 - slope * (1.0 - mu_dprime);

    // Greatest convex minorant of the sampled g together with the anchor.
    let mut xs = mu_grid.to_vec();
    let mut ys = gs.clone();
    xs.push(1.0);
    ys.push(1.0);
    let hull = lower_hull(&xs, &ys);
    let curve = mu_grid
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let j = hull.partition_point(|&h| xs[h] <= m);
            let hv = if j == hull.len() {
                ys[hull[j - 1]]
            } else {
                let (a, b) = (hull[j - 1], hull[j]);
                ys[a] + (m - xs[a]) / (xs[b] - xs[a]) * (ys[b] - ys[a])
            };
            BoundPoint { mu: m, f: fs[i], g: gs[i], hull: hv.min(gs[i]) }
        })
        .collect();
    Ok(TwoAgentBound { curve, mu_dprime, f_dprime, slope })
}

/// Default sweep `0.01, 0.02, …, 0.99` used to locate `μ″`.
pub fn default_mu_sweep() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

/// `(μ″, f(μ″))` on the default sweep.
pub fn mu_dprime() -> Result<(f64, f64)> {
    let b = two_agent_upper_bound(&default_mu_sweep())?;
    Ok((b.mu_dprime, b.f_dprime))
}

/// With three or more agents the Dirac distribution at the mean is the
/// adversary's best reply and the bound is `μ` itself.
pub fn dirac_bound(mu: f64, agents: usize) -> Result<f64> {
    if agents < 3 {
        return Err(Error::domain(format!("Dirac bound needs at least 3 agents, got {agents}")));
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain(format!("Dirac bound needs μ in (0, 1), got {mu}")));
    }
    Ok(mu)
}
