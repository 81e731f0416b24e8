//! The numerical studies: uniform-prior comparison, contamination sweep and
//! approximation-guarantee curves.

use std::fmt::Write;

use dri_lp::{LinearProgram, Relation, Sense};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::two_point_worst_case;
use crate::distribution::GridDistribution;
use crate::error::{Error, Result};
use crate::grid::uniform_grid;
use crate::single_agent::{
    approx_mid_mu, approx_small_mu, clipped_linear_mechanism, linear_mechanism, maximal_payment_mechanism,
    PerfGuarantee, THREE_POINT_MAX, THREE_POINT_MIN,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalResult {
    pub nu: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub value: f64,
}

/// Revenue-optimal mechanism for a known one-dimensional prior, with IC
/// imposed between every pair of support points (zero-weight points
/// included).
pub fn nominal_optimal_lp(prior: &GridDistribution) -> Result<NominalResult> {
    if prior.dims() != 1 {
        return Err(Error::domain("nominal LP takes a one-dimensional prior"));
    }
    let mut atoms: Vec<(f64, f64)> = prior.support().iter().map(|p| p[0]).zip(prior.weights().iter().copied()).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = atoms.len();
    let (xv, pv) = (|i: usize| i, |i: usize| n + i);
    let mut lp = LinearProgram::new(2 * n, Sense::Maximize);
    for (i, &(_, w)) in atoms.iter().enumerate() {
        lp.set_bounds(xv(i), 0.0, 1.0);
        lp.set_free(pv(i));
        lp.set_objective(pv(i), w);
    }
    for (i, &(v, _)) in atoms.iter().enumerate() {
        for (h, &(vh, _)) in atoms.iter().enumerate() {
            if h == i {
                lp.add_row(&[(pv(i), 1.0), (xv(i), -v)], Relation::Le, 0.0);
            } else {
                lp.add_row(&[(pv(i), 1.0), (xv(i), -v), (xv(h), v)], Relation::Le, vh);
            }
        }
    }
    let sol = dri_lp::solve(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Numeric(format!("nominal LP ended {:?}", sol.status)));
    }
    Ok(NominalResult {
        nu: atoms.iter().map(|a| a.0).collect(),
        x: sol.primal[..n].to_vec(),
        p: sol.primal[n..].to_vec(),
        value: sol.objective,
    })
}

/// Best posted price against the uniform prior: scan thresholds `t` on a
/// grid, selling with probability `1 − t` at price `t`.
pub fn posted_price_uniform(g: usize) -> Result<(f64, f64)> {
    let grid = uniform_grid(g)?;
    Ok(grid
        .iter()
        .map(|&t| (t, t * (1.0 - t)))
        .fold((0.0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub rule: String,
    pub expected_payment: f64,
}

/// Grid size of the nominal benchmark in the uniform comparison.
pub const UNIFORM_NOMINAL_GRID: usize = 100;

/// Expected payment of each rule at `μ = 1/2` under the uniform prior.
pub fn uniform_comparison() -> Result<Vec<ComparisonRow>> {
    let row = |rule: &str, v: f64| ComparisonRow { rule: rule.into(), expected_payment: v };
    let nominal = nominal_optimal_lp(&GridDistribution::uniform(&uniform_grid(UNIFORM_NOMINAL_GRID)?)?)?;
    Ok(vec![
        row("posted_price", posted_price_uniform(1001)?.1),
        row("linear", linear_mechanism(0.5)?.payment.integral()),
        row("clipped_linear", clipped_linear_mechanism(0.5)?.payment.integral()),
        row("maximal", maximal_payment_mechanism(0.5)?.payment.integral()),
        row("nominal_optimal", nominal.value),
    ])
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("rule,expected_payment\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.4}", r.rule, r.expected_payment);
    }
    out
}

/// Places an atom at `v` on an ascending grid, splitting it across the two
/// bracketing points when it falls between them so the mean is unchanged.
pub fn split_atom(grid: &[f64], v: f64, mass: f64) -> Vec<(usize, f64)> {
    let k = grid.partition_point(|&g| g < v);
    if k < grid.len() && grid[k] == v {
        return vec![(k, mass)];
    }
    let (a, b) = (k - 1, k);
    let t = (v - grid[a]) / (grid[b] - grid[a]);
    vec![(a, mass * (1.0 - t)), (b, mass * t)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationPoint {
    pub eps: f64,
    pub nominal: f64,
    pub linear: f64,
    pub maximal: f64,
    pub optimal: f64,
    pub perf_nominal: f64,
    pub perf_linear: f64,
    pub perf_maximal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationRun {
    pub grid: usize,
    pub points: Vec<ContaminationPoint>,
    /// Contamination above which the maximal rule beats the nominal one.
    pub eps1: Option<f64>,
    /// Contamination above which the nominal rule trails both robust rules.
    pub eps2: Option<f64>,
}

/// Nominal prior (uniform on the grid) and worst case (two-point at mean
/// 1/2, mean-preserving on the grid).
pub fn contamination_priors(g: usize) -> Result<(GridDistribution, GridDistribution)> {
    let grid = uniform_grid(g)?;
    let nominal = GridDistribution::uniform(&grid)?;
    let w = two_point_worst_case(0.5)?;
    let mut weights = vec![0.0; g];
    for (p, &m) in w.support().iter().zip(w.weights()) {
        for (k, q) in split_atom(&grid, p[0], m) {
            weights[k] += q;
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|q| *q /= total);
    Ok((nominal, GridDistribution::univariate(&grid, &weights)?))
}

/// First sign change of `d` from negative to nonnegative, interpolated.
pub fn crossover(eps: &[f64], d: &[f64]) -> Option<f64> {
    (1..d.len()).find(|&k| d[k - 1] < 0.0 && d[k] >= 0.0).map(|k| {
        let t = d[k - 1] / (d[k - 1] - d[k]);
        eps[k - 1] + t * (eps[k] - eps[k - 1])
    })
}

/// Number of sign changes of a sequence (zeros are skipped).
pub fn sign_changes(d: &[f64]) -> usize {
    let signs: Vec<bool> = d.iter().filter(|v| **v != 0.0).map(|v| *v > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn contamination(g: usize, eps_steps: usize) -> Result<ContaminationRun> {
    if g < 10 {
        return Err(Error::domain(format!("contamination needs a grid of at least 10 points, got {g}")));
    }
    if eps_steps < 2 {
        return Err(Error::domain("contamination needs at least 2 ε steps"));
    }
    let (pn, pw) = contamination_priors(g)?;
    let nominal = nominal_optimal_lp(&pn)?;
    let lin = linear_mechanism(0.5)?;
    let max = maximal_payment_mechanism(0.5)?;
    let grid = uniform_grid(g)?;
    let lin_p = lin.payment.sample(&grid);
    let max_p = max.payment.sample(&grid);
    let eps: Vec<f64> = (0..eps_steps).map(|k| k as f64 / (eps_steps - 1) as f64).collect();
    let points: Vec<ContaminationPoint> = eps
        .par_iter()
        .map(|&e| {
            let prior = pn.mix(&pw, e)?;
            // Mixing keeps the grid order, so weights line up with `grid`.
            let w = prior.weights();
            let value = |pay: &[f64]| pay.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
            let optimal = nominal_optimal_lp(&prior)?.value;
            let (vn, vl, vm) = (value(&nominal.p), value(&lin_p), value(&max_p));
            Ok(ContaminationPoint {
                eps: e,
                nominal: vn,
                linear: vl,
                maximal: vm,
                optimal,
                perf_nominal: vn / optimal,
                perf_linear: vl / optimal,
                perf_maximal: vm / optimal,
            })
        })
        .collect::<Result<_>>()?;
    let d1: Vec<f64> = points.iter().map(|p| p.perf_maximal - p.perf_nominal).collect();
    let d2: Vec<f64> = points.iter().map(|p| p.perf_linear.min(p.perf_maximal) - p.perf_nominal).collect();
    Ok(ContaminationRun { grid: g, eps1: crossover(&eps, &d1), eps2: crossover(&eps, &d2), points })
}

impl ContaminationRun {
    pub fn csv(&self) -> String {
        let mut out = String::from("eps,perf_nominal,perf_linear,perf_maximal\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{},{}", p.eps, p.perf_nominal, p.perf_linear, p.perf_maximal);
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let last = self.points.last();
        serde_json::json!({
            "grid": self.grid,
            "eps_steps": self.points.len(),
            "eps1_maximal_beats_nominal": self.eps1,
            "eps2_nominal_below_both": self.eps2,
            "ratios_at_eps1": last.map(|p| serde_json::json!({
                "nominal": p.perf_nominal,
                "linear": p.perf_linear,
                "maximal": p.perf_maximal,
            })),
        })
        .to_string()
    }

    /// Line chart of the three performance ratios as standalone SVG.
    pub fn svg(&self) -> String {
        let (w, h, pad) = (640.0, 400.0, 48.0);
        let lo = self
            .points
            .iter()
            .flat_map(|p| [p.perf_nominal, p.perf_linear, p.perf_maximal])
            .fold(1.0_f64, f64::min)
            .min(0.9);
        let sx = |e: f64| pad + e * (w - 2.0 * pad);
        let sy = |r: f64| h - pad - (r - lo) / (1.0 - lo) * (h - 2.0 * pad);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <line x1=\"{pad}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
             <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{y0}\" stroke=\"black\"/>\n\
             <text x=\"{xm}\" y=\"{yl}\" font-size=\"12\" text-anchor=\"middle\">contamination ε</text>\n\
             <text x=\"4\" y=\"{pad}\" font-size=\"12\">{lo:.3}–1</text>\n",
            y0 = h - pad,
            x1 = w - pad,
            xm = w / 2.0,
            yl = h - 12.0,
        );
        let series: [(&str, &str, fn(&ContaminationPoint) -> f64); 3] = [
            ("nominal", "#1f77b4", |p| p.perf_nominal),
            ("linear", "#2ca02c", |p| p.perf_linear),
            ("maximal", "#d62728", |p| p.perf_maximal),
        ];
        for (k, (name, color, get)) in series.iter().enumerate() {
            let pts: Vec<String> = self.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.eps), sy(get(p)))).collect();
            let _ = writeln!(out, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>", pts.join(" "));
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{name}</text>",
                w - pad - 70.0,
                pad + 16.0 * (k as f64 + 1.0)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Guarantee of the applicable approximation at each μ.
pub fn guarantee_curves(mu_grid: &[f64]) -> Result<Vec<PerfGuarantee>> {
    mu_grid
        .iter()
        .map(|&mu| {
            if mu > 0.0 && mu < THREE_POINT_MIN {
                approx_small_mu(mu)
            } else if mu > THREE_POINT_MAX {
                approx_mid_mu(mu)
            } else {
                Err(Error::domain(format!(
                    "μ = {mu} is not covered by an approximation (use (0, {THREE_POINT_MIN}) or ({THREE_POINT_MAX}, μ′])"
                )))
            }
        })
        .collect()
}

/// Default μ grid: 50 points in each approximation window.
pub fn default_guarantee_grid() -> Vec<f64> {
    let mp = crate::single_agent::mu_prime().mu_prime;
    let small = (1..=50).map(|k| THREE_POINT_MIN * k as f64 / 51.0);
    let mid = (1..=50).map(move |k| THREE_POINT_MAX + (mp - THREE_POINT_MAX) * k as f64 / 50.0);
    small.chain(mid).collect()
}

pub fn guarantees_csv(rows: &[PerfGuarantee]) -> String {
    let mut out = String::from("mu,rho,c,b,z_approx\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.mu, r.rho, r.c, r.b, r.z_approx);
    }
    out
}
