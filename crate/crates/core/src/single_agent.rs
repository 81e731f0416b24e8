//! Closed-form robust mechanisms for a single agent with a known mean.
//!
//! For `μ ≥ μ′` the adversary's best reply is the two-point distribution on
//! `{μ/(2−μ), 1}`, and the linear payment `λ₁ν + λ₀` with `λ₁ = 2(z*/μ)²`,
//! `λ₀ = −z*²` attains the bound `z* = μ/(2−μ)`. For
//! `0.107 ≤ μ ≤ 0.25` a three-point worst case takes over. Outside both
//! windows only approximations with guarantees are available.

use std::sync::OnceLock;

use dri_lp::{LinearProgram, Relation, Sense};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::golden::scan_maximize;
use crate::grid::uniform_grid;
use crate::mechanism::{MechanismParams, Rule, SingleAgentMechanism};
use crate::moments::MomentSet;
use crate::piecewise::{Basis, PiecewiseFn};

/// Validity window of the three-point mechanism.
pub const THREE_POINT_MIN: f64 = 0.107;
pub const THREE_POINT_MAX: f64 = 0.25;

fn open_unit(mu: f64, what: &str) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} needs μ in (0, 1), got {mu}")))
    }
}

pub fn z_star(mu: f64) -> Result<f64> {
    open_unit(mu, "z_star")?;
    Ok(mu / (2.0 - mu))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuPrimeResult {
    pub z_prime: f64,
    pub t_star: f64,
    pub mu_prime: f64,
}

/// `t⁴ + 2t² − 6t + 3`, which factors as `(t − 1)(t³ + t² + 3t − 3)`.
pub fn mu_prime_radicand(t: f64) -> f64 {
    t.powi(4) + 2.0 * t * t - 6.0 * t + 3.0
}

/// Objective of the `μ′` program, `None` where the radicand is negative.
pub fn mu_prime_objective(t: f64) -> Option<f64> {
    let r = mu_prime_radicand(t);
    if r < 0.0 {
        return None;
    }
    Some(((3.0 * t * t - 2.0 * t) + t * (2.0 * r).sqrt()) / (2.0 - t * t))
}

/// Smallest mean for which the linear mechanism is optimal, computed once.
pub fn mu_prime() -> MuPrimeResult {
    static CELL: OnceLock<MuPrimeResult> = OnceLock::new();
    *CELL.get_or_init(compute_mu_prime)
}

fn compute_mu_prime() -> MuPrimeResult {
    // The radicand is positive at 0, turns negative before 1 and only
    // returns to zero at the isolated root t = 1. Search the component of
    // the feasible set that contains 0.
    let n = 10_000;
    let first_neg = (1..=n)
        .map(|k| k as f64 / n as f64)
        .find(|&t| mu_prime_radicand(t) < 0.0)
        .expect("radicand turns negative inside (0, 1)");
    let (mut a, mut b) = (first_neg - 1.0 / n as f64, first_neg);
    while b - a > 1e-15 {
        let m = 0.5 * (a + b);
        if mu_prime_radicand(m) >= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let t1 = a;
    let f = |t: f64| mu_prime_objective(t.clamp(0.0, t1)).unwrap_or(f64::NEG_INFINITY);
    let (t_star, z_prime) = scan_maximize(f, 0.0, t1, n, 1e-10);
    MuPrimeResult { z_prime, t_star, mu_prime: 2.0 * z_prime / (z_prime + 1.0) }
}

fn require_linear_window(mu: f64) -> Result<()> {
    let mp = mu_prime().mu_prime;
    if mu >= mp && mu < 1.0 {
        return Ok(());
    }
    if mu < mp && mu > 0.0 {
        return Err(Error::domain(format!(
            "μ = {mu} is below μ′ = {mp:.6}, where the linear mechanism stops being optimal; \
             use the three-point mechanism for {THREE_POINT_MIN} ≤ μ ≤ {THREE_POINT_MAX} \
             or the approximation guarantees otherwise"
        )));
    }
    Err(Error::domain(format!("linear mechanism needs μ in [μ′, 1), got {mu}")))
}

/// Parameters of the two-point family at `mu` (no window check).
pub fn linear_params(mu: f64) -> MechanismParams {
    let z = mu / (2.0 - mu);
    let l1 = 2.0 * (z / mu).powi(2);
    let l0 = -z * z;
    MechanismParams {
        mu,
        z_star: z,
        lambda1: l1,
        lambda0: l0,
        nu_low: mu * mu,
        nu_circ: z,
        nu_star: (mu * (2.0 - mu)).powi(2),
        nu_bar: l1 + l0,
        tau: None,
        nu_prime: None,
        nu_dprime: None,
    }
}

fn linear_allocation(p: &MechanismParams) -> Result<PiecewiseFn> {
    let (l1, l0, z, mu) = (p.lambda1, p.lambda0, p.z_star, p.mu);
    PiecewiseFn::from_pieces(
        &[p.nu_low, p.nu_circ, p.nu_bar],
        &[
            Basis::linear(0.0, l1 / (2.0 * mu * mu)),
            Basis { inv: l0, c0: l1, ..Basis::ZERO },
            Basis::linear(l1 - 2.0 * z, 1.0),
            Basis::constant(1.0),
        ],
    )
}

pub fn linear_mechanism(mu: f64) -> Result<SingleAgentMechanism> {
    require_linear_window(mu)?;
    let p = linear_params(mu);
    let x = linear_allocation(&p)?;
    SingleAgentMechanism::new(Rule::Linear, p, x, PiecewiseFn::linear(p.lambda0, p.lambda1))
}

fn clipped_payment(p: &MechanismParams, low_weight: f64) -> Result<PiecewiseFn> {
    let cut = -p.lambda0 / p.lambda1;
    let line = Basis::linear(p.lambda0, p.lambda1);
    let low = Basis::linear(low_weight * p.lambda0, low_weight * p.lambda1);
    PiecewiseFn::from_pieces(&[cut], &[low, line])
}

/// Same allocation, payment `max(λ₁ν + λ₀, 0)`.
pub fn clipped_linear_mechanism(mu: f64) -> Result<SingleAgentMechanism> {
    require_linear_window(mu)?;
    let p = linear_params(mu);
    SingleAgentMechanism::new(Rule::Clipped, p, linear_allocation(&p)?, clipped_payment(&p, 0.0)?)
}

/// `weight·linear + (1 − weight)·clipped`; every such mixture is robustly optimal.
pub fn blended_mechanism(mu: f64, weight: f64) -> Result<SingleAgentMechanism> {
    require_linear_window(mu)?;
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::domain(format!("blend weight {weight} is outside [0, 1]")));
    }
    let p = linear_params(mu);
    SingleAgentMechanism::new(
        Rule::Blended { weight },
        p,
        linear_allocation(&p)?,
        clipped_payment(&p, weight)?,
    )
}

/// Linear-mechanism allocation with the largest payment it supports at each type.
pub fn maximal_payment_mechanism(mu: f64) -> Result<SingleAgentMechanism> {
    require_linear_window(mu)?;
    let p = linear_params(mu);
    let (l1, l0, z) = (p.lambda1, p.lambda0, p.z_star);
    let pay = PiecewiseFn::from_pieces(
        &[p.nu_low, p.nu_circ, p.nu_star, p.nu_bar],
        &[
            Basis { c2: l1 / (2.0 * mu * mu), ..Basis::ZERO },
            Basis::linear(l0, l1),
            Basis { c1: l1 - 2.0 * z, c2: 1.0, ..Basis::ZERO },
            Basis { c1: -2.0 * z, c2: 1.0, sqrt: 2.0 * z, ..Basis::ZERO },
            Basis { c1: 1.0 - l1, sqrt: 2.0 * z, ..Basis::ZERO },
        ],
    )?;
    SingleAgentMechanism::new(Rule::Maximal, p, linear_allocation(&p)?, pay)
}

/// Worst-case payoff `(μ/3)(√δ + 1)²` of the three-point family, `δ = μ/(3 − μ)`.
pub fn three_point_value(mu: f64) -> f64 {
    let sd = (mu / (3.0 - mu)).sqrt();
    mu / 3.0 * (sd + 1.0).powi(2)
}

/// Parameters of the three-point family at `mu` (no window check).
pub fn three_point_params(mu: f64) -> Result<MechanismParams> {
    let d = mu / (3.0 - mu);
    let sd = d.sqrt();
    let l0 = -d * sd * (sd + 1.0);
    let l1 = (sd + 1.0).powi(2) / 3.0 - l0 / mu;
    let nu_low = -2.0 * l0 / l1;
    let nu_bar = l1 + l0;
    let nu_star = 2.0 - l1 - 2.0 * (1.0 - nu_bar).sqrt();
    let tau = l1 - nu_star + nu_bar - 1.0;
    let mut rad = l0 * l0 + tau * l0 * nu_star;
    if rad < -1e-12 {
        return Err(Error::Numeric(format!(
            "three-point parameters at μ = {mu}: ν° radicand {rad:e} is negative"
        )));
    }
    rad = rad.max(0.0);
    let nu_circ = (-l0 - rad.sqrt()) / tau;
    Ok(MechanismParams {
        mu,
        z_star: l1 * mu + l0,
        lambda1: l1,
        lambda0: l0,
        nu_low,
        nu_circ,
        nu_star,
        nu_bar,
        tau: Some(tau),
        nu_prime: Some(-nu_low * nu_low / l0),
        nu_dprime: Some(-nu_circ * nu_circ / l0),
    })
}

fn require_three_point_window(mu: f64) -> Result<()> {
    if (THREE_POINT_MIN..=THREE_POINT_MAX).contains(&mu) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "three-point mechanism needs μ in [{THREE_POINT_MIN}, {THREE_POINT_MAX}], got {mu}"
        )))
    }
}

fn three_point_allocation(p: &MechanismParams) -> Result<PiecewiseFn> {
    let (l1, l0) = (p.lambda1, p.lambda0);
    PiecewiseFn::from_pieces(
        &[p.nu_low, p.nu_circ, p.nu_star, p.nu_bar],
        &[
            Basis::linear(0.0, -l0 / (p.nu_low * p.nu_low)),
            Basis { inv: l0, c0: l1, ..Basis::ZERO },
            Basis::linear(l1 + 2.0 * l0 / p.nu_circ, -l0 / (p.nu_circ * p.nu_circ)),
            Basis::linear(1.0 - p.nu_bar, 1.0),
            Basis::constant(1.0),
        ],
    )
}

pub fn three_point_mechanism(mu: f64) -> Result<SingleAgentMechanism> {
    require_three_point_window(mu)?;
    let mut p = three_point_params(mu)?;
    p.nu_prime = None;
    p.nu_dprime = None;
    let x = three_point_allocation(&p)?;
    SingleAgentMechanism::new(Rule::ThreePoint, p, x, PiecewiseFn::linear(p.lambda0, p.lambda1))
}

pub fn three_point_maximal(mu: f64) -> Result<SingleAgentMechanism> {
    require_three_point_window(mu)?;
    let p = three_point_params(mu)?;
    let (l1, l0) = (p.lambda1, p.lambda0);
    let (np, ndp) = (p.nu_prime.unwrap(), p.nu_dprime.unwrap());
    if !(np <= ndp && ndp <= p.nu_bar) {
        return Err(Error::Numeric(format!(
            "three-point maximal payment at μ = {mu}: ν′ = {np}, ν″ = {ndp}, ν̄ = {} out of order",
            p.nu_bar
        )));
    }
    let x = three_point_allocation(&p)?;
    let nu_x = x.times_nu()?;
    let tail = PiecewiseFn::from_pieces(
        &[ndp, p.nu_bar],
        &[
            Basis { c1: 1.0 - p.nu_bar - l1, c2: 1.0, sqrt: 2.0 * (-l0).sqrt(), ..Basis::ZERO },
            Basis { c0: p.nu_star, c1: -p.nu_star, c2: 1.0, ..Basis::ZERO },
            Basis::linear(p.nu_star, p.nu_bar - p.nu_star),
        ],
    )?;
    let pay = PiecewiseFn::splice(&[(0.0, &nu_x), (np, &tail)])?;
    SingleAgentMechanism::new(Rule::ThreePointMaximal, p, x, pay)
}

/// Largest IC payment supported by the allocation on a grid:
/// `p(ν) = min_{ν̂ ≤ ν} ν(x(ν) − x(ν̂)) + ν̂`. Returns grid and payments.
pub fn recover_maximal_payment(x: &PiecewiseFn, g: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let nu = uniform_grid(g)?;
    let xs = x.sample(&nu);
    for k in 1..g {
        if xs[k] < xs[k - 1] - 1e-12 {
            return Err(Error::domain(format!(
                "allocation decreases between ν = {} ({}) and ν = {} ({})",
                nu[k - 1],
                xs[k - 1],
                nu[k],
                xs[k]
            )));
        }
    }
    let p = (0..g)
        .map(|k| {
            (0..=k)
                .map(|h| nu[k] * (xs[k] - xs[h]) + nu[h])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok((nu, p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierResult {
    /// `λ₀, …, λ_N`.
    pub lambda: Vec<f64>,
    pub nu: Vec<f64>,
    pub x: Vec<f64>,
    pub value: f64,
}

/// Discretized moment-frontier program: maximise `Σ λ_i k_i` over
/// polynomials `Σ λ_i ν^i` lying below the IC payment bound of some grid
/// allocation `0 ≤ x ≤ 1`.
pub fn moment_frontier_lp(k: &MomentSet, g: usize) -> Result<FrontierResult> {
    if k.agents() != 1 {
        return Err(Error::domain("frontier LP is single-agent"));
    }
    if g < 3 {
        return Err(Error::domain(format!("frontier LP needs a grid of at least 3 points, got {g}")));
    }
    let nu = uniform_grid(g)?;
    let n = k.order();
    // Variables: λ₀..λ_N, then x over the grid.
    let xv = |i: usize| n + 1 + i;
    let mut lp = LinearProgram::new(n + 1 + g, Sense::Maximize);
    lp.set_free(0);
    lp.set_objective(0, 1.0);
    for (i, &m) in k.moments().iter().enumerate() {
        lp.set_free(i + 1);
        lp.set_objective(i + 1, m);
    }
    for i in 0..g {
        lp.set_bounds(xv(i), 0.0, 1.0);
    }
    let mut terms = Vec::with_capacity(n + 3);
    for (a, &v) in nu.iter().enumerate() {
        for (h, &vh) in nu.iter().enumerate().take(a + 1) {
            terms.clear();
            let mut pw = 1.0;
            for i in 0..=n {
                terms.push((i, pw));
                pw *= v;
            }
            if h != a && v != 0.0 {
                terms.push((xv(a), -v));
                terms.push((xv(h), v));
            }
            lp.add_row(&terms, Relation::Le, vh);
        }
    }
    let sol = dri_lp::solve(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Numeric(format!(
            "frontier LP (N = {n}, G = {g}) ended {:?}",
            sol.status
        )));
    }
    let lambda = sol.primal[..=n].to_vec();
    if lambda[0] > 1e-9 {
        return Err(Error::Numeric(format!("frontier LP returned λ₀ = {} > 0", lambda[0])));
    }
    Ok(FrontierResult {
        lambda,
        x: sol.primal[n + 1..].to_vec(),
        nu,
        value: sol.objective,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfGuarantee {
    pub mu: f64,
    pub z_approx: f64,
    pub b: f64,
    pub rho: f64,
    pub c: f64,
}

/// Upper bound on the optimal worst-case payoff: the smaller of the two-
/// and three-point adversaries' values.
pub fn upper_bound_b(mu: f64) -> f64 {
    (mu / (2.0 - mu)).min(three_point_value(mu))
}

fn guarantee(mu: f64, z: f64) -> PerfGuarantee {
    let b = upper_bound_b(mu);
    PerfGuarantee { mu, z_approx: z, b, rho: z / b, c: b - z }
}

/// Guarantee of the three-point mechanism built for `μ* = 0.107` when the
/// true mean is below it.
pub fn approx_small_mu(mu: f64) -> Result<PerfGuarantee> {
    if !(mu > 0.0 && mu < THREE_POINT_MIN) {
        return Err(Error::domain(format!("small-μ approximation needs μ in (0, {THREE_POINT_MIN}), got {mu}")));
    }
    let p = three_point_params(THREE_POINT_MIN)?;
    let z = if mu <= p.nu_low {
        mu * (-p.lambda0 / (p.nu_low * p.nu_low)) * mu
    } else {
        p.lambda1 * mu + p.lambda0
    };
    Ok(guarantee(mu, z))
}

/// Guarantee of the linear mechanism built for `μ′` when the true mean lies
/// in `(0.25, μ′]`.
pub fn approx_mid_mu(mu: f64) -> Result<PerfGuarantee> {
    let mp = mu_prime().mu_prime;
    if !(mu > THREE_POINT_MAX && mu <= mp) {
        return Err(Error::domain(format!(
            "mid-range approximation needs μ in ({THREE_POINT_MAX}, μ′ = {mp:.6}], got {mu}"
        )));
    }
    let p = linear_params(mp);
    Ok(guarantee(mu, p.lambda1 * mu + p.lambda0))
}
