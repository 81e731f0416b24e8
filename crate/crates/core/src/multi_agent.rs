//! Discretized robust mechanisms for two and three symmetric agents.
//!
//! Scenarios `s` enumerate the grid profiles `(ν_1, …, ν_J)` in row-major
//! order (agent 1 most significant). Per scenario and agent there are three
//! variables: allocation `x`, payment `p` and maximal payment `p_m`, stored
//! agent-major within a scenario at offsets `0`, `S·J` and `2·S·J`.
//!
//! Row census for `J` agents on `G` grid points (`S = G^J`):
//!
//! | block | rows |
//! |---|---|
//! | DS-IC for `p` and `p_m` | `2·J·S·(G−1)` |
//! | EP-IR for `p` and `p_m` | `2·J·S` |
//! | `Σ_j x_j ≤ 1` | `S` |
//! | aggregate equality, `Σ p_m ≥ Σ p` | `S` each |
//! | symmetry, per variable kind and transposition `(1 k)` | `(J·S − (J−2)·G^{J−1})/2` |
//! | monotone along own axis | `J·G^{J−1}·(G−1)` |
//! | monotone along another axis | `J·(J−1)·G^{J−1}·(G−1)` |
//! | zero payment at zero type | `J·G^{J−1}` |
//! | payment increasing in a rival's type at the top | `J·(J−1)·G^{J−2}·(G−2)` |

use std::fmt::Write;

use dri_lp::{LinearProgram, LpStatus, Relation, Sense};
use serde::{Deserialize, Serialize};

use crate::adversary;
use crate::error::{Error, Result};
use crate::grid::uniform_grid;
use crate::io::parse_error;

/// Default cap on constraint nonzeros accepted by [`build_lp`].
pub const DEFAULT_NNZ_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub aggregate_polynomial_equality: bool,
    pub symmetry: bool,
    pub x_monotone_own_up: bool,
    pub x_monotone_other_down: bool,
    pub p_monotone_own_up: bool,
    /// Known to make the two-agent program infeasible.
    pub p_monotone_other_down: bool,
    pub p_zero_at_zero_type: bool,
    pub p_increasing_in_nu2_at_top: bool,
}

impl ConstraintSet {
    pub const NAMES: [&'static str; 8] = [
        "aggregate_polynomial_equality",
        "symmetry",
        "x_monotone_own_up",
        "x_monotone_other_down",
        "p_monotone_own_up",
        "p_monotone_other_down",
        "p_zero_at_zero_type",
        "p_increasing_in_nu2_at_top",
    ];

    /// The constraint set behind the published two- and three-agent tables.
    pub fn published(agents: usize) -> Self {
        let base = ConstraintSet {
            aggregate_polynomial_equality: true,
            symmetry: true,
            x_monotone_own_up: true,
            x_monotone_other_down: true,
            p_monotone_own_up: true,
            ..Default::default()
        };
        if agents >= 3 {
            ConstraintSet { p_zero_at_zero_type: true, p_increasing_in_nu2_at_top: true, ..base }
        } else {
            base
        }
    }

    fn slots(&mut self) -> [&mut bool; 8] {
        [
            &mut self.aggregate_polynomial_equality,
            &mut self.symmetry,
            &mut self.x_monotone_own_up,
            &mut self.x_monotone_other_down,
            &mut self.p_monotone_own_up,
            &mut self.p_monotone_other_down,
            &mut self.p_zero_at_zero_type,
            &mut self.p_increasing_in_nu2_at_top,
        ]
    }

    pub fn names(&self) -> Vec<String> {
        let mut copy = *self;
        Self::NAMES
            .iter()
            .zip(copy.slots())
            .filter(|(_, on)| **on)
            .map(|(n, _)| n.to_string())
            .collect()
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut cs = ConstraintSet::default();
        for name in names {
            let name = name.as_ref();
            let k = Self::NAMES
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| Error::domain(format!("unknown constraint flag {name:?}; known: {}", Self::NAMES.join(", "))))?;
            *cs.slots()[k] = true;
        }
        Ok(cs)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub ds_ic: usize,
    pub ep_ir: usize,
    pub allocation: usize,
    pub aggregate: usize,
    pub dominance: usize,
    pub symmetry: usize,
    pub monotone: usize,
    pub p_zero: usize,
    pub p_top: usize,
}

impl Census {
    pub fn total(&self) -> usize {
        self.ds_ic + self.ep_ir + self.allocation + self.aggregate + self.dominance + self.symmetry + self.monotone + self.p_zero + self.p_top
    }

    /// Closed-form row counts for `agents` on a `g`-point grid.
    pub fn expected(agents: usize, g: usize, cs: &ConstraintSet) -> Self {
        let j = agents;
        let s = g.pow(j as u32);
        let face = g.pow(j as u32 - 1);
        let on = |b: bool, v: usize| if b { v } else { 0 };
        let own = j * face * (g - 1);
        let other = j * (j - 1) * face * (g - 1);
        Census {
            ds_ic: 2 * j * s * (g - 1),
            ep_ir: 2 * j * s,
            allocation: s,
            aggregate: on(cs.aggregate_polynomial_equality, s),
            dominance: on(cs.aggregate_polynomial_equality, s),
            symmetry: on(cs.symmetry, 3 * (j - 1) * (j * s - (j - 2) * face) / 2),
            monotone: on(cs.x_monotone_own_up, own)
                + on(cs.x_monotone_other_down, other)
                + on(cs.p_monotone_own_up, own)
                + on(cs.p_monotone_other_down, other),
            p_zero: on(cs.p_zero_at_zero_type, j * face),
            p_top: on(cs.p_increasing_in_nu2_at_top, j * (j - 1) * g.pow(j as u32 - 2) * (g - 2)),
        }
    }
}

/// Scenario indexing for `agents` on a `g`-point grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub agents: usize,
    pub grid: usize,
    pub scenarios: usize,
}

impl Layout {
    pub fn new(agents: usize, grid: usize) -> Self {
        Self { agents, grid, scenarios: grid.pow(agents as u32) }
    }

    pub fn coords(&self, mut s: usize) -> Vec<usize> {
        let mut c = vec![0; self.agents];
        for k in (0..self.agents).rev() {
            c[k] = s % self.grid;
            s /= self.grid;
        }
        c
    }

    pub fn index(&self, c: &[usize]) -> usize {
        c.iter().fold(0, |s, &v| s * self.grid + v)
    }

    /// Scenario reached from `s` by moving agent `k` by `delta` grid steps.
    pub fn shift(&self, s: usize, k: usize, to: usize) -> usize {
        let mut c = self.coords(s);
        c[k] = to;
        self.index(&c)
    }

    pub fn x(&self, s: usize, j: usize) -> usize {
        s * self.agents + j
    }

    pub fn p(&self, s: usize, j: usize) -> usize {
        self.scenarios * self.agents + s * self.agents + j
    }

    pub fn pm(&self, s: usize, j: usize) -> usize {
        2 * self.scenarios * self.agents + s * self.agents + j
    }
}

#[derive(Debug, Clone)]
pub struct MultiAgentLp {
    pub lp: LinearProgram,
    pub layout: Layout,
    pub census: Census,
    pub lambda1: f64,
    pub lambda0: f64,
    pub flags: ConstraintSet,
}

fn check_shape(agents: usize, g: usize) -> Result<()> {
    if !(2..=3).contains(&agents) {
        return Err(Error::domain(format!("multi-agent programs support 2 or 3 agents, got {agents}")));
    }
    if g < 4 {
        return Err(Error::domain(format!("multi-agent programs need a grid of at least 4 points, got {g}")));
    }
    Ok(())
}

/// Upper estimate of constraint nonzeros, used by the size guard.
pub fn estimate_nnz(agents: usize, g: usize, cs: &ConstraintSet) -> usize {
    let c = Census::expected(agents, g, cs);
    3 * c.ds_ic + 2 * c.ep_ir + agents * (c.allocation + c.aggregate) + 2 * agents * c.dominance + 2 * (c.symmetry + c.monotone + c.p_top) + c.p_zero
}

pub fn build_lp(agents: usize, g: usize, lambda1: f64, lambda0: f64, cs: &ConstraintSet) -> Result<MultiAgentLp> {
    build_lp_capped(agents, g, lambda1, lambda0, cs, DEFAULT_NNZ_CAP)
}

pub fn build_lp_capped(
    agents: usize,
    g: usize,
    lambda1: f64,
    lambda0: f64,
    cs: &ConstraintSet,
    cap: usize,
) -> Result<MultiAgentLp> {
    check_shape(agents, g)?;
    if !(lambda1.is_finite() && lambda0.is_finite()) {
        return Err(Error::domain("λ coefficients must be finite"));
    }
    let nnz = estimate_nnz(agents, g, cs);
    if nnz > cap {
        return Err(Error::TooLarge { nnz, cap });
    }
    let lay = Layout::new(agents, g);
    let nu = uniform_grid(g)?;
    let (n_s, jn) = (lay.scenarios, agents);
    let mut lp = LinearProgram::new(3 * n_s * jn, Sense::Maximize);
    let mut census = Census::default();
    for s in 0..n_s {
        for j in 0..jn {
            lp.set_bounds(lay.x(s, j), 0.0, 1.0);
            lp.set_free(lay.p(s, j));
            lp.set_free(lay.pm(s, j));
            lp.set_objective(lay.pm(s, j), 1.0);
        }
    }
    let payments: [fn(&Layout, usize, usize) -> usize; 2] = [Layout::p, Layout::pm];
    let mut terms: Vec<(usize, f64)> = Vec::with_capacity(8);
    for s in 0..n_s {
        let c = lay.coords(s);
        for j in 0..jn {
            let v = nu[c[j]];
            for pay in payments {
                for (h, &vh) in nu.iter().enumerate() {
                    if h == c[j] {
                        continue;
                    }
                    let t = lay.shift(s, j, h);
                    terms.clear();
                    terms.push((pay(&lay, s, j), 1.0));
                    if v != 0.0 {
                        terms.push((lay.x(s, j), -v));
                        terms.push((lay.x(t, j), v));
                    }
                    lp.add_row(&terms, Relation::Le, vh);
                    census.ds_ic += 1;
                }
                terms.clear();
                terms.push((pay(&lay, s, j), 1.0));
                if v != 0.0 {
                    terms.push((lay.x(s, j), -v));
                }
                lp.add_row(&terms, Relation::Le, 0.0);
                census.ep_ir += 1;
            }
        }
        let alloc: Vec<(usize, f64)> = (0..jn).map(|j| (lay.x(s, j), 1.0)).collect();
        lp.add_row(&alloc, Relation::Le, 1.0);
        census.allocation += 1;
        if cs.aggregate_polynomial_equality {
            let total: f64 = c.iter().map(|&i| nu[i]).sum();
            let pay: Vec<(usize, f64)> = (0..jn).map(|j| (lay.p(s, j), 1.0)).collect();
            lp.add_row(&pay, Relation::Eq, lambda1 * total + lambda0);
            census.aggregate += 1;
            let mut dom: Vec<(usize, f64)> = (0..jn).map(|j| (lay.pm(s, j), 1.0)).collect();
            dom.extend((0..jn).map(|j| (lay.p(s, j), -1.0)));
            lp.add_row(&dom, Relation::Ge, 0.0);
            census.dominance += 1;
        }
    }

    if cs.symmetry {
        let kinds: [fn(&Layout, usize, usize) -> usize; 3] = [Layout::x, Layout::p, Layout::pm];
        for k in 1..jn {
            let swap = |j: usize| if j == 0 { k } else if j == k { 0 } else { j };
            for kind in kinds {
                for s in 0..n_s {
                    let mut c = lay.coords(s);
                    c.swap(0, k);
                    let t = lay.index(&c);
                    for j in 0..jn {
                        let (a, b) = (kind(&lay, s, j), kind(&lay, t, swap(j)));
                        if a < b {
                            lp.add_row(&[(a, 1.0), (b, -1.0)], Relation::Eq, 0.0);
                            census.symmetry += 1;
                        }
                    }
                }
            }
        }
    }

    for s in 0..n_s {
        let c = lay.coords(s);
        for j in 0..jn {
            for k in 0..jn {
                if c[k] + 1 >= g {
                    continue;
                }
                let up = lay.shift(s, k, c[k] + 1);
                let mut mono = |var: fn(&Layout, usize, usize) -> usize, increasing: bool| {
                    let (lo, hi) = (var(&lay, s, j), var(&lay, up, j));
                    let row = if increasing { [(lo, 1.0), (hi, -1.0)] } else { [(hi, 1.0), (lo, -1.0)] };
                    lp.add_row(&row, Relation::Le, 0.0);
                    census.monotone += 1;
                };
                if k == j {
                    if cs.x_monotone_own_up {
                        mono(Layout::x, true);
                    }
                    if cs.p_monotone_own_up {
                        mono(Layout::p, true);
                    }
                } else {
                    if cs.x_monotone_other_down {
                        mono(Layout::x, false);
                    }
                    if cs.p_monotone_other_down {
                        mono(Layout::p, false);
                    }
                    // Rival steps strictly below the top only.
                    if cs.p_increasing_in_nu2_at_top && c[j] == g - 1 && c[k] + 1 < g - 1 {
                        lp.add_row(&[(lay.p(s, j), 1.0), (lay.p(up, j), -1.0)], Relation::Le, 0.0);
                        census.p_top += 1;
                    }
                }
            }
            if cs.p_zero_at_zero_type && c[j] == 0 {
                lp.add_row(&[(lay.p(s, j), 1.0)], Relation::Eq, 0.0);
                census.p_zero += 1;
            }
        }
    }
    Ok(MultiAgentLp { lp, layout: lay, census, lambda1, lambda0, flags: *cs })
}

/// Where the λ pair of the aggregate payment polynomial comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MuContext {
    /// Tangency point `μ″` of the two-agent bound and `f(μ″)`.
    TwoAgent { mu_dprime: f64, f_dprime: f64 },
    /// Three agents: the pair is fixed at `(1/3, 0)` for every mean.
    ThreeAgent,
}

impl MuContext {
    /// Two-agent context computed from the adversary on the default sweep.
    pub fn two_agent_default() -> Result<Self> {
        let (mu_dprime, f_dprime) = adversary::mu_dprime()?;
        Ok(MuContext::TwoAgent { mu_dprime, f_dprime })
    }

    /// Solves `J·λ₁·μ + λ₀ = value` and `J·λ₁ + λ₀ = 1`.
    pub fn lambdas(&self, agents: usize) -> Result<(f64, f64)> {
        match (*self, agents) {
            (MuContext::TwoAgent { mu_dprime, f_dprime }, 2) => {
                let l1 = (1.0 - f_dprime) / (2.0 * (1.0 - mu_dprime));
                Ok((l1, 1.0 - 2.0 * l1))
            }
            (MuContext::ThreeAgent, 3) => Ok((1.0 / 3.0, 0.0)),
            _ => Err(Error::domain(format!("μ context {self:?} does not match {agents} agents"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiAgentTable {
    pub kind: String,
    pub agents: usize,
    pub grid: usize,
    pub status: TableStatus,
    pub objective: Option<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub pm: Vec<f64>,
    pub lambda1: f64,
    pub lambda0: f64,
    pub flags: Vec<String>,
    pub engine: String,
    pub iterations: usize,
}

impl MultiAgentTable {
    pub fn layout(&self) -> Layout {
        Layout::new(self.agents, self.grid)
    }

    pub fn constraint_set(&self) -> Result<ConstraintSet> {
        ConstraintSet::from_names(&self.flags)
    }

    pub fn is_feasible(&self) -> bool {
        self.status == TableStatus::Optimal
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: MultiAgentTable = serde_json::from_str(text).map_err(parse_error)?;
        if t.kind != "multi_agent" {
            return Err(Error::Parse { context: "kind".into(), message: format!("expected \"multi_agent\", found {:?}", t.kind) });
        }
        check_shape(t.agents, t.grid)?;
        let n = t.layout().scenarios * t.agents;
        if t.is_feasible() && (t.x.len() != n || t.p.len() != n || t.pm.len() != n) {
            return Err(Error::Parse { context: "x/p/pm".into(), message: format!("expected {n} values per array") });
        }
        t.constraint_set()?;
        Ok(t)
    }
}

pub fn solve_multi_agent(agents: usize, g: usize, ctx: &MuContext, cs: &ConstraintSet) -> Result<MultiAgentTable> {
    let (l1, l0) = ctx.lambdas(agents)?;
    let built = build_lp(agents, g, l1, l0, cs)?;
    let sol = dri_lp::solve(&built.lp)?;
    let n = built.layout.scenarios * agents;
    let status = match sol.status {
        LpStatus::Optimal => TableStatus::Optimal,
        LpStatus::Infeasible => TableStatus::Infeasible,
        LpStatus::Unbounded => TableStatus::Unbounded,
    };
    let (x, p, pm) = if sol.is_optimal() {
        (sol.primal[..n].to_vec(), sol.primal[n..2 * n].to_vec(), sol.primal[2 * n..].to_vec())
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };
    Ok(MultiAgentTable {
        kind: "multi_agent".into(),
        agents,
        grid: g,
        status,
        objective: sol.is_optimal().then_some(sol.objective),
        x,
        p,
        pm,
        lambda1: l1,
        lambda0: l0,
        flags: cs.names(),
        engine: dri_lp::ENGINE_VERSION.into(),
        iterations: sol.iterations,
    })
}

/// Largest violations found by re-checking a table directly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TableCheck {
    pub ds_ic: f64,
    pub ep_ir: f64,
    pub allocation: f64,
    pub aggregate: f64,
    pub dominance: f64,
    pub symmetry: f64,
    pub monotone: f64,
}

pub fn check_table(t: &MultiAgentTable) -> Result<TableCheck> {
    if !t.is_feasible() {
        return Err(Error::domain("table holds no solution"));
    }
    let cs = t.constraint_set()?;
    let lay = t.layout();
    let nu = uniform_grid(t.grid)?;
    let jn = t.agents;
    let mut r = TableCheck::default();
    for s in 0..lay.scenarios {
        let c = lay.coords(s);
        let mut sum_x = 0.0;
        let (mut sum_p, mut sum_pm) = (0.0, 0.0);
        for j in 0..jn {
            let v = nu[c[j]];
            let xs = t.x[lay.x(s, j)];
            sum_x += xs;
            sum_p += t.p[lay.x(s, j)];
            sum_pm += t.pm[lay.x(s, j)];
            for pay in [&t.p, &t.pm] {
                let ps = pay[lay.x(s, j)];
                r.ep_ir = r.ep_ir.max(ps - v * xs);
                for (h, &vh) in nu.iter().enumerate() {
                    let xt = t.x[lay.x(lay.shift(s, j, h), j)];
                    r.ds_ic = r.ds_ic.max(ps - v * (xs - xt) - vh);
                }
            }
            r.allocation = r.allocation.max(-xs);
            for k in 0..jn {
                if c[k] + 1 >= t.grid {
                    continue;
                }
                let up = lay.x(lay.shift(s, k, c[k] + 1), j);
                let here = lay.x(s, j);
                let mut viol = |on: bool, arr: &[f64], increasing: bool| {
                    if on {
                        let d = if increasing { arr[here] - arr[up] } else { arr[up] - arr[here] };
                        r.monotone = r.monotone.max(d);
                    }
                };
                if k == j {
                    viol(cs.x_monotone_own_up, &t.x, true);
                    viol(cs.p_monotone_own_up, &t.p, true);
                } else {
                    viol(cs.x_monotone_other_down, &t.x, false);
                    viol(cs.p_monotone_other_down, &t.p, false);
                }
            }
        }
        r.allocation = r.allocation.max(sum_x - 1.0);
        if cs.aggregate_polynomial_equality {
            let total: f64 = c.iter().map(|&i| nu[i]).sum();
            r.aggregate = r.aggregate.max((sum_p - t.lambda1 * total - t.lambda0).abs());
            r.dominance = r.dominance.max(sum_p - sum_pm);
        }
        if cs.symmetry {
            for k in 1..jn {
                let mut cc = c.clone();
                cc.swap(0, k);
                let tt = lay.index(&cc);
                for j in 0..jn {
                    let jj = if j == 0 { k } else if j == k { 0 } else { j };
                    for arr in [&t.x, &t.p, &t.pm] {
                        r.symmetry = r.symmetry.max((arr[lay.x(s, j)] - arr[lay.x(tt, jj)]).abs());
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Agent-1 value of `arr` at grid coordinates `c`.
pub fn table_value(t: &MultiAgentTable, arr: &[f64], agent: usize, c: &[usize]) -> f64 {
    let lay = t.layout();
    arr[lay.x(lay.index(c), agent)]
}

/// CSV slice over the two unpinned axes: `fixed[k]` is `Some(grid index)` for
/// pinned axes and `None` for the two free ones.
pub fn table_surfaces(t: &MultiAgentTable, fixed: &[Option<usize>]) -> Result<String> {
    if !t.is_feasible() {
        return Err(Error::domain("table holds no solution"));
    }
    if fixed.len() != t.agents {
        return Err(Error::domain(format!("expected {} coordinates, got {}", t.agents, fixed.len())));
    }
    let free: Vec<usize> = (0..t.agents).filter(|&k| fixed[k].is_none()).collect();
    if free.len() != 2 {
        return Err(Error::domain("exactly two axes must be left free"));
    }
    if let Some(&bad) = fixed.iter().flatten().find(|&&i| i >= t.grid) {
        return Err(Error::domain(format!("grid index {bad} is out of range for G = {}", t.grid)));
    }
    let nu = uniform_grid(t.grid)?;
    let mut c: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    let mut out = String::from("nu_a,nu_b,x1,p1,pm1\n");
    for a in 0..t.grid {
        for b in 0..t.grid {
            c[free[0]] = a;
            c[free[1]] = b;
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                nu[a],
                nu[b],
                table_value(t, &t.x, 0, &c),
                table_value(t, &t.p, 0, &c),
                table_value(t, &t.pm, 0, &c)
            );
        }
    }
    Ok(out)
}
