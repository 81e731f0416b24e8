//! Two-phase bounded-variable primal simplex on `A x − r = 0`, where the row
//! activities `r` carry the row bounds.
//!
//! Phase 1 minimises the sum of bound violations of basic variables; phase 2
//! minimises the true cost. Pricing is Dantzig's rule with a two-pass Harris
//! ratio test; after a run of degenerate pivots the solver switches to
//! smallest-index (Bland) pricing and ratio tie-breaking until it makes
//! progress again, which rules out cycling.

use crate::error::LpError;
use crate::kernel::Kernel;
use crate::model::LinearProgram;
use crate::presolve::{presolve, Presolved, Reduced};
use crate::scale::equilibrate;
use crate::solution::{LpSolution, LpStatus};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Hard cap on simplex pivots; `None` picks a size-dependent default.
    pub max_iterations: Option<usize>,
    /// Primal feasibility tolerance on the scaled system.
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance on the scaled system.
    pub optimality_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Kernel updates between refactorisations (raised for large kernels).
    pub refactor_interval: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            bland_after: 50,
            refactor_interval: 100,
        }
    }
}

const NONE: usize = usize::MAX;
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free variable, held at zero.
    Zero,
}

enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

struct Simplex<'a> {
    n: usize,
    m: usize,
    col_idx: Vec<Vec<usize>>,
    col_val: Vec<Vec<f64>>,
    red: &'a Reduced,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    /// Kernel column position of each basic structural.
    colpos: Vec<usize>,
    /// Kernel row position of each row whose activity is nonbasic.
    rowpos: Vec<usize>,
    kern: Kernel,
    updates: usize,
    iterations: usize,
    opts: &'a SolveOptions,
    // Scratch space.
    pi: Vec<f64>,
    dense_m: Vec<f64>,
    touched: Vec<usize>,
}

impl<'a> Simplex<'a> {
    fn new(red: &'a Reduced, opts: &'a SolveOptions) -> Self {
        let (n, m) = (red.n(), red.m());
        let mut col_idx = vec![Vec::new(); n];
        let mut col_val = vec![Vec::new(); n];
        for (i, (idx, val)) in red.row_idx.iter().zip(&red.row_val).enumerate() {
            for (&j, &a) in idx.iter().zip(val) {
                col_idx[j].push(i);
                col_val[j].push(a);
            }
        }
        let mut lo = red.lo.clone();
        lo.extend_from_slice(&red.rlo);
        let mut hi = red.hi.clone();
        hi.extend_from_slice(&red.rhi);
        let mut x = vec![0.0; n + m];
        let mut state = vec![State::Basic; n + m];
        for j in 0..n {
            (x[j], state[j]) = if lo[j].is_finite() {
                (lo[j], State::Lower)
            } else if hi[j].is_finite() {
                (hi[j], State::Upper)
            } else {
                (0.0, State::Zero)
            };
        }
        let mut s = Self {
            n,
            m,
            col_idx,
            col_val,
            red,
            cost: red.cost.clone(),
            lo,
            hi,
            x,
            state,
            colpos: vec![NONE; n],
            rowpos: vec![NONE; m],
            kern: Kernel::new(n.min(m)),
            updates: 0,
            iterations: 0,
            opts,
            pi: vec![0.0; m],
            dense_m: vec![0.0; m],
            touched: Vec::new(),
        };
        s.recompute_basics();
        s
    }

    fn max_iterations(&self) -> usize {
        self.opts
            .max_iterations
            .unwrap_or_else(|| (50 * (self.n + self.m)).max(200_000))
    }

    /// Recomputes every basic value from the nonbasic ones.
    fn recompute_basics(&mut self) {
        let mut act = vec![0.0; self.m];
        for j in 0..self.n {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                for (&i, &a) in self.col_idx[j].iter().zip(&self.col_val[j]) {
                    act[i] += a * self.x[j];
                }
            }
        }
        let rhs: Vec<f64> = self
            .kern
            .rows
            .iter()
            .map(|&i| self.x[self.n + i] - act[i])
            .collect();
        let mut xs = Vec::new();
        self.kern.solve(&rhs, &mut xs);
        for (c, &j) in self.kern.cols.iter().enumerate() {
            self.x[j] = xs[c];
            for (&i, &a) in self.col_idx[j].iter().zip(&self.col_val[j]) {
                act[i] += a * xs[c];
            }
        }
        for i in 0..self.m {
            if self.state[self.n + i] == State::Basic {
                self.x[self.n + i] = act[i];
            }
        }
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let k = self.kern.size();
        let mut kmat = vec![0.0; k * k];
        for (c, &j) in self.kern.cols.iter().enumerate() {
            for (&i, &a) in self.col_idx[j].iter().zip(&self.col_val[j]) {
                let r = self.rowpos[i];
                if r != NONE {
                    kmat[r * k + c] = a;
                }
            }
        }
        self.kern.refactor(&kmat)?;
        self.updates = 0;
        self.recompute_basics();
        Ok(())
    }

    fn infeasibility(&self, v: usize) -> f64 {
        let tol = self.opts.feasibility_tol;
        if self.x[v] < self.lo[v] - tol {
            -1.0
        } else if self.x[v] > self.hi[v] + tol {
            1.0
        } else {
            0.0
        }
    }

    fn any_infeasible(&self) -> bool {
        (0..self.n + self.m).any(|v| self.state[v] == State::Basic && self.infeasibility(v) != 0.0)
    }

    /// Row duals for the current basis and cost vector.
    fn compute_duals(&mut self, phase1: bool) {
        let n = self.n;
        for i in 0..self.m {
            self.pi[i] = if self.state[n + i] == State::Basic && phase1 {
                -self.infeasibility(n + i)
            } else {
                0.0
            };
        }
        let g: Vec<f64> = self
            .kern
            .cols
            .iter()
            .map(|&j| {
                let cb = if phase1 { self.infeasibility(j) } else { self.cost[j] };
                let mut s = cb;
                for (&i, &a) in self.col_idx[j].iter().zip(&self.col_val[j]) {
                    s -= a * self.pi[i];
                }
                s
            })
            .collect();
        let mut pr = Vec::new();
        self.kern.solve_transpose(&g, &mut pr);
        for (r, &i) in self.kern.rows.iter().enumerate() {
            self.pi[i] = pr[r];
        }
    }

    fn reduced_cost(&self, v: usize, phase1: bool) -> f64 {
        if v < self.n {
            let mut d = if phase1 { 0.0 } else { self.cost[v] };
            for (&i, &a) in self.col_idx[v].iter().zip(&self.col_val[v]) {
                d -= a * self.pi[i];
            }
            d
        } else {
            self.pi[v - self.n]
        }
    }

    /// Direction of improvement for a nonbasic variable, if any.
    fn eligible(&self, v: usize, d: f64) -> Option<f64> {
        let tol = self.opts.optimality_tol;
        if self.lo[v] == self.hi[v] {
            return None;
        }
        match self.state[v] {
            State::Lower if d < -tol => Some(1.0),
            State::Upper if d > tol => Some(-1.0),
            State::Zero if d.abs() > tol => Some(-d.signum()),
            _ => None,
        }
    }

    fn price(&self, phase1: bool, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for v in 0..self.n + self.m {
            if self.state[v] == State::Basic {
                continue;
            }
            let d = self.reduced_cost(v, phase1);
            if let Some(dir) = self.eligible(v, d) {
                if bland {
                    return Some((v, dir));
                }
                if best.is_none_or(|b| d.abs() > b.2) {
                    best = Some((v, dir, d.abs()));
                }
            }
        }
        best.map(|b| (b.0, b.1))
    }

    /// Basis representation of the entering column: `w` over kernel column
    /// positions, and `dense_m[i]` for rows with basic activity.
    fn ftran(&mut self, q: usize, w: &mut Vec<f64>) {
        let k = self.kern.size();
        if q < self.n {
            let mut v = vec![0.0; k];
            for (&i, &a) in self.col_idx[q].iter().zip(&self.col_val[q]) {
                let r = self.rowpos[i];
                if r != NONE {
                    v[r] = a;
                }
            }
            self.kern.solve(&v, w);
        } else {
            self.kern.inv_column(self.rowpos[q - self.n], w);
            for e in w.iter_mut() {
                *e = -*e;
            }
        }
        for &i in &self.touched {
            self.dense_m[i] = 0.0;
        }
        self.touched.clear();
        for (c, &j) in self.kern.cols.iter().enumerate() {
            if w[c] == 0.0 {
                continue;
            }
            for (&i, &a) in self.col_idx[j].iter().zip(&self.col_val[j]) {
                if self.dense_m[i] == 0.0 {
                    self.touched.push(i);
                }
                self.dense_m[i] += a * w[c];
            }
        }
        if q < self.n {
            for (&i, &a) in self.col_idx[q].iter().zip(&self.col_val[q]) {
                if self.dense_m[i] == 0.0 {
                    self.touched.push(i);
                }
                self.dense_m[i] -= a;
            }
        }
    }

    fn run(&mut self) -> Result<Outcome, LpError> {
        let limit = self.max_iterations();
        let mut degenerate = 0usize;
        let mut verified = false;
        let mut w = Vec::new();
        let interval = self.opts.refactor_interval.max(self.n.min(self.m) / 4);
        loop {
            if self.iterations >= limit {
                return Err(LpError::IterationLimit(limit));
            }
            let phase1 = self.any_infeasible();
            let bland = degenerate >= self.opts.bland_after;
            self.compute_duals(phase1);
            let Some((q, dir)) = self.price(phase1, bland) else {
                if !verified {
                    // Confirm on a fresh factorisation before stopping.
                    self.refactor()?;
                    verified = true;
                    continue;
                }
                return Ok(if phase1 { Outcome::Infeasible } else { Outcome::Optimal });
            };
            verified = false;
            self.ftran(q, &mut w);

            let ftol = self.opts.feasibility_tol;
            // Candidate blocking variables: (var, rate of change, kernel col pos or NONE).
            let mut cands: Vec<(usize, f64)> = Vec::new();
            for (c, &j) in self.kern.cols.iter().enumerate() {
                let alpha = -dir * w[c];
                if alpha.abs() > PIVOT_TOL {
                    cands.push((j, alpha));
                }
            }
            for &i in &self.touched {
                if self.state[self.n + i] == State::Basic {
                    let alpha = -dir * self.dense_m[i];
                    if alpha.abs() > PIVOT_TOL {
                        cands.push((self.n + i, alpha));
                    }
                }
            }
            // Ratio of a candidate: (target bound, exact ratio, relaxed ratio).
            let ratio = |v: usize, alpha: f64, x: &[f64]| -> Option<(f64, f64, f64)> {
                let (lo, hi, xv) = (self.lo[v], self.hi[v], x[v]);
                if xv < lo - ftol {
                    // Infeasible below: blocks when it reaches its lower bound.
                    return (alpha > 0.0).then(|| (lo, (lo - xv) / alpha, (lo - xv) / alpha));
                }
                if xv > hi + ftol {
                    return (alpha < 0.0).then(|| (hi, (hi - xv) / alpha, (hi - xv) / alpha));
                }
                if alpha > 0.0 && hi.is_finite() {
                    Some((hi, ((hi - xv) / alpha).max(0.0), (hi + ftol - xv) / alpha))
                } else if alpha < 0.0 && lo.is_finite() {
                    Some((lo, ((lo - xv) / alpha).max(0.0), (lo - ftol - xv) / alpha))
                } else {
                    None
                }
            };
            let mut leave: Option<(usize, f64, f64, f64)> = None; // var, alpha, bound, step
            if bland {
                let mut best = f64::INFINITY;
                for &(v, alpha) in &cands {
                    if let Some((b, r, _)) = ratio(v, alpha, &self.x) {
                        if r < best - 1e-12 || (r <= best + 1e-12 && leave.is_some_and(|l| v < l.0)) {
                            best = best.min(r);
                            leave = Some((v, alpha, b, r));
                        }
                    }
                }
            } else {
                let theta_max = cands
                    .iter()
                    .filter_map(|&(v, a)| ratio(v, a, &self.x).map(|t| t.2))
                    .fold(f64::INFINITY, f64::min);
                for &(v, alpha) in &cands {
                    if let Some((b, r, _)) = ratio(v, alpha, &self.x) {
                        if r <= theta_max && leave.is_none_or(|l| alpha.abs() > l.1.abs()) {
                            leave = Some((v, alpha, b, r));
                        }
                    }
                }
            }

            let span = self.hi[q] - self.lo[q];
            let step = match leave {
                Some(l) if l.3 < span => l.3,
                _ if span.is_finite() => {
                    // Bound flip of the entering variable.
                    self.apply_step(q, dir, span, &w);
                    self.state[q] = if dir > 0.0 { State::Upper } else { State::Lower };
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                    self.iterations += 1;
                    degenerate = 0;
                    continue;
                }
                _ => {
                    if phase1 {
                        return Err(LpError::NumericFailure(
                            "phase 1 direction without a blocking variable".into(),
                        ));
                    }
                    return Ok(Outcome::Unbounded);
                }
            };
            let (p, _, bound, _) = leave.expect("leaving variable");
            self.apply_step(q, dir, step, &w);
            self.x[p] = bound;
            self.pivot(q, p, &w)?;
            self.state[p] = if bound == self.lo[p] { State::Lower } else { State::Upper };
            self.iterations += 1;
            degenerate = if step <= 1e-12 { degenerate + 1 } else { 0 };
            self.updates += 1;
            if self.updates >= interval {
                self.refactor()?;
            }
        }
    }

    fn apply_step(&mut self, q: usize, dir: f64, step: f64, w: &[f64]) {
        if step == 0.0 {
            return;
        }
        self.x[q] += dir * step;
        for (c, &j) in self.kern.cols.iter().enumerate() {
            self.x[j] -= dir * step * w[c];
        }
        for &i in &self.touched {
            if self.state[self.n + i] == State::Basic {
                self.x[self.n + i] -= dir * step * self.dense_m[i];
            }
        }
    }

    /// Basis change: `q` enters, `p` leaves. `w` is the entering column's
    /// kernel representation.
    fn pivot(&mut self, q: usize, p: usize, w: &[f64]) -> Result<(), LpError> {
        let n = self.n;
        match (q < n, p < n) {
            (true, false) => {
                // Structural enters, activity of row i leaves: kernel grows.
                let i = p - n;
                let u: Vec<f64> = self
                    .kern
                    .cols
                    .iter()
                    .map(|&j| self.coef(i, j))
                    .collect();
                let alpha = self.coef(i, q);
                let pos = self.kern.size();
                self.kern.push(i, q, w, &u, alpha)?;
                self.rowpos[i] = pos;
                self.colpos[q] = pos;
            }
            (true, true) => {
                let t = self.colpos[p];
                self.kern.replace_column(t, q, w);
                self.colpos[p] = NONE;
                self.colpos[q] = t;
            }
            (false, false) => {
                // Activity of row k enters, activity of row i leaves.
                let (k, i) = (q - n, p - n);
                let t = self.rowpos[k];
                let u: Vec<f64> = self
                    .kern
                    .cols
                    .iter()
                    .map(|&j| self.coef(i, j))
                    .collect();
                let mut h = Vec::new();
                self.kern.solve_transpose(&u, &mut h);
                if h[t].abs() < 1e-13 {
                    return Err(LpError::NumericFailure("singular row exchange".into()));
                }
                self.kern.replace_row(t, i, &h);
                self.rowpos[k] = NONE;
                self.rowpos[i] = t;
            }
            (false, true) => {
                // Activity of row k enters, structural p leaves: kernel shrinks.
                let k = q - n;
                let (rt, ct) = (self.rowpos[k], self.colpos[p]);
                let last = self.kern.size() - 1;
                let (moved_row, moved_col) = (self.kern.rows[last], self.kern.cols[last]);
                self.kern.remove(rt, ct);
                self.rowpos[k] = NONE;
                self.colpos[p] = NONE;
                if moved_row != k {
                    self.rowpos[moved_row] = rt;
                }
                if moved_col != p {
                    self.colpos[moved_col] = ct;
                }
            }
        }
        self.state[q] = State::Basic;
        Ok(())
    }

    fn coef(&self, i: usize, j: usize) -> f64 {
        let idx = &self.red.row_idx[i];
        match idx.binary_search(&j) {
            Ok(k) => self.red.row_val[i][k],
            Err(_) => 0.0,
        }
    }
}

pub(crate) fn run(lp: &LinearProgram, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    let (mut red, post) = match presolve(lp) {
        Presolved::Infeasible => return Ok(LpSolution::without_point(LpStatus::Infeasible, 0)),
        Presolved::Reduced(r, p) => (r, p),
    };
    let original = red.clone();
    let sc = equilibrate(&mut red);
    let mut s = Simplex::new(&red, opts);
    let outcome = s.run()?;
    let iterations = s.iterations;
    match outcome {
        Outcome::Infeasible => return Ok(LpSolution::without_point(LpStatus::Infeasible, iterations)),
        Outcome::Unbounded => {
            let mut sol = LpSolution::without_point(LpStatus::Unbounded, iterations);
            sol.objective = match lp.sense() {
                crate::Sense::Maximize => f64::INFINITY,
                crate::Sense::Minimize => f64::NEG_INFINITY,
            };
            return Ok(sol);
        }
        Outcome::Optimal => {}
    }
    s.compute_duals(false);
    let xr: Vec<f64> = (0..red.n()).map(|j| s.x[j] * sc.col[j]).collect();
    let yr: Vec<f64> = (0..red.m()).map(|i| s.pi[i] * sc.row[i] / sc.obj).collect();
    let primal = post.primal(&xr);
    let sign = match lp.sense() {
        crate::Sense::Minimize => 1.0,
        crate::Sense::Maximize => -1.0,
    };
    let duals: Vec<f64> = post
        .duals(lp, &original, &xr, &yr)
        .into_iter()
        .map(|y| sign * y)
        .collect();
    let mut reduced_costs = lp.objective().to_vec();
    for (i, row) in lp.rows().iter().enumerate() {
        if duals[i] != 0.0 {
            for (&j, &a) in row.indices.iter().zip(&row.coeffs) {
                reduced_costs[j] -= a * duals[i];
            }
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&primal),
        primal,
        duals,
        reduced_costs,
        iterations,
    })
}
