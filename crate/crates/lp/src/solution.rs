use crate::model::{LinearProgram, Relation, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. Primal values, duals and reduced costs refer to the
/// original (unscaled, un-presolved) model. Duals are sensitivities of the
/// objective to each row's rhs in the model's own sense; for infeasible or
/// unbounded results they are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub(crate) fn without_point(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            objective: f64::NAN,
            primal: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            iterations,
        }
    }
}

/// Optimality evidence for a primal/dual pair, measured on the original model.
///
/// Row quantities are divided by `1 + max|a_ij|·max|x| + |rhs|` so they are
/// comparable across badly scaled rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub primal_residual: f64,
    pub bound_violation: f64,
    pub dual_infeasibility: f64,
    pub complementarity: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual| / (1 + |primal|)`.
    pub duality_gap: f64,
}

impl Certificate {
    pub fn holds(&self, primal_tol: f64, dual_tol: f64) -> bool {
        self.primal_residual <= primal_tol
            && self.bound_violation <= primal_tol
            && self.dual_infeasibility <= dual_tol
            && self.complementarity <= dual_tol
            && self.duality_gap <= dual_tol
    }
}

impl LinearProgram {
    /// Checks `sol` against this model. The solution must carry primal and
    /// dual vectors of matching length.
    pub fn certificate(&self, sol: &LpSolution) -> Certificate {
        let x = &sol.primal;
        let pi = &sol.duals;
        // Work in minimisation form: flip signs for maximisation.
        let sign = match self.sense() {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let xmax = x.iter().fold(1.0_f64, |m, v| m.max(v.abs()));

        let mut primal_residual = 0.0_f64;
        let mut dual_inf = 0.0_f64;
        let mut compl = 0.0_f64;
        let mut dual_obj = 0.0;
        for (i, row) in self.rows().iter().enumerate() {
            let act = row.activity(x);
            let scale = 1.0 + row.max_abs() * xmax + row.rhs.abs();
            let viol = match row.relation {
                Relation::Le => (act - row.rhs).max(0.0),
                Relation::Ge => (row.rhs - act).max(0.0),
                Relation::Eq => (act - row.rhs).abs(),
            };
            primal_residual = primal_residual.max(viol / scale);
            let y = sign * pi.get(i).copied().unwrap_or(0.0);
            let wrong = match row.relation {
                Relation::Le => y.max(0.0),
                Relation::Ge => (-y).max(0.0),
                Relation::Eq => 0.0,
            };
            dual_inf = dual_inf.max(wrong);
            compl = compl.max(y.abs() * (act - row.rhs).abs() / scale);
            dual_obj += y * row.rhs;
        }

        let mut bound_violation = 0.0_f64;
        let mut d = self.objective().iter().map(|c| sign * c).collect::<Vec<_>>();
        for (i, row) in self.rows().iter().enumerate() {
            let y = sign * pi.get(i).copied().unwrap_or(0.0);
            if y != 0.0 {
                for (&j, &a) in row.indices.iter().zip(&row.coeffs) {
                    d[j] -= a * y;
                }
            }
        }
        for (j, &dj) in d.iter().enumerate() {
            let (lo, hi) = (self.lower()[j], self.upper()[j]);
            let v = x[j];
            let bscale = 1.0 + v.abs();
            bound_violation = bound_violation
                .max((lo - v).max(0.0) / bscale)
                .max((v - hi).max(0.0) / bscale);
            if dj > 0.0 {
                if lo.is_finite() {
                    dual_obj += dj * lo;
                    compl = compl.max(dj * (v - lo).abs() / bscale);
                } else {
                    dual_inf = dual_inf.max(dj);
                }
            } else if dj < 0.0 {
                if hi.is_finite() {
                    dual_obj += dj * hi;
                    compl = compl.max(-dj * (hi - v).abs() / bscale);
                } else {
                    dual_inf = dual_inf.max(-dj);
                }
            }
        }
        let primal_obj = self.objective_value(x);
        let dual_objective = sign * dual_obj;
        Certificate {
            primal_residual,
            bound_violation,
            dual_infeasibility: dual_inf,
            complementarity: compl,
            primal_objective: primal_obj,
            dual_objective,
            duality_gap: (primal_obj - dual_objective).abs() / (1.0 + primal_obj.abs()),
        }
    }
}
