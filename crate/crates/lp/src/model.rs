use std::fmt;

use crate::error::LpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// One sparse constraint row: `sum(coeffs[k] * x[indices[k]]) relation rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub indices: Vec<usize>,
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.coeffs)
            .map(|(&j, &a)| a * x[j])
            .sum()
    }

    pub(crate) fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }
}

/// A linear program over `n_vars` continuous variables.
///
/// Variables default to `[0, +inf)` with zero objective coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    n_vars: usize,
    sense: Sense,
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(n_vars: usize, sense: Sense) -> Self {
        Self {
            n_vars,
            sense,
            objective: vec![0.0; n_vars],
            lower: vec![0.0; n_vars],
            upper: vec![f64::INFINITY; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.indices.len()).sum()
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Marks `var` as unbounded in both directions.
    pub fn set_free(&mut self, var: usize) {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY);
    }

    /// Appends a row and returns its index. Terms with equal variable indices
    /// are summed.
    pub fn add_row(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) -> usize {
        let mut sorted: Vec<(usize, f64)> = terms.to_vec();
        sorted.sort_by_key(|&(j, _)| j);
        let mut indices = Vec::with_capacity(sorted.len());
        let mut coeffs: Vec<f64> = Vec::with_capacity(sorted.len());
        for (j, a) in sorted {
            if indices.last() == Some(&j) {
                *coeffs.last_mut().unwrap() += a;
            } else {
                indices.push(j);
                coeffs.push(a);
            }
        }
        self.rows.push(Row {
            indices,
            coeffs,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    /// Objective value of `x` in the model's own sense.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let bad = |msg: String| Err(LpError::InvalidModel(msg));
        if self.objective.len() != self.n_vars
            || self.lower.len() != self.n_vars
            || self.upper.len() != self.n_vars
        {
            return bad("objective/bounds length differs from n_vars".into());
        }
        for j in 0..self.n_vars {
            if !self.objective[j].is_finite() {
                return bad(format!("objective coefficient of x{j} is not finite"));
            }
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return bad(format!("x{j} has unusable bounds [{lo}, {hi}]"));
            }
            if lo > hi {
                return bad(format!("x{j} has lower bound {lo} above upper bound {hi}"));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.indices.len() != row.coeffs.len() {
                return bad(format!("row {i}: index/coefficient length mismatch"));
            }
            if !row.rhs.is_finite() {
                return bad(format!("row {i}: rhs is not finite"));
            }
            for (&j, &a) in row.indices.iter().zip(&row.coeffs) {
                if j >= self.n_vars {
                    return bad(format!("row {i}: variable index {j} out of range"));
                }
                if !a.is_finite() {
                    return bad(format!("row {i}: coefficient of x{j} is not finite"));
                }
            }
        }
        Ok(())
    }
}
