//! Power-of-two equilibration: columns first, then rows, each to unit
//! max-abs. Powers of two keep the scaled coefficients exact.

use crate::presolve::Reduced;

fn pow2_recip(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return 1.0;
    }
    (-v.log2().round()).exp2()
}

#[derive(Debug, Clone)]
pub(crate) struct Scaling {
    pub col: Vec<f64>,
    pub row: Vec<f64>,
    /// Objective multiplier.
    pub obj: f64,
}

/// Scales `red` in place and returns the factors: the scaled system uses
/// `x = col ⊙ x'` and multiplies row `i` by `row[i]`.
pub(crate) fn equilibrate(red: &mut Reduced) -> Scaling {
    let n = red.n();
    let mut colmax = vec![0.0_f64; n];
    for (idx, val) in red.row_idx.iter().zip(&red.row_val) {
        for (&j, &a) in idx.iter().zip(val) {
            colmax[j] = colmax[j].max(a.abs());
        }
    }
    let col: Vec<f64> = colmax.iter().map(|&m| pow2_recip(m)).collect();
    let mut row = Vec::with_capacity(red.m());
    for (idx, val) in red.row_idx.iter().zip(red.row_val.iter_mut()) {
        let mut m = 0.0_f64;
        for (&j, a) in idx.iter().zip(val.iter_mut()) {
            *a *= col[j];
            m = m.max(a.abs());
        }
        let t = pow2_recip(m);
        for a in val.iter_mut() {
            *a *= t;
        }
        row.push(t);
    }
    for j in 0..n {
        red.cost[j] *= col[j];
        red.lo[j] /= col[j];
        red.hi[j] /= col[j];
    }
    for (i, &t) in row.iter().enumerate() {
        red.rlo[i] *= t;
        red.rhi[i] *= t;
    }
    let cmax = red.cost.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let obj = pow2_recip(cmax);
    for c in red.cost.iter_mut() {
        *c *= obj;
    }
    Scaling { col, row, obj }
}
