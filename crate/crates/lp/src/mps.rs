//! Fixed-layout MPS export for cross-checking models with external solvers.

use std::fmt::Write;

use crate::model::{LinearProgram, Relation, Sense};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders `lp` as free-format MPS (ROWS, COLUMNS, RHS, BOUNDS). Numbers are
/// written with 17 significant digits so the text round-trips exactly.
pub fn write_mps(lp: &LinearProgram, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    if lp.sense() == Sense::Maximize {
        let _ = writeln!(out, "OBJSENSE\n    MAX");
    }
    let _ = writeln!(out, "ROWS\n N  obj");
    for (i, row) in lp.rows().iter().enumerate() {
        let t = match row.relation {
            Relation::Le => 'L',
            Relation::Ge => 'G',
            Relation::Eq => 'E',
        };
        let _ = writeln!(out, " {t}  r{i}");
    }
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.n_vars()];
    for (i, row) in lp.rows().iter().enumerate() {
        for (&j, &a) in row.indices.iter().zip(&row.coeffs) {
            cols[j].push((i, a));
        }
    }
    let _ = writeln!(out, "COLUMNS");
    for (j, col) in cols.iter().enumerate() {
        let c = lp.objective()[j];
        if c != 0.0 {
            let _ = writeln!(out, "    x{j}  obj  {}", num(c));
        }
        for &(i, a) in col {
            let _ = writeln!(out, "    x{j}  r{i}  {}", num(a));
        }
        if c == 0.0 && col.is_empty() {
            let _ = writeln!(out, "    x{j}  obj  {}", num(0.0));
        }
    }
    let _ = writeln!(out, "RHS");
    for (i, row) in lp.rows().iter().enumerate() {
        if row.rhs != 0.0 {
            let _ = writeln!(out, "    rhs  r{i}  {}", num(row.rhs));
        }
    }
    let _ = writeln!(out, "BOUNDS");
    for j in 0..lp.n_vars() {
        let (lo, hi) = (lp.lower()[j], lp.upper()[j]);
        match (lo.is_finite(), hi.is_finite()) {
            (_, _) if lo == hi => {
                let _ = writeln!(out, " FX bnd  x{j}  {}", num(lo));
            }
            (false, false) => {
                let _ = writeln!(out, " FR bnd  x{j}");
            }
            (false, true) => {
                let _ = writeln!(out, " MI bnd  x{j}");
                let _ = writeln!(out, " UP bnd  x{j}  {}", num(hi));
            }
            (true, fin_hi) => {
                if lo != 0.0 {
                    let _ = writeln!(out, " LO bnd  x{j}  {}", num(lo));
                }
                if fin_hi {
                    let _ = writeln!(out, " UP bnd  x{j}  {}", num(hi));
                }
            }
        }
    }
    let _ = writeln!(out, "ENDATA");
    out
}
