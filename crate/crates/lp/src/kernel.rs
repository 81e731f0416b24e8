//! Dense inverse of the basis kernel.
//!
//! With row activities `r = A x` carried as explicit unit columns, a basis is
//! a set `S` of basic structural columns plus the activity columns of every
//! row whose activity is basic. The rows whose activity is nonbasic form `R`,
//! and `|R| = |S|`. Solving with the basis only needs `K = A[R, S]`. This
//! module keeps `K⁻¹` explicitly (indexed column-position by row-position)
//! and updates it in place for the four kinds of basis change.

use crate::error::LpError;

#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    stride: usize,
    k: usize,
    inv: Vec<f64>,
    /// Constraint row at each row position.
    pub rows: Vec<usize>,
    /// Structural column at each column position.
    pub cols: Vec<usize>,
}

impl Kernel {
    pub fn new(capacity: usize) -> Self {
        Self {
            stride: capacity.max(1),
            k: 0,
            inv: vec![0.0; capacity.max(1) * capacity.max(1)],
            rows: Vec::new(),
            cols: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    #[inline]
    fn at(&self, c: usize, r: usize) -> f64 {
        self.inv[c * self.stride + r]
    }

    /// `K⁻¹ v` for `v` indexed by row position.
    pub fn solve(&self, v: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for c in 0..self.k {
            let row = &self.inv[c * self.stride..c * self.stride + self.k];
            out.push(row.iter().zip(v).map(|(a, b)| a * b).sum());
        }
    }

    /// Column `r` of `K⁻¹`, indexed by column position.
    pub fn inv_column(&self, r: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.k).map(|c| self.at(c, r)));
    }

    /// `K⁻ᵀ g` for `g` indexed by column position; result by row position.
    pub fn solve_transpose(&self, g: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.k, 0.0);
        for (c, &gc) in g.iter().enumerate().take(self.k) {
            if gc == 0.0 {
                continue;
            }
            let row = &self.inv[c * self.stride..c * self.stride + self.k];
            for (o, a) in out.iter_mut().zip(row) {
                *o += gc * a;
            }
        }
    }

    /// Grow by row `row` and column `col`. `w = K⁻¹ v` with `v = A[R, col]`,
    /// `u = A[row, S]` by column position, `alpha = A[row, col]`.
    pub fn push(&mut self, row: usize, col: usize, w: &[f64], u: &[f64], alpha: f64) -> Result<(), LpError> {
        let k = self.k;
        let s = alpha - u.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        if s.abs() < 1e-13 {
            return Err(LpError::NumericFailure("singular kernel extension".into()));
        }
        let mut h = vec![0.0; k];
        self.solve_transpose(u, &mut h);
        for c in 0..k {
            let wc = w[c] / s;
            let base = c * self.stride;
            for r in 0..k {
                self.inv[base + r] += wc * h[r];
            }
            self.inv[base + k] = -wc;
        }
        let base = k * self.stride;
        for r in 0..k {
            self.inv[base + r] = -h[r] / s;
        }
        self.inv[base + k] = 1.0 / s;
        self.rows.push(row);
        self.cols.push(col);
        self.k += 1;
        Ok(())
    }

    /// Replace the column at position `t` by `col`; `w = K⁻¹ A[R, col]`.
    pub fn replace_column(&mut self, t: usize, col: usize, w: &[f64]) {
        let k = self.k;
        let st = self.stride;
        let p = w[t];
        for r in 0..k {
            self.inv[t * st + r] /= p;
        }
        for c in 0..k {
            if c == t || w[c] == 0.0 {
                continue;
            }
            let f = w[c];
            for r in 0..k {
                self.inv[c * st + r] -= f * self.inv[t * st + r];
            }
        }
        self.cols[t] = col;
    }

    /// Replace the row at position `t` by `row`; `h = uᵀ K⁻¹` with `u = A[row, S]`.
    pub fn replace_row(&mut self, t: usize, row: usize, h: &[f64]) {
        let k = self.k;
        let st = self.stride;
        let p = h[t];
        for c in 0..k {
            let base = c * st;
            let pivot = self.inv[base + t] / p;
            self.inv[base + t] = pivot;
            if pivot == 0.0 {
                continue;
            }
            for r in 0..k {
                if r != t {
                    self.inv[base + r] -= h[r] * pivot;
                }
            }
        }
        self.rows[t] = row;
    }

    /// Remove the row at position `rt` and the column at position `ct`.
    pub fn remove(&mut self, rt: usize, ct: usize) {
        let k = self.k;
        let st = self.stride;
        let p = self.at(ct, rt);
        let col_rt: Vec<f64> = (0..k).map(|c| self.at(c, rt)).collect();
        let row_ct: Vec<f64> = self.inv[ct * st..ct * st + k].to_vec();
        for c in 0..k {
            if c == ct || col_rt[c] == 0.0 {
                continue;
            }
            let f = col_rt[c] / p;
            let base = c * st;
            for r in 0..k {
                self.inv[base + r] -= f * row_ct[r];
            }
        }
        // Swap-remove column position ct and row position rt.
        let last = k - 1;
        if ct != last {
            for r in 0..k {
                self.inv[ct * st + r] = self.inv[last * st + r];
            }
            self.cols.swap(ct, last);
        }
        if rt != last {
            for c in 0..k {
                self.inv[c * st + rt] = self.inv[c * st + last];
            }
            self.rows.swap(rt, last);
        }
        self.cols.pop();
        self.rows.pop();
        self.k = last;
    }

    /// Rebuild `K⁻¹` from `K` (dense, column position by row position
    /// supplied as `kmat[r * k + c] = A[rows[r], cols[c]]`).
    pub fn refactor(&mut self, kmat: &[f64]) -> Result<(), LpError> {
        let k = self.k;
        // Gauss-Jordan with partial pivoting on [K | I].
        let mut a = kmat.to_vec();
        let mut inv = vec![0.0; k * k];
        for i in 0..k {
            inv[i * k + i] = 1.0;
        }
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        for col in 0..k {
            let (mut best, mut piv) = (0.0, col);
            for r in col..k {
                let v = a[r * k + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-12 * scale {
                return Err(LpError::NumericFailure(format!(
                    "basis kernel of size {k} is singular at column {col}"
                )));
            }
            if piv != col {
                for c in 0..k {
                    a.swap(piv * k + c, col * k + c);
                    inv.swap(piv * k + c, col * k + c);
                }
            }
            let d = a[col * k + col];
            for c in 0..k {
                a[col * k + c] /= d;
                inv[col * k + c] /= d;
            }
            for r in 0..k {
                if r == col {
                    continue;
                }
                let f = a[r * k + col];
                if f == 0.0 {
                    continue;
                }
                for c in 0..k {
                    a[r * k + c] -= f * a[col * k + c];
                    inv[r * k + c] -= f * inv[col * k + c];
                }
            }
        }
        // inv is K⁻¹ with rows indexed by column position of K.
        for c in 0..k {
            for r in 0..k {
                self.inv[c * self.stride + r] = inv[c * k + r];
            }
        }
        Ok(())
    }
}
