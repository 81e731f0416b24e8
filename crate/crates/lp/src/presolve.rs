//! Presolve: removes fixed variables, collapses `c·x_a − c·x_b = 0` rows by
//! merging the two variables, drops empty rows and merges rows with identical
//! coefficients. Postsolve maps primal and dual values back.

use std::collections::HashMap;

use crate::model::{LinearProgram, Relation, Sense};

const FEAS_TOL: f64 = 1e-9;

/// The reduced system in minimisation form with two-sided row bounds.
#[derive(Debug, Clone)]
pub(crate) struct Reduced {
    pub cost: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub rlo: Vec<f64>,
    pub rhi: Vec<f64>,
    pub row_idx: Vec<Vec<usize>>,
    pub row_val: Vec<Vec<f64>>,
}

impl Reduced {
    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn m(&self) -> usize {
        self.rlo.len()
    }
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Col(usize),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    row: usize,
    a: usize,
    b: usize,
    coef_a: f64,
}

#[derive(Debug)]
pub(crate) struct Postsolve {
    var_map: Vec<VarMap>,
    /// Original row providing the active lower / upper bound of each reduced row.
    lo_src: Vec<Option<usize>>,
    hi_src: Vec<Option<usize>>,
    /// Members of each merged column, root first.
    groups: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    /// Original rows folded into aggregation edges or dropped as redundant.
    agg_rows: Vec<bool>,
}

pub(crate) enum Presolved {
    Reduced(Reduced, Postsolve),
    Infeasible,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }
}

fn is_aggregation_row(lp: &LinearProgram, i: usize) -> Option<(usize, usize, f64)> {
    let row = &lp.rows()[i];
    if row.relation != Relation::Eq || row.rhs != 0.0 || row.indices.len() != 2 {
        return None;
    }
    let (ca, cb) = (row.coeffs[0], row.coeffs[1]);
    if ca == 0.0 || ca != -cb {
        return None;
    }
    Some((row.indices[0], row.indices[1], ca))
}

pub(crate) fn presolve(lp: &LinearProgram) -> Presolved {
    let n = lp.n_vars();
    let sign = match lp.sense() {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };

    // Merge variables tied by aggregation rows.
    let mut uf = UnionFind((0..n).collect());
    let mut glo = lp.lower().to_vec();
    let mut ghi = lp.upper().to_vec();
    let mut edges = Vec::new();
    let mut agg_rows = vec![false; lp.n_rows()];
    for i in 0..lp.n_rows() {
        let Some((a, b, coef_a)) = is_aggregation_row(lp, i) else {
            continue;
        };
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            agg_rows[i] = true;
            continue;
        }
        let lo = glo[ra].max(glo[rb]);
        let hi = ghi[ra].min(ghi[rb]);
        if lo > hi {
            return Presolved::Infeasible;
        }
        let (root, child) = if ra < rb { (ra, rb) } else { (rb, ra) };
        uf.0[child] = root;
        glo[root] = lo;
        ghi[root] = hi;
        agg_rows[i] = true;
        edges.push(Edge { row: i, a, b, coef_a });
    }

    // Assign reduced columns to non-fixed representatives.
    let mut var_map = vec![VarMap::Fixed(0.0); n];
    let mut rep_col: HashMap<usize, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let (mut cost, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
    for v in 0..n {
        let r = uf.find(v);
        if glo[r] == ghi[r] {
            var_map[v] = VarMap::Fixed(glo[r]);
            continue;
        }
        let col = *rep_col.entry(r).or_insert_with(|| {
            cost.push(0.0);
            lo.push(glo[r]);
            hi.push(ghi[r]);
            groups.push(Vec::new());
            cost.len() - 1
        });
        cost[col] += sign * lp.objective()[v];
        groups[col].push(v);
        var_map[v] = VarMap::Col(col);
    }

    // Rebuild rows on the reduced columns and merge duplicates.
    let mut red = Reduced {
        cost,
        lo,
        hi,
        rlo: Vec::new(),
        rhi: Vec::new(),
        row_idx: Vec::new(),
        row_val: Vec::new(),
    };
    let mut lo_src = Vec::new();
    let mut hi_src = Vec::new();
    let mut seen: HashMap<(Vec<usize>, Vec<u64>), usize> = HashMap::new();
    let mut acc: HashMap<usize, f64> = HashMap::new();
    for (i, row) in lp.rows().iter().enumerate() {
        if agg_rows[i] {
            continue;
        }
        acc.clear();
        let mut shift = 0.0;
        for (&j, &a) in row.indices.iter().zip(&row.coeffs) {
            match var_map[j] {
                VarMap::Col(c) => *acc.entry(c).or_insert(0.0) += a,
                VarMap::Fixed(v) => shift += a * v,
            }
        }
        let mut terms: Vec<(usize, f64)> = acc.iter().map(|(&c, &a)| (c, a)).filter(|t| t.1 != 0.0).collect();
        terms.sort_by_key(|t| t.0);
        let b = row.rhs - shift;
        let (rl, rh) = match row.relation {
            Relation::Le => (f64::NEG_INFINITY, b),
            Relation::Ge => (b, f64::INFINITY),
            Relation::Eq => (b, b),
        };
        if terms.is_empty() {
            let tol = FEAS_TOL * (1.0 + row.rhs.abs());
            if rl > tol || rh < -tol {
                return Presolved::Infeasible;
            }
            continue;
        }
        let key = (
            terms.iter().map(|t| t.0).collect::<Vec<_>>(),
            terms.iter().map(|t| t.1.to_bits()).collect::<Vec<_>>(),
        );
        if let Some(&k) = seen.get(&key) {
            if rl > red.rlo[k] {
                red.rlo[k] = rl;
                lo_src[k] = Some(i);
            }
            if rh < red.rhi[k] {
                red.rhi[k] = rh;
                hi_src[k] = Some(i);
            }
            if red.rlo[k] > red.rhi[k] + FEAS_TOL * (1.0 + rh.abs()) {
                return Presolved::Infeasible;
            }
            continue;
        }
        seen.insert(key, red.rlo.len());
        red.row_idx.push(terms.iter().map(|t| t.0).collect());
        red.row_val.push(terms.iter().map(|t| t.1).collect());
        red.rlo.push(rl);
        red.rhi.push(rh);
        lo_src.push(rl.is_finite().then_some(i));
        hi_src.push(rh.is_finite().then_some(i));
    }

    Presolved::Reduced(
        red,
        Postsolve {
            var_map,
            lo_src,
            hi_src,
            groups,
            edges,
            agg_rows,
        },
    )
}

impl Postsolve {
    pub fn primal(&self, xr: &[f64]) -> Vec<f64> {
        self.var_map
            .iter()
            .map(|m| match *m {
                VarMap::Col(c) => xr[c],
                VarMap::Fixed(v) => v,
            })
            .collect()
    }

    /// Maps reduced-row duals (minimisation form) to original-row duals in
    /// minimisation form. `xr` and `red` describe the reduced optimum.
    pub fn duals(&self, lp: &LinearProgram, red: &Reduced, xr: &[f64], yr: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; lp.n_rows()];
        for (k, &v) in yr.iter().enumerate() {
            let src = if v > 0.0 { self.lo_src[k] } else { self.hi_src[k] };
            if let Some(i) = src.or(self.lo_src[k]).or(self.hi_src[k]) {
                y[i] = v;
            }
        }
        if self.edges.is_empty() {
            return y;
        }

        let sign = match lp.sense() {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        // g_v = c_v − Σ_{ordinary rows} a_iv y_i for every original variable.
        let mut g: Vec<f64> = lp.objective().iter().map(|c| sign * c).collect();
        for (i, row) in lp.rows().iter().enumerate() {
            if self.agg_rows[i] || y[i] == 0.0 {
                continue;
            }
            for (&j, &a) in row.indices.iter().zip(&row.coeffs) {
                g[j] -= a * y[i];
            }
        }

        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            adj.entry(edge.a).or_default().push(e);
            adj.entry(edge.b).or_default().push(e);
        }
        let coef = |e: &Edge, v: usize| if v == e.a { e.coef_a } else { -e.coef_a };
        let mut target = vec![0.0; lp.n_vars()];
        let mut acc = vec![0.0; lp.n_vars()];
        for (col, members) in self.groups.iter().enumerate() {
            if members.len() < 2 {
                continue;
            }
            let dm: f64 = members.iter().map(|&v| g[v]).sum();
            // The member whose own bound is the active merged bound absorbs dm.
            let at_lo = (xr[col] - red.lo[col]).abs() <= (red.hi[col] - xr[col]).abs();
            let root = members
                .iter()
                .copied()
                .find(|&v| {
                    if at_lo {
                        lp.lower()[v] == red.lo[col]
                    } else {
                        lp.upper()[v] == red.hi[col]
                    }
                })
                .unwrap_or(members[0]);
            target[root] = dm;

            // Breadth-first order from the root, then solve leaves first.
            let mut order = vec![root];
            let mut parent_edge: HashMap<usize, usize> = HashMap::new();
            let mut head = 0;
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &e in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                    let edge = &self.edges[e];
                    let w = if edge.a == v { edge.b } else { edge.a };
                    if w != root && !parent_edge.contains_key(&w) {
                        parent_edge.insert(w, e);
                        order.push(w);
                    }
                }
            }
            for &v in order.iter().skip(1).rev() {
                let e = parent_edge[&v];
                let edge = self.edges[e];
                let val = (g[v] - target[v] - acc[v]) / coef(&edge, v);
                y[edge.row] = val;
                acc[edge.a] += coef(&edge, edge.a) * val;
                acc[edge.b] += coef(&edge, edge.b) * val;
            }
        }
        y
    }
}
