use dri_lp::{solve, write_mps, LinearProgram, LpStatus, Relation, Sense};
use proptest::prelude::*;

fn assert_certified(lp: &LinearProgram) -> dri_lp::LpSolution {
    let sol = solve(lp).expect("solve");
    assert_eq!(sol.status, LpStatus::Optimal);
    let cert = lp.certificate(&sol);
    assert!(cert.holds(1e-7, 1e-6), "{cert:?}");
    sol
}

#[test]
fn box_case() {
    let mut lp = LinearProgram::new(1, Sense::Maximize);
    lp.set_objective(0, 1.0);
    lp.add_row(&[(0, 1.0)], Relation::Le, 1.0);
    let sol = assert_certified(&lp);
    assert_eq!(sol.objective, 1.0);
    assert!((sol.duals[0] - 1.0).abs() < 1e-12);
}

#[test]
fn empty_feasible_set() {
    let mut lp = LinearProgram::new(1, Sense::Minimize);
    lp.add_row(&[(0, 1.0)], Relation::Le, -1.0);
    assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
}

#[test]
fn unbounded_ray() {
    let mut lp = LinearProgram::new(2, Sense::Maximize);
    lp.set_objective(0, 1.0);
    lp.add_row(&[(0, 1.0), (1, -1.0)], Relation::Le, 1.0);
    let sol = solve(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Unbounded);
    assert_eq!(sol.objective, f64::INFINITY);
}

#[test]
fn invalid_models_are_rejected() {
    let mut lp = LinearProgram::new(1, Sense::Minimize);
    lp.add_row(&[(0, f64::NAN)], Relation::Le, 1.0);
    assert!(solve(&lp).is_err());
    let mut lp = LinearProgram::new(1, Sense::Minimize);
    lp.set_bounds(0, 2.0, 1.0);
    assert!(solve(&lp).is_err());
    let mut lp = LinearProgram::new(1, Sense::Minimize);
    lp.add_row(&[(3, 1.0)], Relation::Le, 1.0);
    assert!(solve(&lp).is_err());
}

/// Adversary's problem against the linear payment 8ν/9 − 1/9 at mean 1/2:
/// every mean-1/2 distribution pays exactly 1/3.
#[test]
fn adversary_linear_payment() {
    let g = 101;
    let mut lp = LinearProgram::new(g, Sense::Minimize);
    let nu: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
    for (i, &v) in nu.iter().enumerate() {
        lp.set_objective(i, 8.0 * v / 9.0 - 1.0 / 9.0);
    }
    let ones: Vec<(usize, f64)> = (0..g).map(|i| (i, 1.0)).collect();
    let mean: Vec<(usize, f64)> = nu.iter().enumerate().map(|(i, &v)| (i, v)).collect();
    lp.add_row(&ones, Relation::Eq, 1.0);
    lp.add_row(&mean, Relation::Eq, 0.5);
    let sol = assert_certified(&lp);
    assert!((sol.objective - 1.0 / 3.0).abs() < 1e-9, "{}", sol.objective);
}

#[test]
fn free_variables_and_ranges() {
    // min |a - 3| + |b + 2| written with free a, b and epigraph variables.
    let mut lp = LinearProgram::new(4, Sense::Minimize);
    lp.set_free(0);
    lp.set_free(1);
    lp.set_objective(2, 1.0);
    lp.set_objective(3, 1.0);
    lp.add_row(&[(2, 1.0), (0, -1.0)], Relation::Ge, -3.0);
    lp.add_row(&[(2, 1.0), (0, 1.0)], Relation::Ge, 3.0);
    lp.add_row(&[(3, 1.0), (1, -1.0)], Relation::Ge, 2.0);
    lp.add_row(&[(3, 1.0), (1, 1.0)], Relation::Ge, -2.0);
    lp.add_row(&[(0, 1.0), (1, 1.0)], Relation::Eq, 4.0);
    let sol = assert_certified(&lp);
    // a + b = 4 forces a total deviation of |a-3| + |b+2| >= 3.
    assert!((sol.objective - 3.0).abs() < 1e-9);
}

/// Beale's example cycles under the textbook largest-coefficient rule.
#[test]
fn beale_cycling_example_terminates() {
    let mut lp = LinearProgram::new(4, Sense::Minimize);
    for (j, c) in [-0.75, 150.0, -0.02, 6.0].into_iter().enumerate() {
        lp.set_objective(j, c);
    }
    lp.add_row(&[(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Relation::Le, 0.0);
    lp.add_row(&[(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Relation::Le, 0.0);
    lp.add_row(&[(2, 1.0)], Relation::Le, 1.0);
    let sol = assert_certified(&lp);
    assert!((sol.objective + 0.05).abs() < 1e-9, "{}", sol.objective);
}

#[test]
fn aggregated_pairs_keep_a_valid_dual() {
    // x0 = x1 = x2 tied by equality rows; duplicate rows; a fixed variable.
    let mut lp = LinearProgram::new(4, Sense::Maximize);
    lp.set_objective(0, 1.0);
    lp.set_objective(1, 2.0);
    lp.set_objective(2, -0.5);
    lp.set_objective(3, 1.0);
    lp.set_bounds(1, 0.0, 0.75);
    lp.set_bounds(3, 0.25, 0.25);
    lp.add_row(&[(0, 2.0), (1, -2.0)], Relation::Eq, 0.0);
    lp.add_row(&[(2, 1.0), (1, -1.0)], Relation::Eq, 0.0);
    lp.add_row(&[(0, 1.0), (2, -1.0)], Relation::Eq, 0.0);
    lp.add_row(&[(0, 1.0), (3, 1.0)], Relation::Le, 2.0);
    lp.add_row(&[(0, 1.0), (3, 1.0)], Relation::Le, 1.5);
    let sol = assert_certified(&lp);
    assert!((sol.objective - (2.5 * 0.75 + 0.25)).abs() < 1e-12);
    assert_eq!(sol.primal[0], sol.primal[2]);
}

#[test]
fn identical_input_identical_output() {
    let mut lp = LinearProgram::new(3, Sense::Maximize);
    lp.set_objective(0, 1.0);
    lp.set_objective(1, 1.0);
    lp.set_objective(2, 1.0);
    lp.add_row(&[(0, 1.0), (1, 1.0)], Relation::Le, 1.0);
    lp.add_row(&[(1, 1.0), (2, 1.0)], Relation::Le, 1.0);
    lp.add_row(&[(0, 1.0), (2, 1.0)], Relation::Le, 1.0);
    let a = solve(&lp).unwrap();
    let b = solve(&lp).unwrap();
    assert_eq!(a, b);
    assert!((a.objective - 1.5).abs() < 1e-12);
}

#[test]
fn mps_dump_round_trips_digits() {
    let mut lp = LinearProgram::new(2, Sense::Maximize);
    lp.set_objective(0, 1.0 / 3.0);
    lp.set_free(1);
    lp.add_row(&[(0, 0.1), (1, 1.0)], Relation::Ge, 2.0 / 7.0);
    let text = write_mps(&lp, "demo");
    let rendered = text
        .lines()
        .find(|l| l.contains("x0  obj"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap();
    assert_eq!(rendered.parse::<f64>().unwrap(), 1.0 / 3.0);
    assert!(text.contains("FR bnd  x1"));
    assert!(text.contains("OBJSENSE"));
}

/// Brute-force optimum by enumerating vertices of a box-bounded LP.
fn vertex_oracle(
    n: usize,
    c: &[f64],
    rows: &[(Vec<f64>, Relation, f64)],
    lo: f64,
    hi: f64,
) -> Option<f64> {
    // Candidate tight constraints: each row as equality, each bound.
    let mut planes: Vec<(Vec<f64>, f64)> = rows.iter().map(|r| (r.0.clone(), r.2)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lo));
        planes.push((e, hi));
    }
    let feasible = |x: &[f64]| {
        let tol = 1e-9;
        x.iter().all(|&v| v >= lo - tol && v <= hi + tol)
            && rows.iter().all(|(a, rel, b)| {
                let s: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                match rel {
                    Relation::Le => s <= b + tol,
                    Relation::Ge => s >= b - tol,
                    Relation::Eq => (s - b).abs() <= tol,
                }
            })
    };
    let mut best: Option<f64> = None;
    let k = planes.len();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        // Solve the n×n system for this choice of planes.
        let mut m: Vec<Vec<f64>> = idx
            .iter()
            .map(|&p| {
                let mut r = planes[p].0.clone();
                r.push(planes[p].1);
                r
            })
            .collect();
        let mut ok = true;
        for col in 0..n {
            let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
            if m[piv][col].abs() < 1e-10 {
                ok = false;
                break;
            }
            m.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for cc in col..=n {
                        m[r][cc] -= f * m[col][cc];
                    }
                }
            }
        }
        if ok {
            let x: Vec<f64> = (0..n).map(|r| m[r][n] / m[r][r]).collect();
            if feasible(&x) {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
        // Next combination.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for t in i + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn small_coef() -> impl Strategy<Value = f64> {
    (-4i32..=4).prop_map(|v| v as f64 / 2.0)
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_vertex_enumeration(
        n in 1usize..4,
        c in prop::collection::vec(small_coef(), 3),
        rows in prop::collection::vec(
            (prop::collection::vec(small_coef(), 3), relation(), -6i32..=6),
            0..5,
        ),
    ) {
        let (lo, hi) = (-2.0, 3.0);
        let rows: Vec<(Vec<f64>, Relation, f64)> = rows
            .into_iter()
            .map(|(a, r, b)| (a[..n].to_vec(), r, b as f64 / 2.0))
            .collect();
        let mut lp = LinearProgram::new(n, Sense::Maximize);
        for j in 0..n {
            lp.set_objective(j, c[j]);
            lp.set_bounds(j, lo, hi);
        }
        for (a, rel, b) in &rows {
            let terms: Vec<(usize, f64)> = a.iter().copied().enumerate().filter(|t| t.1 != 0.0).collect();
            lp.add_row(&terms, *rel, *b);
        }
        let oracle = vertex_oracle(n, &c[..n], &rows, lo, hi);
        let sol = solve(&lp).unwrap();
        match oracle {
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert!((sol.objective - v).abs() < 1e-7, "{} vs {}", sol.objective, v);
                let cert = lp.certificate(&sol);
                prop_assert!(cert.holds(1e-7, 1e-6), "{:?}", cert);
            }
        }
    }
}
