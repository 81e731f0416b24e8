use approx::assert_abs_diff_eq;
use dri_core::experiments::*;
use dri_core::grid::uniform_grid;

#[test]
fn split_preserves_mass_and_mean() {
    let grid = uniform_grid(10).unwrap();
    let parts = split_atom(&grid, 0.3, 0.7);
    assert_eq!(parts.len(), 2);
    let mass: f64 = parts.iter().map(|p| p.1).sum();
    let mean: f64 = parts.iter().map(|p| grid[p.0] * p.1).sum();
    assert_abs_diff_eq!(mass, 0.7, epsilon = 1e-15);
    assert_abs_diff_eq!(mean, 0.21, epsilon = 1e-15);
    assert_eq!(split_atom(&grid, 1.0, 0.5), vec![(9, 0.5)]);
}

#[test]
fn contamination_priors_keep_the_mean() {
    for g in [100, 37] {
        let (pn, pw) = contamination_priors(g).unwrap();
        assert_abs_diff_eq!(pn.mean(0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pw.mean(0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pw.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }
}

#[test]
fn posted_price() {
    let (t, v) = posted_price_uniform(1001).unwrap();
    assert_eq!((t, v), (0.5, 0.25));
}

#[test]
fn nominal_lp_uniform_grid() {
    let prior = dri_core::GridDistribution::uniform(&uniform_grid(100).unwrap()).unwrap();
    let r = nominal_optimal_lp(&prior).unwrap();
    assert_abs_diff_eq!(r.value, 0.380_815_124_236_035_1, epsilon = 1e-9);
    let rep = dri_core::verify::check_samples(&r.nu, &r.x, &r.p);
    assert!(rep.is_feasible(1e-8), "{rep:?}");
}

#[test]
fn nominal_lp_dirac_extracts_surplus() {
    let prior = dri_core::GridDistribution::univariate(&[0.2, 0.7], &[0.0, 1.0]).unwrap();
    assert_abs_diff_eq!(nominal_optimal_lp(&prior).unwrap().value, 0.7, epsilon = 1e-12);
}

#[test]
fn uniform_table() {
    let rows = uniform_comparison().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r.rule.as_str()).collect();
    assert_eq!(names, ["posted_price", "linear", "clipped_linear", "maximal", "nominal_optimal"]);
    let csv = comparison_csv(&rows);
    for v in ["0.2500", "0.3333", "0.3716", "0.3808"] {
        assert!(csv.contains(v), "{csv}");
    }
}

#[test]
fn crossover_interpolates() {
    let eps = [0.0, 0.5, 1.0];
    assert_abs_diff_eq!(crossover(&eps, &[-1.0, -0.5, 0.5]).unwrap(), 0.75, epsilon = 1e-15);
    assert_eq!(crossover(&eps, &[1.0, 1.0, 1.0]), None);
    assert_eq!(sign_changes(&[-1.0, 0.0, 2.0, 3.0]), 1);
}

#[test]
fn small_contamination_run() {
    let run = contamination(20, 11).unwrap();
    for p in &run.points {
        assert!(p.perf_nominal <= 1.0 + 1e-9 && p.perf_linear <= 1.0 + 1e-9 && p.perf_maximal <= 1.0 + 1e-9);
    }
    let csv = run.csv();
    assert!(csv.starts_with("eps,perf_nominal,perf_linear,perf_maximal\n"));
    assert_eq!(csv.lines().count(), 12);
    let summary: serde_json::Value = serde_json::from_str(&run.summary_json()).unwrap();
    assert_eq!(summary["grid"], 20);
    assert!(run.svg().starts_with("<svg"));
    assert!(contamination(5, 11).unwrap_err().is_domain());
}

#[test]
fn guarantee_csv() {
    let rows = guarantee_curves(&default_guarantee_grid()).unwrap();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r.c >= 0.0));
    assert!(guarantees_csv(&rows).starts_with("mu,rho,c,b,z_approx\n"));
    assert!(guarantee_curves(&[0.2]).unwrap_err().is_domain());
}
