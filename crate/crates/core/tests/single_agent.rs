use approx::assert_abs_diff_eq;
use dri_core::grid::uniform_grid;
use dri_core::single_agent::*;
use dri_core::verify::{check_feasibility, SLACK_TOL};
use dri_core::MomentSet;

fn linear_sweep() -> Vec<f64> {
    let mp = mu_prime().mu_prime;
    (0..20).map(|k| mp + (0.99 - mp) * k as f64 / 19.0).collect()
}

#[test]
fn z_star_closed_form() {
    assert_abs_diff_eq!(z_star(0.5).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(z_star(0.8).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
    assert!(z_star(0.0).unwrap_err().is_domain());
    assert!(z_star(1.0).unwrap_err().is_domain());
}

#[test]
fn mu_prime_program() {
    // z(1/2) = (3·1/4 − 1 + ½·√(2·(1/16 + 1/2 − 3 + 3)))/(2 − 1/4).
    let oracle = (3.0 * 2f64.sqrt() - 2.0) / 14.0;
    assert_abs_diff_eq!(mu_prime_objective(0.5).unwrap(), oracle, epsilon = 1e-12);
    assert_abs_diff_eq!(oracle, 0.160_188_620_508_520_4, epsilon = 1e-15);

    let r = mu_prime();
    assert_abs_diff_eq!(r.z_prime, 0.186_940_452_661_499_5, epsilon = 1e-9);
    assert_abs_diff_eq!(r.t_star, 0.623_979_495_729_526_3, epsilon = 1e-6);
    assert_abs_diff_eq!(r.mu_prime, 2.0 * r.z_prime / (r.z_prime + 1.0), epsilon = 1e-15);
    // The reported optimum beats every point on a fine feasible scan.
    for k in 0..=7000 {
        let t = k as f64 / 10_000.0;
        if let Some(v) = mu_prime_objective(t) {
            assert!(v <= r.z_prime + 1e-12, "t = {t}: {v} > {}", r.z_prime);
        }
    }
}

#[test]
fn radicand_factorisation() {
    for k in 0..=100 {
        let t = k as f64 / 100.0;
        let f = (t - 1.0) * (t.powi(3) + t * t + 3.0 * t - 3.0);
        assert_abs_diff_eq!(mu_prime_radicand(t), f, epsilon = 1e-13);
    }
}

#[test]
fn linear_mechanism_at_one_half() {
    let m = linear_mechanism(0.5).unwrap();
    assert_abs_diff_eq!(m.params.lambda1, 8.0 / 9.0, epsilon = 1e-15);
    assert_abs_diff_eq!(m.params.lambda0, -1.0 / 9.0, epsilon = 1e-15);
    assert_abs_diff_eq!(m.payment.integral(), 1.0 / 3.0, epsilon = 1e-15);
    assert!(m.params.breakpoints_ordered());
    // Allocation is continuous and reaches one at ν̄.
    assert!(m.allocation.max_jump() < 1e-12);
    assert_abs_diff_eq!(m.allocation.at(m.params.nu_bar), 1.0, epsilon = 1e-12);
}

#[test]
fn linear_window_is_enforced() {
    let e = linear_mechanism(0.2).unwrap_err();
    assert!(e.is_domain());
    let msg = e.to_string();
    assert!(msg.contains("μ′") && msg.contains("three-point"), "{msg}");
    assert!(linear_mechanism(1.0).unwrap_err().is_domain());
}

#[test]
fn two_point_family_is_feasible() {
    for mu in linear_sweep() {
        for m in [
            linear_mechanism(mu).unwrap(),
            clipped_linear_mechanism(mu).unwrap(),
            blended_mechanism(mu, 0.3).unwrap(),
            maximal_payment_mechanism(mu).unwrap(),
        ] {
            let r = check_feasibility(&m, 2001).unwrap();
            assert!(r.is_feasible(SLACK_TOL), "{:?} at μ = {mu}: {r:?}", m.rule);
            assert!(m.params.breakpoints_ordered());
        }
    }
}

#[test]
fn maximal_dominates_linear() {
    let grid = uniform_grid(2001).unwrap();
    for mu in linear_sweep() {
        let lin = linear_mechanism(mu).unwrap().payment.sample(&grid);
        let max = maximal_payment_mechanism(mu).unwrap().payment.sample(&grid);
        let gaps: Vec<f64> = lin.iter().zip(&max).map(|(a, b)| b - a).collect();
        assert!(gaps.iter().all(|g| *g >= -1e-12), "μ = {mu}");
        assert!(gaps.iter().any(|g| *g > 1e-6), "μ = {mu}");
    }
}

#[test]
fn maximal_payment_under_uniform() {
    let m = maximal_payment_mechanism(0.5).unwrap();
    assert_abs_diff_eq!(m.payment.integral(), 0.371_620_656_149_977_1, epsilon = 1e-12);
}

#[test]
fn clipped_payment_is_nonnegative() {
    let m = clipped_linear_mechanism(0.5).unwrap();
    let grid = uniform_grid(1001).unwrap();
    assert!(m.payment.sample(&grid).iter().all(|p| *p >= 0.0));
    // Clipping only removes the negative part: ∫ max(8ν/9 − 1/9, 0) = 49/144.
    assert_abs_diff_eq!(m.payment.integral(), 49.0 / 144.0, epsilon = 1e-14);
}

#[test]
fn blend_weights_validated() {
    assert!(blended_mechanism(0.5, 1.5).unwrap_err().is_domain());
    let a = blended_mechanism(0.5, 1.0).unwrap().payment.integral();
    assert_abs_diff_eq!(a, 1.0 / 3.0, epsilon = 1e-14);
}

#[test]
fn recovery_matches_closed_form() {
    let m = maximal_payment_mechanism(0.5).unwrap();
    let mut errs = Vec::new();
    for g in [501, 2001] {
        let (nu, p) = recover_maximal_payment(&m.allocation, g).unwrap();
        let e = nu.iter().zip(&p).map(|(v, q)| (m.payment.at(*v) - q).abs()).fold(0.0, f64::max);
        assert!(e <= 2.0 / g as f64, "G = {g}: {e}");
        errs.push(e);
    }
    assert!(errs[0] >= 3.0 * errs[1]);
}

#[test]
fn recovery_rejects_decreasing_allocation() {
    let x = dri_core::PiecewiseFn::linear(1.0, -1.0);
    assert!(recover_maximal_payment(&x, 11).unwrap_err().is_domain());
}

#[test]
fn three_point_family() {
    for mu in [0.107, 0.15, 0.2] {
        let p = three_point_params(mu).unwrap();
        assert_abs_diff_eq!(p.z_star, three_point_value(mu), epsilon = 1e-12);
        assert!(p.breakpoints_ordered(), "μ = {mu}: {p:?}");
        for m in [three_point_mechanism(mu).unwrap(), three_point_maximal(mu).unwrap()] {
            let r = check_feasibility(&m, 2001).unwrap();
            assert!(r.is_feasible(SLACK_TOL), "{:?} at μ = {mu}: {r:?}", m.rule);
        }
    }
    assert!(three_point_mechanism(0.3).unwrap_err().is_domain());
    assert!(three_point_maximal(0.05).unwrap_err().is_domain());
}

#[test]
fn three_point_ir_breaks_near_upper_end() {
    // IR slack νx − p on [ν*, ν̄] is ν² + (1 − ν̄ − λ₁)ν − λ₀, which dips
    // below zero once μ exceeds about 0.2471.
    let m = three_point_mechanism(0.25).unwrap();
    let r = check_feasibility(&m, 2001).unwrap();
    assert!(r.min_ir_slack < -2e-4 && r.min_ir_slack > -3e-4, "{r:?}");
    let p = m.params;
    let v = -(1.0 - p.nu_bar - p.lambda1) / 2.0;
    assert!(v > p.nu_star && v < p.nu_bar);
    let slack = v * v + (1.0 - p.nu_bar - p.lambda1) * v - p.lambda0;
    assert_abs_diff_eq!(slack, r.min_ir_slack, epsilon = 1e-6);
}

#[test]
fn frontier_single_moment() {
    // On a grid of spacing h the discretized value is 1/3 + h²/6.
    for g in [51, 201] {
        let h = 1.0 / (g - 1) as f64;
        let f = moment_frontier_lp(&MomentSet::mean(0.5).unwrap(), g).unwrap();
        assert_abs_diff_eq!(f.value, 1.0 / 3.0 + h * h / 6.0, epsilon = 1e-9);
        assert!(f.lambda[0] <= 0.0);
    }
}

#[test]
fn frontier_second_moment_adds_value() {
    let one = moment_frontier_lp(&MomentSet::mean(0.5).unwrap(), 201).unwrap();
    let two = moment_frontier_lp(&MomentSet::new(1, vec![0.5, 1.0 / 3.0]).unwrap(), 201).unwrap();
    assert!(two.value >= one.value - 1e-9);
    assert_eq!(two.lambda.len(), 3);
}

#[test]
fn guarantees() {
    let small = approx_small_mu(0.02).unwrap();
    assert_abs_diff_eq!(small.rho, 0.462_290_741_840_041_4, epsilon = 1e-9);
    assert_abs_diff_eq!(small.c, small.b - small.z_approx, epsilon = 1e-15);
    let at = approx_mid_mu(mu_prime().mu_prime).unwrap();
    assert_abs_diff_eq!(at.rho, 1.0, epsilon = 1e-12);
    assert!(approx_small_mu(0.107).unwrap_err().is_domain());
    assert!(approx_mid_mu(0.25).unwrap_err().is_domain());
    assert!(approx_mid_mu(0.32).unwrap_err().is_domain());
}

#[test]
fn upper_bound_takes_the_smaller_adversary() {
    for mu in [0.05, 0.2, 0.5] {
        let b = upper_bound_b(mu);
        assert_eq!(b, (mu / (2.0 - mu)).min(three_point_value(mu)));
    }
}
