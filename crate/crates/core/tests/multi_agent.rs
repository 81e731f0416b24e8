use dri_core::multi_agent::*;

fn check_ok(c: &TableCheck, tol: f64) {
    for (name, v) in [
        ("ds_ic", c.ds_ic),
        ("ep_ir", c.ep_ir),
        ("allocation", c.allocation),
        ("aggregate", c.aggregate),
        ("dominance", c.dominance),
        ("symmetry", c.symmetry),
        ("monotone", c.monotone),
    ] {
        assert!(v <= tol, "{name} residual {v}");
    }
}

#[test]
fn census_matches_built_rows() {
    for (j, g) in [(2, 6), (3, 4), (2, 9)] {
        for cs in [ConstraintSet::published(j), ConstraintSet::default(), ConstraintSet::from_names(&ConstraintSet::NAMES).unwrap()] {
            let built = build_lp(j, g, 0.4, 0.1, &cs).unwrap();
            let expected = Census::expected(j, g, &cs);
            assert_eq!(built.census, expected, "J = {j}, G = {g}, {cs:?}");
            assert_eq!(built.lp.n_rows(), expected.total());
        }
    }
}

#[test]
fn census_two_agents_six_points() {
    // 2J·S(G−1) IC + 2J·S IR + S feasibility + S aggregate + S dominance,
    // 3(J−1)(J·S − (J−2)G^{J−1})/2 symmetry, 2·J·G^{J−1}(G−1) monotone.
    let c = Census::expected(2, 6, &ConstraintSet::published(2));
    assert_eq!((c.ds_ic, c.ep_ir, c.allocation, c.aggregate, c.dominance), (720, 144, 36, 36, 36));
    assert_eq!((c.symmetry, c.monotone, c.p_zero, c.p_top), (108, 180, 0, 0));
    assert_eq!(c.total(), 1260);
}

#[test]
fn layout_round_trips() {
    let lay = Layout::new(3, 5);
    for s in 0..lay.scenarios {
        assert_eq!(lay.index(&lay.coords(s)), s);
    }
    // Agent 1 is the most significant coordinate.
    assert_eq!(lay.coords(1), vec![0, 0, 1]);
    assert_eq!(lay.shift(0, 0, 2), 50);
}

#[test]
fn nnz_cap_is_enforced() {
    let cs = ConstraintSet::published(3);
    let est = estimate_nnz(3, 8, &cs);
    let e = build_lp_capped(3, 8, 1.0 / 3.0, 0.0, &cs, est / 2).unwrap_err();
    assert!(matches!(e, dri_core::Error::TooLarge { .. }), "{e}");
}

#[test]
fn unknown_flag_is_a_domain_error() {
    assert!(ConstraintSet::from_names(&["symmetry", "bogus"]).unwrap_err().is_domain());
}

#[test]
fn small_two_agent_table_checks_out() {
    let ctx = MuContext::two_agent_default().unwrap();
    let t = solve_multi_agent(2, 7, &ctx, &ConstraintSet::published(2)).unwrap();
    assert!(t.is_feasible());
    check_ok(&check_table(&t).unwrap(), 1e-7);
    let back = MultiAgentTable::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
    let csv = table_surfaces(&t, &[None, None]).unwrap();
    assert!(csv.starts_with("nu_a,nu_b,x1,p1,pm1\n"));
    assert_eq!(csv.lines().count(), 1 + 49);
}

#[test]
fn three_agent_lambdas() {
    assert_eq!(MuContext::ThreeAgent.lambdas(3).unwrap(), (1.0 / 3.0, 0.0));
    assert!(MuContext::ThreeAgent.lambdas(2).is_err());
}

#[test]
fn table_json_rejects_wrong_kind() {
    let ctx = MuContext::two_agent_default().unwrap();
    let t = solve_multi_agent(2, 4, &ctx, &ConstraintSet::published(2)).unwrap();
    let text = t.to_json().replace("\"multi_agent\"", "\"mechanism\"");
    assert!(matches!(MultiAgentTable::from_json(&text), Err(dri_core::Error::Parse { .. })));
}
