use qrevert::verify::{list_checks, run_suite, Status, Tier};

#[test]
fn classical_suite_passes() {
    let r = run_suite("classical", 1e-10);
    assert!(r.checks.len() >= 15);
    for c in &r.checks {
        assert_eq!(c.tier, Tier::A);
        assert_eq!(
            c.status,
            Status::Pass,
            "{} {} {}",
            c.id,
            c.max_abs_error,
            c.notes
        );
        assert!(c.samples > 0, "{}", c.id);
    }
    assert_eq!(r.tier_a_failures(), 0);
}

#[test]
fn reports_are_deterministic_and_sorted() {
    let a = run_suite("all", 1e-10);
    let b = run_suite("all", 1e-10);
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.checks.windows(2).all(|w| w[0].id < w[1].id));
    assert_eq!(a.checks.len(), list_checks().len());
}

#[test]
fn status_matches_error_and_tolerance() {
    for c in run_suite("all", 1e-8).checks {
        match c.status {
            Status::Pass => assert!(c.max_abs_error < c.tolerance, "{}", c.id),
            Status::Fail => assert!(!(c.max_abs_error < c.tolerance), "{}", c.id),
            Status::Recorded => assert!(!c.notes.is_empty(), "{}", c.id),
            Status::Skipped => {}
        }
    }
}

#[test]
fn fitted_constants_are_reported() {
    let r = run_suite("paper", 1e-8);
    let notes = |id: &str| r.checks.iter().find(|c| c.id == id).unwrap().notes.clone();
    assert!(notes("paper.real.s_residual").contains("l2 ="));
    assert!(notes("paper.real.u_form").contains("l2 ="));
    assert!(notes("paper.real.preimage_gap_two_paths").contains("l2 ="));
    let root = notes("paper.real.sqrt_model_residual");
    for key in ["l1 =", "sign =", "K ="] {
        assert!(root.contains(key), "{root}");
    }
    assert!(notes("paper.real.x_chain_ode").contains("constant c ="));
}

#[test]
fn paper_findings_are_recorded() {
    let r = run_suite("paper", 1e-8);
    let get = |id: &str| r.checks.iter().find(|c| c.id == id).unwrap();
    assert_eq!(
        get("paper.reversion.bracket_factor_n").status,
        Status::Recorded
    );
    assert_eq!(get("paper.chain.p_sign").status, Status::Recorded);
    assert_eq!(get("paper.chain.g_of_y").status, Status::Pass);
    assert!(get("paper.modular.beta_constant")
        .notes
        .contains("matches the cubed form"));
    assert!(get("paper.real.beta_constant")
        .notes
        .contains("matches the Gamma(1/3)^3 form"));
}
